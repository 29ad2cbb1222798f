#pragma once

#include <complex>

namespace crbound {

/// Kahan compensated accumulator. Spectra tails span hundreds of dB, so
/// plain += loses the small increments that the convergence diagnostics
/// look at.
template <typename T = double>
class KahanSum {
public:
    void add(T value) {
        const T y = value - comp_;
        const T t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    KahanSum& operator+=(T value) {
        add(value);
        return *this;
    }

    T value() const { return sum_; }

private:
    T sum_{};
    T comp_{};
};

using KahanComplex = KahanSum<std::complex<double>>;

}  // namespace crbound
