#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <limits>

namespace crbound {

/// Real number in mantissa * 2^exp2 form with an extended exponent range.
///
/// Modal spectra span many hundreds of dB, so intermediate products of
/// spherical Bessel values can leave the double range long before the
/// final ratios do. All recurrences and spectrum assembly run on this
/// type; conversion back to double reports underflow instead of silently
/// returning 0.
struct ScaledReal {
    double mant = 0.0;       // 0, or magnitude in [0.5, 1)
    std::int64_t exp2 = 0;

    ScaledReal() = default;

    static ScaledReal from(double v) {
        ScaledReal s;
        if (v == 0.0) return s;
        int e = 0;
        s.mant = std::frexp(v, &e);
        s.exp2 = e;
        return s;
    }

    bool is_zero() const { return mant == 0.0; }

    double value() const {
        if (mant == 0.0) return 0.0;
        if (exp2 > 1100) return mant > 0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
        if (exp2 < -1140) return 0.0;
        return std::ldexp(mant, static_cast<int>(exp2));
    }

    /// True when the represented magnitude is below the smallest normal double.
    bool underflows_double() const {
        return !is_zero() && exp2 < std::numeric_limits<double>::min_exponent;
    }

    bool overflows_double() const {
        return !is_zero() && exp2 > std::numeric_limits<double>::max_exponent;
    }

    double log10_abs() const {
        if (mant == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log10(std::fabs(mant)) + static_cast<double>(exp2) * 0.30102999566398119521;
    }

    ScaledReal& normalize() {
        if (mant == 0.0) { exp2 = 0; return *this; }
        int e = 0;
        mant = std::frexp(mant, &e);
        exp2 += e;
        return *this;
    }

    friend ScaledReal operator*(ScaledReal a, ScaledReal b) {
        ScaledReal r;
        if (a.is_zero() || b.is_zero()) return r;
        r.mant = a.mant * b.mant;
        r.exp2 = a.exp2 + b.exp2;
        return r.normalize();
    }

    friend ScaledReal operator/(ScaledReal a, ScaledReal b) {
        ScaledReal r;
        if (a.is_zero()) return r;
        r.mant = a.mant / b.mant;
        r.exp2 = a.exp2 - b.exp2;
        return r.normalize();
    }

    friend ScaledReal operator+(ScaledReal a, ScaledReal b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.exp2 < b.exp2) std::swap(a, b);
        const std::int64_t shift = b.exp2 - a.exp2;   // <= 0
        if (shift < -1080) return a;                  // b is negligible
        ScaledReal r;
        r.mant = a.mant + std::ldexp(b.mant, static_cast<int>(shift));
        r.exp2 = a.exp2;
        return r.normalize();
    }

    friend ScaledReal operator-(ScaledReal a, ScaledReal b) {
        b.mant = -b.mant;
        return a + b;
    }

    ScaledReal operator-() const {
        ScaledReal r = *this;
        r.mant = -r.mant;
        return r;
    }

    friend ScaledReal operator*(double a, ScaledReal b) { return from(a) * b; }
    friend ScaledReal operator*(ScaledReal a, double b) { return a * from(b); }
    friend ScaledReal operator/(ScaledReal a, double b) { return a / from(b); }

    /// Magnitude comparison, sign ignored.
    bool abs_less(const ScaledReal& o) const {
        if (is_zero()) return !o.is_zero();
        if (o.is_zero()) return false;
        if (exp2 != o.exp2) return exp2 < o.exp2;
        return std::fabs(mant) < std::fabs(o.mant);
    }
};

}  // namespace crbound
