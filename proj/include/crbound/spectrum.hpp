#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crbound {

/// Modal label: either a generic ordinal index, or a multipole (tau, l)
/// pair for the electromagnetic example. m never appears because every
/// modal scalar is m-independent; the 2l+1 degeneracy is carried as a
/// multiplicity instead.
struct ModeLabel {
    int index = 0;
    std::optional<int> tau;
    std::optional<int> l;

    static ModeLabel generic(int i) { return {i, std::nullopt, std::nullopt}; }
    static ModeLabel multipole(int tau, int l) { return {0, tau, l}; }

    bool is_multipole() const { return tau.has_value() && l.has_value(); }

    friend bool operator==(const ModeLabel& a, const ModeLabel& b) {
        return a.index == b.index && a.tau == b.tau && a.l == b.l;
    }

    std::string str() const {
        if (is_multipole()) return "(" + std::to_string(*tau) + "," + std::to_string(*l) + ")";
        return std::to_string(index);
    }
};

enum class SpectrumOrdering { by_label, by_value_desc };

struct SpectrumEntry {
    ModeLabel label;
    double value = 0.0;      // nonnegative modal scalar
    int multiplicity = 1;
    bool underflow = false;  // true magnitude below double range, value is 0
};

/// Ordered list of (label, value, multiplicity). Iteration follows the
/// stored order; the ordering tag records which convention that is.
class ModalSpectrum {
public:
    ModalSpectrum() = default;
    explicit ModalSpectrum(std::vector<SpectrumEntry> entries,
                           SpectrumOrdering ordering = SpectrumOrdering::by_label)
        : entries_(std::move(entries)), ordering_(ordering) {
        for (const auto& e : entries_) {
            if (e.value < 0.0) throw std::invalid_argument("ModalSpectrum: negative value");
            if (e.multiplicity < 1) throw std::invalid_argument("ModalSpectrum: multiplicity < 1");
        }
    }

    /// Generic spectrum from plain values, labels 1..n, multiplicity 1.
    static ModalSpectrum from_values(const std::vector<double>& values) {
        std::vector<SpectrumEntry> es;
        es.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            es.push_back({ModeLabel::generic(static_cast<int>(i) + 1), values[i], 1, false});
        return ModalSpectrum(std::move(es));
    }

    const std::vector<SpectrumEntry>& entries() const { return entries_; }
    SpectrumOrdering ordering() const { return ordering_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Total count with multiplicities expanded.
    std::size_t expanded_size() const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += static_cast<std::size_t>(e.multiplicity);
        return n;
    }

    /// Values repeated per multiplicity, in iteration order.
    std::vector<double> expanded_values() const {
        std::vector<double> out;
        out.reserve(expanded_size());
        for (const auto& e : entries_)
            for (int i = 0; i < e.multiplicity; ++i) out.push_back(e.value);
        return out;
    }

    ModalSpectrum sorted_by_value_desc() const {
        std::vector<SpectrumEntry> es = entries_;
        std::stable_sort(es.begin(), es.end(),
                         [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value > b.value; });
        return ModalSpectrum(std::move(es), SpectrumOrdering::by_value_desc);
    }

private:
    std::vector<SpectrumEntry> entries_;
    SpectrumOrdering ordering_ = SpectrumOrdering::by_label;
};

}  // namespace crbound
