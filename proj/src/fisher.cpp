#include "crbound/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crbound/kahan.hpp"

namespace crbound::fisher {

namespace {

constexpr double kGeometricThreshold = 0.999;
constexpr std::size_t kMinModes = 8;

void require_paired(const ModalSpectrum& sigma, const ModalSpectrum& lambda) {
    if (sigma.size() != lambda.size())
        throw std::invalid_argument("spectra must pair one-to-one: size mismatch");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto& a = sigma.entries()[i];
        const auto& b = lambda.entries()[i];
        if (!(a.label == b.label))
            throw std::invalid_argument("spectra must pair one-to-one: label mismatch at entry " +
                                        std::to_string(i) + " (" + a.label.str() + " vs " +
                                        b.label.str() + ")");
        if (a.multiplicity != b.multiplicity)
            throw std::invalid_argument("spectra must pair one-to-one: multiplicity mismatch at " +
                                        a.label.str());
    }
}

}  // namespace

OverlapMatrix::OverlapMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : identity_(false), rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
        throw std::invalid_argument("OverlapMatrix: size mismatch");
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0 + 1e-12))
            throw std::invalid_argument("OverlapMatrix: entries must lie in [0, 1]");
    for (std::size_t i = 0; i < cols_; ++i) {
        KahanSum<> colsum;
        for (std::size_t j = 0; j < rows_; ++j) colsum += (*this)(j, i);
        if (colsum.value() > 1.0 + 1e-9)
            throw std::invalid_argument("OverlapMatrix: column sum exceeds 1 (Bessel inequality)");
    }
}

FisherSpectrum FisherSpectrum::sorted_by_mu_desc() const {
    FisherSpectrum out = *this;
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const FisherEntry& a, const FisherEntry& b) { return a.mu > b.mu; });
    out.ordering = SpectrumOrdering::by_value_desc;
    return out;
}

SeriesDiagnosis diagnose_increments(const std::vector<double>& increments) {
    std::vector<double> pos;
    pos.reserve(increments.size());
    for (double d : increments)
        if (d > 0.0) pos.push_back(d);
    if (pos.size() < kMinModes) return SeriesDiagnosis::undetermined;
    const std::size_t start = pos.size() - std::max<std::size_t>(pos.size() / 4, 4);
    KahanSum<> logratio;
    std::size_t n = 0;
    for (std::size_t i = start; i + 1 < pos.size(); ++i) {
        logratio += std::log(pos[i + 1] / pos[i]);
        ++n;
    }
    if (n == 0) return SeriesDiagnosis::undetermined;
    const double gmean = std::exp(logratio.value() / static_cast<double>(n));
    return gmean < kGeometricThreshold ? SeriesDiagnosis::converged : SeriesDiagnosis::diverging;
}

FisherSpectrum fisher_eigenvalues(const ModalSpectrum& sigma, const ModalSpectrum& lambda,
                                  ScalarField field) {
    require_paired(sigma, lambda);
    const double c = (field == ScalarField::real_field) ? 2.0 : 1.0;
    FisherSpectrum out;
    out.field = field;
    out.ordering = sigma.ordering();
    out.entries.reserve(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto& s = sigma.entries()[i];
        const auto& n = lambda.entries()[i];
        if (s.value == 0.0) continue;  // null-space mode
        if (n.value == 0.0)
            throw std::invalid_argument("singular noise: lambda = 0 with sigma > 0 at " +
                                        s.label.str());
        out.entries.push_back({s.label, c * s.value * s.value / n.value, s.multiplicity});
    }
    return out;
}

CrbCurve crb_curve(const FisherSpectrum& mu, std::size_t r_max) {
    if (mu.entries.empty()) throw std::invalid_argument("crb_curve: empty Fisher spectrum");
    if (r_max > mu.expanded_size())
        throw std::invalid_argument("crb_curve: r_max exceeds expanded mode count");
    CrbCurve out;
    out.points.reserve(r_max);
    KahanSum<> sum;
    std::vector<double> increments;
    increments.reserve(r_max);
    std::size_t r = 0;
    double prev = 0.0;
    for (const auto& e : mu.entries) {
        for (int k = 0; k < e.multiplicity && r < r_max; ++k) {
            const double inc = 1.0 / e.mu;
            sum += inc;
            ++r;
            out.points.push_back({static_cast<int>(r), sum.value()});
            if (sum.value() <= prev) out.monotone = false;
            prev = sum.value();
            increments.push_back(inc);
        }
        if (r >= r_max) break;
    }
    out.diagnosis = diagnose_increments(increments);
    return out;
}

namespace {

// Per expanded Jacobian mode i: sigma_i^2 * sum_j G_ji / lambda_j^pow.
// Identity overlap keeps multiplicities folded; an explicit matrix works
// on expanded indices.
std::vector<double> weighted_mode_terms(const ModalSpectrum& sigma, const ModalSpectrum& lambda,
                                        const OverlapMatrix& overlap, int lambda_power,
                                        std::size_t limit) {
    std::vector<double> terms;
    if (overlap.is_identity()) {
        require_paired(sigma, lambda);
        for (std::size_t i = 0; i < sigma.size() && terms.size() < limit; ++i) {
            const auto& s = sigma.entries()[i];
            const auto& n = lambda.entries()[i];
            if (s.value == 0.0) continue;
            if (n.value == 0.0)
                throw std::invalid_argument("singular noise: lambda = 0 with sigma > 0 at " +
                                            s.label.str());
            const double denom = lambda_power == 1 ? n.value : n.value * n.value;
            const double term = s.value * s.value / denom;
            for (int k = 0; k < s.multiplicity && terms.size() < limit; ++k)
                terms.push_back(term);
        }
        return terms;
    }
    const std::vector<double> sig = sigma.expanded_values();
    const std::vector<double> lam = lambda.expanded_values();
    if (overlap.cols() > sig.size() || overlap.rows() > lam.size())
        throw std::invalid_argument("overlap matrix larger than expanded spectra");
    for (std::size_t i = 0; i < overlap.cols() && terms.size() < limit; ++i) {
        if (sig[i] == 0.0) continue;
        KahanSum<> inner;
        for (std::size_t j = 0; j < overlap.rows(); ++j) {
            const double g = overlap(j, i);
            if (g == 0.0) continue;
            if (lam[j] == 0.0)
                throw std::invalid_argument("singular noise: lambda = 0 row with nonzero overlap");
            inner += g / (lambda_power == 1 ? lam[j] : lam[j] * lam[j]);
        }
        terms.push_back(sig[i] * sig[i] * inner.value());
    }
    return terms;
}

}  // namespace

FisherTraceResult fisher_trace(const ModalSpectrum& sigma, const ModalSpectrum& lambda,
                               const OverlapMatrix& overlap) {
    const auto terms = weighted_mode_terms(sigma, lambda, overlap, 1,
                                           std::numeric_limits<std::size_t>::max());
    FisherTraceResult out;
    KahanSum<> sum;
    out.partial_sums.reserve(terms.size());
    for (double t : terms) {
        sum += t;
        out.partial_sums.push_back(sum.value());
    }
    out.value = sum.value();
    out.tail = diagnose_increments(terms);
    return out;
}

RangeConditionReport range_condition_diagnostic(const ModalSpectrum& sigma,
                                                const ModalSpectrum& lambda,
                                                const OverlapMatrix& overlap,
                                                std::size_t truncation) {
    if (truncation > sigma.expanded_size())
        throw std::invalid_argument("range_condition_diagnostic: truncation beyond provided data");
    const auto terms = weighted_mode_terms(sigma, lambda, overlap, 2, truncation);
    RangeConditionReport out;
    out.increments = terms;
    KahanSum<> sum;
    out.partial_sums.reserve(terms.size());
    for (double t : terms) {
        sum += t;
        out.partial_sums.push_back(sum.value());
    }
    switch (diagnose_increments(terms)) {
        case SeriesDiagnosis::converged: out.classification = RangeCondition::satisfied_at_truncation; break;
        case SeriesDiagnosis::diverging: out.classification = RangeCondition::growing; break;
        default: out.classification = RangeCondition::undetermined; break;
    }
    return out;
}

ModalSpectrum constructed_noise_spectrum(const ModalSpectrum& sigma, double sigma_w2, int q) {
    if (q < 1) throw std::invalid_argument("constructed_noise_spectrum: q must be >= 1");
    if (!(sigma_w2 > 0.0)) throw std::invalid_argument("constructed_noise_spectrum: sigma_w2 must be > 0");
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : sigma.entries()) {
        if (e.value > prev)
            throw std::invalid_argument("constructed_noise_spectrum: sigma must be sorted descending");
        prev = e.value;
    }
    std::vector<SpectrumEntry> out;
    out.reserve(sigma.size());
    int i = 0;  // expanded position
    for (const auto& e : sigma.entries()) {
        // multiplicity blocks are split if the q boundary lands inside one
        int remaining = e.multiplicity;
        while (remaining > 0) {
            const bool white = i < q;
            int take = remaining;
            if (white && i + remaining > q) take = q - i;
            out.push_back({e.label, white ? sigma_w2 : std::sqrt(e.value), take, e.underflow});
            remaining -= take;
            i += take;
        }
    }
    return ModalSpectrum(std::move(out), sigma.ordering());
}

RegimeClass regime_classify(const ModalSpectrum& sigma, const ModalSpectrum& lambda) {
    require_paired(sigma, lambda);
    if (sigma.expanded_size() < kMinModes) return RegimeClass::undetermined;
    std::vector<double> fim_terms, crb_terms;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto& s = sigma.entries()[i];
        const auto& n = lambda.entries()[i];
        if (s.value == 0.0) continue;
        if (n.value == 0.0)
            throw std::invalid_argument("singular noise: lambda = 0 with sigma > 0 at " +
                                        s.label.str());
        for (int k = 0; k < s.multiplicity; ++k) {
            fim_terms.push_back(s.value * s.value / n.value);
            crb_terms.push_back(n.value / (s.value * s.value));
        }
    }
    const bool fim_conv = diagnose_increments(fim_terms) == SeriesDiagnosis::converged;
    const bool crb_conv = diagnose_increments(crb_terms) == SeriesDiagnosis::converged;
    if (fim_conv && !crb_conv) return RegimeClass::trace_class_fim;
    if (crb_conv && !fim_conv) return RegimeClass::trace_class_crb;
    return RegimeClass::both_finite_truncations_only;
}

const char* regime_name(RegimeClass r) {
    switch (r) {
        case RegimeClass::trace_class_fim: return "trace-class-FIM";
        case RegimeClass::trace_class_crb: return "trace-class-CRB";
        case RegimeClass::both_finite_truncations_only: return "both-finite-truncations-only";
        default: return "undetermined";
    }
}

std::vector<std::complex<double>> pseudo_inverse_estimate(
    const std::vector<std::complex<double>>& meas_coeffs, const ModalSpectrum& sigma,
    const ModalSpectrum& lambda, ScalarField field, std::size_t r) {
    require_paired(sigma, lambda);
    if (r == 0) return {};
    const std::vector<double> sig = sigma.expanded_values();
    if (r > sig.size())
        throw std::invalid_argument("pseudo_inverse_estimate: r exceeds available modes");
    if (meas_coeffs.size() < r)
        throw std::invalid_argument("pseudo_inverse_estimate: fewer coefficients than r");
    std::vector<std::complex<double>> out;
    out.reserve(r);
    for (std::size_t i = 0; i < r; ++i) {
        if (sig[i] == 0.0)
            throw std::invalid_argument("pseudo_inverse_estimate: zero singular value in range");
        if (field == ScalarField::real_field)
            out.emplace_back(meas_coeffs[i].real() / sig[i], 0.0);
        else
            out.push_back(meas_coeffs[i] / sig[i]);
    }
    return out;
}

}  // namespace crbound::fisher
