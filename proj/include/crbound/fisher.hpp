#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "crbound/spectrum.hpp"

namespace crbound::fisher {

/// Real vs complex parameter space. The Fisher eigenvalue carries a
/// factor 2 in the real case and the estimator projects onto the real
/// part of the measurement coefficient.
enum class ScalarField { real_field, complex_field };

/// |<phi_j, u_i>|^2 between covariance eigenvectors (rows) and Jacobian
/// left-singular vectors (columns), over multiplicity-expanded indices.
/// The identity tag is the shared-eigenvector (diagonal) case.
class OverlapMatrix {
public:
    static OverlapMatrix identity() { return OverlapMatrix(); }

    OverlapMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    bool is_identity() const { return identity_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t j, std::size_t i) const { return values_[j * cols_ + i]; }

private:
    OverlapMatrix() : identity_(true) {}
    bool identity_ = false;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> values_;
};

struct FisherEntry {
    ModeLabel label;
    double mu = 0.0;  // Fisher eigenvalue, strictly positive
    int multiplicity = 1;
};

/// Eigenvalues of the Fisher information operator in the diagonal
/// (shared-eigenvector) case, mu_i = c sigma_i^2 / lambda_i with c = 2
/// for a real parameter space and 1 for a complex one.
struct FisherSpectrum {
    std::vector<FisherEntry> entries;
    ScalarField field = ScalarField::complex_field;
    SpectrumOrdering ordering = SpectrumOrdering::by_label;

    std::size_t expanded_size() const {
        std::size_t n = 0;
        for (const auto& e : entries) n += static_cast<std::size_t>(e.multiplicity);
        return n;
    }

    FisherSpectrum sorted_by_mu_desc() const;
};

enum class SeriesDiagnosis { converged, diverging, undetermined };

/// Ratio test on the last quartile of positive increments: geometric
/// mean ratio below 0.999 reads as geometric decay (converged), anything
/// else as a growing tail. Fewer than 8 increments is undetermined.
SeriesDiagnosis diagnose_increments(const std::vector<double>& increments);

struct CrbPoint {
    int truncation = 0;   // number of retained (expanded) modes
    double bound = 0.0;   // sum of 1/mu over the retained modes
};

struct CrbCurve {
    std::vector<CrbPoint> points;
    bool monotone = true;
    SeriesDiagnosis diagnosis = SeriesDiagnosis::undetermined;
};

/// sigma holds singular values sigma_i (not squared), lambda the noise
/// covariance eigenvalues; entries pair one-to-one by label. Zero
/// singular values are null-space modes and are dropped.
FisherSpectrum fisher_eigenvalues(const ModalSpectrum& sigma, const ModalSpectrum& lambda,
                                  ScalarField field);

/// Partial sums sum_{i<=r} 1/mu_i over the multiplicity-expanded
/// spectrum in its stored order, r = 1..r_max.
CrbCurve crb_curve(const FisherSpectrum& mu, std::size_t r_max);

struct FisherTraceResult {
    double value = 0.0;                 // partial trace over the provided truncation
    std::vector<double> partial_sums;   // per expanded Jacobian mode
    SeriesDiagnosis tail = SeriesDiagnosis::undetermined;
    bool diverging() const { return tail == SeriesDiagnosis::diverging; }
};

/// tr{J_mu^* J} partial sums: sum_i sigma_i^2 sum_j G_ji / lambda_j over
/// the provided truncation, with a tail-growth diagnosis.
FisherTraceResult fisher_trace(const ModalSpectrum& sigma, const ModalSpectrum& lambda,
                               const OverlapMatrix& overlap);

enum class RangeCondition { satisfied_at_truncation, growing, undetermined };

struct RangeConditionReport {
    std::vector<double> partial_sums;  // S_N = sum_i sigma_i^2 sum_j G_ji / lambda_j^2
    std::vector<double> increments;
    RangeCondition classification = RangeCondition::undetermined;
};

/// Hilbert-Schmidt-with-respect-to-Cameron-Martin sufficient condition,
/// evaluated on the truncation: S_N = sum sigma^2 sum G/lambda^2.
RangeConditionReport range_condition_diagnostic(const ModalSpectrum& sigma,
                                                const ModalSpectrum& lambda,
                                                const OverlapMatrix& overlap,
                                                std::size_t truncation);

/// lambda_i = sigma_w2 for i <= q, sqrt(sigma_i) for i > q. sigma must be
/// sorted descending.
ModalSpectrum constructed_noise_spectrum(const ModalSpectrum& sigma, double sigma_w2, int q);

enum class RegimeClass {
    trace_class_fim,               // sum sigma^2/lambda converges, CRB tail diverges
    trace_class_crb,               // sum lambda/sigma^2 converges, Fisher trace diverges
    both_finite_truncations_only,  // neither tail converges
    undetermined                   // insufficient modes (< 8)
};

/// Diagnoses the two dual series of the diagonal case on the provided
/// truncation. The two can never both converge on a true infinite tail.
RegimeClass regime_classify(const ModalSpectrum& sigma, const ModalSpectrum& lambda);

const char* regime_name(RegimeClass r);

/// Truncated pseudo-inverse in coefficient space: theta_hat_i = xi_i / sigma_i
/// for the first r expanded modes (real field takes the real part of xi).
std::vector<std::complex<double>> pseudo_inverse_estimate(
    const std::vector<std::complex<double>>& meas_coeffs, const ModalSpectrum& sigma,
    const ModalSpectrum& lambda, ScalarField field, std::size_t r);

}  // namespace crbound::fisher
