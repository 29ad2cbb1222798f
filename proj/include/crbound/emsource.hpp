#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "crbound/fisher.hpp"
#include "crbound/scaled_real.hpp"
#include "crbound/spectrum.hpp"

namespace crbound::emsource {

/// Electromagnetic inverse-source configuration: a current source inside
/// radius r0, tangential fields observed on the sphere of radius r1,
/// spherically isotropic noise of amplitude E0 plus an optional white
/// (uncorrelated) noise floor given directly as sigma_w2 or as a
/// white-noise ratio in dB relative to the largest isotropic eigenvalue.
struct SourceConfig {
    double k = 10.0;
    double r0 = 1.0;
    double r1 = 1.5;
    double E0 = 1.0;
    double eta0 = 1.0;
    fisher::ScalarField field = fisher::ScalarField::complex_field;
    double sigma_w2 = 0.0;
    std::optional<double> wnr_db;  // exclusive with a nonzero sigma_w2
    int lmax = 40;

    void validate() const;

    /// Resolved white-noise variance: sigma_w2, or WNR times the maximum
    /// isotropic eigenvalue when wnr_db is set.
    double resolved_sigma_w2() const;
};

struct EmMode {
    int tau = 1;  // 1 or 2
    int l = 1;
    int multiplicity() const { return 2 * l + 1; }
    ModeLabel label() const { return ModeLabel::multipole(tau, l); }
};

/// f_{tau l}(kr1): f_1 = h_l^(1)(kr1), f_2 = (kr1 h_l^(1)(kr1))'/(kr1).
std::complex<double> radial_factor_f(int tau, int l, double kr1);

/// g_{tau l}(kr1): as f with j_l in place of h_l^(1); real valued.
double radial_factor_g(int tau, int l, double kr1);

/// Volume norm sigma-bar^2_{tau l} of the regular wave over the source
/// ball, from the Lommel closed form and its tau = 2 recursion.
double mode_volume_norm(int tau, int l, const SourceConfig& config);
ScaledReal mode_volume_norm_scaled(int tau, int l, const SourceConfig& config);

/// Squared singular values sigma^2_{tau l} = k^4 eta0^2 r1^2 |f|^2 sbar^2,
/// multiplicity 2l+1, ordered by increasing l then tau.
ModalSpectrum jacobian_spectrum(const SourceConfig& config);

/// Noise covariance eigenvalues lambda_{tau l} = E0^2 r1^2 g^2 + sigma_w2,
/// same ordering and multiplicities.
ModalSpectrum noise_spectrum(const SourceConfig& config);

/// Isotropic part only (sigma_w2 = 0), used to resolve WNR.
ModalSpectrum noise_spectrum_isotropic(const SourceConfig& config);

/// CRB(L) = sum_tau sum_{l<=L} (2l+1) lambda_{tau l} / sigma^2_{tau l},
/// one point per multipole order L.
fisher::CrbCurve crb_L(const SourceConfig& config, int L);

struct FisherRatioEntry {
    int tau = 0;
    int l = 0;
    double ratio = 0.0;          // sigma^2 / lambda
    double log10_ratio = 0.0;    // exact in extended range
    double log10_increment = 0.0;
};

struct FisherRatioReport {
    std::vector<FisherRatioEntry> entries;
    fisher::RegimeClass regime = fisher::RegimeClass::undetermined;
};

/// Per-mode Fisher ratios sigma^2/lambda with their log-increments and the
/// regime classification of the same spectra.
FisherRatioReport fisher_ratio_diagnostic(const SourceConfig& config, int L);

/// Internal extended-range spectra (exact ratios even when the double
/// values underflow); entries ordered l asc, tau asc.
struct ScaledModeValue {
    EmMode mode;
    ScaledReal value;
};
std::vector<ScaledModeValue> jacobian_spectrum_scaled(const SourceConfig& config);
std::vector<ScaledModeValue> noise_spectrum_scaled(const SourceConfig& config);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace crbound::emsource
