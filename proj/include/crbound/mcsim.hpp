#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "crbound/emsource.hpp"
#include "crbound/geometry.hpp"
#include "crbound/spectrum.hpp"

namespace crbound::mcsim {

/// Deterministic splittable stream: identical (seed, stream) gives
/// identical draws on every platform. Uniform and Gaussian variates are
/// generated with explicit transforms (53-bit uniforms, Box-Muller), not
/// the standard-library distributions, which are implementation-defined.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    double uniform();                       // [0, 1)
    double normal();                        // standard normal
    std::complex<double> complex_normal(double variance);  // circular, E|z|^2 = variance
    Direction isotropic_direction();

private:
    std::uint64_t next_word();
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    Rng make() const { return Rng(seed, stream); }
};

/// Flat index over (l, tau, m) with l = 1..lmax, tau = 1..2, m = -l..l,
/// ordered l asc, tau asc, m asc; matches the spectrum order with the
/// (2l+1)-fold multiplicity unrolled.
struct ModeSet {
    int lmax = 1;
    std::size_t size() const { return static_cast<std::size_t>(2 * lmax * (lmax + 2)); }
    std::size_t index(int tau, int l, int m) const;
    struct Entry {
        int tau, l, m;
    };
    std::vector<Entry> entries() const;
};

struct ModeStat {
    ModeSet::Entry mode{1, 1, 0};
    int generic_index = -1;  // >= 0 when the mode is a generic ordinal
    std::complex<double> emp_mean;
    double emp_var = 0.0;
    double std_error = 0.0;  // of the variance estimate: target / sqrt(trials)
    double target = 0.0;
    double z_score = 0.0;    // (emp_var - target) / std_error
};

struct TrialReport {
    std::vector<ModeStat> per_mode;
    int trials = 0;
};

/// Per-direction tangential amplitude (theta-hat, phi-hat components).
struct PlaneWaveAmplitude {
    std::complex<double> a1, a2;
};

/// Modal projection of a superposition of tangential plane waves:
/// accumulates i^{l-tau-1} conj(A_tau l m(khat)) . E0(khat) over the
/// given directions and scales by r1 g_tau l, so the coefficient sits in
/// the orthonormal measurement basis where its variance targets
/// lambda_{tau l}.
std::vector<std::complex<double>> project_plane_waves(
    const emsource::SourceConfig& config, int lmax, const std::vector<Direction>& directions,
    const std::vector<PlaneWaveAmplitude>& amplitudes);

/// One realization of the spherically isotropic noise projected on the
/// measurement sphere: K directions drawn uniformly, per-direction
/// tangential amplitudes alpha_1, alpha_2 ~ CN(0, E0^2 4pi/K), modal
/// coefficients accumulated against the conjugated vector harmonics and
/// scaled so that Var equals the covariance eigenvalue lambda_{tau l}.
std::vector<std::complex<double>> sample_isotropic_coeffs(const emsource::SourceConfig& config,
                                                          int lmax, int n_directions, Rng& rng);

/// Per-mode sample mean (target 0) and variance (target lambda) over
/// realizations; needs at least 100 of them.
TrialReport empirical_covariance(const std::vector<std::vector<std::complex<double>>>& realizations,
                                 const emsource::SourceConfig& config, int lmax);

struct CrossStat {
    ModeSet::Entry a, b;
    std::complex<double> covariance;       // target 0
    std::complex<double> pseudo_covariance;  // E{N N} without conjugation, target 0
    double std_error = 0.0;
};

/// Cross-mode and pseudo-covariance checks for a sampled pair list.
std::vector<CrossStat> cross_covariance(
    const std::vector<std::vector<std::complex<double>>>& realizations,
    const emsource::SourceConfig& config, int lmax,
    const std::vector<std::pair<ModeSet::Entry, ModeSet::Entry>>& pairs);

/// Linearized estimation trials: per trial xi_i = sigma_i theta_i + w_i
/// with w_i ~ CN(0, lambda_i), estimator theta_hat_i = xi_i / sigma_i
/// (real part first when the parameter space is real). Bias target 0,
/// variance target 1/mu_i.
TrialReport simulate_linear_estimation(const emsource::SourceConfig& config,
                                       const std::vector<std::complex<double>>& true_coeffs,
                                       std::size_t r, int trials, Rng& rng);

/// Regular vector spherical wave v_{tau l m}(k r) in Cartesian
/// components, built from the radial factors and vector harmonics;
/// finite at the origin where only l = 1, tau = 2 modes survive.
ComplexVec3 regular_wave_cartesian(int tau, int l, int m, double k, const Vec3& r);

/// Truncated mode sum sum v(kr) conj(v(kr')) against the closed sinc
/// dyadic, max Frobenius-relative entrywise error over the pairs.
double green_identity_check(const emsource::SourceConfig& config, int lmax,
                            const std::vector<std::pair<Vec3, Vec3>>& point_pairs);

}  // namespace crbound::mcsim
