#include "crbound/emsource.hpp"

#include <cmath>
#include <stdexcept>

#include "crbound/kahan.hpp"
#include "crbound/specfun.hpp"

namespace crbound::emsource {

using specfun::RiccatiKind;

void SourceConfig::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("SourceConfig: k must be > 0");
    if (!(r0 > 0.0 && r0 < r1)) throw std::invalid_argument("SourceConfig: need 0 < r0 < r1");
    if (!(E0 > 0.0)) throw std::invalid_argument("SourceConfig: E0 must be > 0");
    if (!(eta0 > 0.0)) throw std::invalid_argument("SourceConfig: eta0 must be > 0");
    if (lmax < 1) throw std::invalid_argument("SourceConfig: lmax must be >= 1");
    if (sigma_w2 < 0.0) throw std::invalid_argument("SourceConfig: sigma_w2 must be >= 0");
    if (wnr_db.has_value() && sigma_w2 != 0.0)
        throw std::invalid_argument("SourceConfig: sigma_w2 and wnr_db are mutually exclusive");
}

double SourceConfig::resolved_sigma_w2() const {
    if (!wnr_db.has_value()) return sigma_w2;
    const double wnr = std::pow(10.0, *wnr_db / 10.0);
    double max_lambda = 0.0;
    for (const auto& mv : noise_spectrum_scaled(*this)) {
        const double v = mv.value.value();
        if (v > max_lambda) max_lambda = v;
    }
    return wnr * max_lambda;
}

std::complex<double> radial_factor_f(int tau, int l, double kr1) {
    if (tau == 1) return specfun::sph_hankel1(l, kr1);
    if (tau == 2) return specfun::riccati_factor(RiccatiKind::outgoing, l, kr1);
    throw std::domain_error("radial_factor_f: tau must be 1 or 2");
}

double radial_factor_g(int tau, int l, double kr1) {
    if (tau == 1) return specfun::sph_bessel_j(l, kr1);
    if (tau == 2) return specfun::riccati_factor_regular_scaled(l, kr1).value();
    throw std::domain_error("radial_factor_g: tau must be 1 or 2");
}

namespace {

// sbar^2_{1l} = (r0^3/2) (j_l^2 - j_{l-1} j_{l+1}) at kr0; valid down to
// l = 0 via j_{-1} = cos(x)/x, which seeds the tau = 2 recursion.
ScaledReal lommel_norm_1(int l, double k, double r0) {
    const double x = k * r0;
    const ScaledReal jl = specfun::sph_bessel_j_scaled(l, x);
    const ScaledReal jm = specfun::sph_bessel_j_scaled(l - 1, x);
    const ScaledReal jp = specfun::sph_bessel_j_scaled(l + 1, x);
    return (r0 * r0 * r0 / 2.0) * (jl * jl - jm * jp);
}

}  // namespace

ScaledReal mode_volume_norm_scaled(int tau, int l, const SourceConfig& config) {
    config.validate();
    if (l < 1) throw std::domain_error("mode_volume_norm: l must be >= 1");
    if (tau == 1) return lommel_norm_1(l, config.k, config.r0);
    if (tau == 2) {
        const ScaledReal below = lommel_norm_1(l - 1, config.k, config.r0);
        const ScaledReal above = lommel_norm_1(l + 1, config.k, config.r0);
        return (static_cast<double>(l + 1) * below + static_cast<double>(l) * above) /
               (2.0 * l + 1.0);
    }
    throw std::domain_error("mode_volume_norm: tau must be 1 or 2");
}

double mode_volume_norm(int tau, int l, const SourceConfig& config) {
    return mode_volume_norm_scaled(tau, l, config).value();
}

std::vector<ScaledModeValue> jacobian_spectrum_scaled(const SourceConfig& config) {
    config.validate();
    const double kr1 = config.k * config.r1;
    const double amp = std::pow(config.k, 4) * config.eta0 * config.eta0 * config.r1 * config.r1;
    std::vector<ScaledModeValue> out;
    out.reserve(static_cast<std::size_t>(2 * config.lmax));
    for (int l = 1; l <= config.lmax; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            ScaledReal f2;  // |f_{tau l}|^2
            if (tau == 1) {
                const specfun::ScaledComplex h = specfun::sph_hankel1_scaled(l, kr1);
                f2 = h.re * h.re + h.im * h.im;
            } else {
                const specfun::ScaledComplex f = specfun::riccati_factor_outgoing_scaled(l, kr1);
                f2 = f.re * f.re + f.im * f.im;
            }
            const ScaledReal sbar2 = mode_volume_norm_scaled(tau, l, config);
            out.push_back({EmMode{tau, l}, amp * f2 * sbar2});
        }
    }
    return out;
}

std::vector<ScaledModeValue> noise_spectrum_scaled(const SourceConfig& config) {
    config.validate();
    const double kr1 = config.k * config.r1;
    const double amp = config.E0 * config.E0 * config.r1 * config.r1;
    std::vector<ScaledModeValue> out;
    out.reserve(static_cast<std::size_t>(2 * config.lmax));
    for (int l = 1; l <= config.lmax; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            const ScaledReal g = tau == 1 ? specfun::sph_bessel_j_scaled(l, kr1)
                                          : specfun::riccati_factor_regular_scaled(l, kr1);
            out.push_back({EmMode{tau, l}, amp * (g * g)});
        }
    }
    return out;
}

namespace {

ModalSpectrum to_spectrum(const std::vector<ScaledModeValue>& scaled, double add = 0.0) {
    std::vector<SpectrumEntry> es;
    es.reserve(scaled.size());
    for (const auto& mv : scaled) {
        SpectrumEntry e;
        e.label = mv.mode.label();
        e.multiplicity = mv.mode.multiplicity();
        const ScaledReal total = add == 0.0 ? mv.value : mv.value + ScaledReal::from(add);
        e.underflow = total.underflows_double();
        e.value = e.underflow ? 0.0 : total.value();
        es.push_back(e);
    }
    return ModalSpectrum(std::move(es), SpectrumOrdering::by_label);
}

}  // namespace

ModalSpectrum jacobian_spectrum(const SourceConfig& config) {
    return to_spectrum(jacobian_spectrum_scaled(config));
}

ModalSpectrum noise_spectrum_isotropic(const SourceConfig& config) {
    return to_spectrum(noise_spectrum_scaled(config));
}

ModalSpectrum noise_spectrum(const SourceConfig& config) {
    return to_spectrum(noise_spectrum_scaled(config), config.resolved_sigma_w2());
}

fisher::CrbCurve crb_L(const SourceConfig& config, int L) {
    config.validate();
    if (L < 1 || L > config.lmax) throw std::invalid_argument("crb_L: need 1 <= L <= lmax");
    const auto sig = jacobian_spectrum_scaled(config);
    const auto lam = noise_spectrum_scaled(config);
    const ScaledReal white = ScaledReal::from(config.resolved_sigma_w2());
    fisher::CrbCurve out;
    out.points.reserve(static_cast<std::size_t>(L));
    KahanSum<> sum;
    std::vector<double> increments;
    double prev = 0.0;
    for (int l = 1; l <= L; ++l) {
        KahanSum<> block;
        for (int tau = 1; tau <= 2; ++tau) {
            const std::size_t idx = static_cast<std::size_t>(2 * (l - 1) + (tau - 1));
            const ScaledReal ratio = (lam[idx].value + white) / sig[idx].value;
            block += (2.0 * l + 1.0) * ratio.value();
        }
        sum += block.value();
        increments.push_back(block.value());
        out.points.push_back({l, sum.value()});
        if (sum.value() <= prev) out.monotone = false;
        prev = sum.value();
    }
    out.diagnosis = fisher::diagnose_increments(increments);
    return out;
}

FisherRatioReport fisher_ratio_diagnostic(const SourceConfig& config, int L) {
    config.validate();
    if (L < 1 || L > config.lmax)
        throw std::invalid_argument("fisher_ratio_diagnostic: need 1 <= L <= lmax");
    const auto sig = jacobian_spectrum_scaled(config);
    const auto lam = noise_spectrum_scaled(config);
    const ScaledReal white = ScaledReal::from(config.resolved_sigma_w2());
    FisherRatioReport out;
    out.entries.reserve(static_cast<std::size_t>(2 * L));
    double prev_log10 = 0.0;
    bool have_prev = false;
    for (int l = 1; l <= L; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            const std::size_t idx = static_cast<std::size_t>(2 * (l - 1) + (tau - 1));
            const ScaledReal ratio = sig[idx].value / (lam[idx].value + white);
            FisherRatioEntry e;
            e.tau = tau;
            e.l = l;
            e.ratio = ratio.value();
            e.log10_ratio = ratio.log10_abs();
            e.log10_increment = have_prev ? e.log10_ratio - prev_log10 : 0.0;
            prev_log10 = e.log10_ratio;
            have_prev = true;
            out.entries.push_back(e);
        }
    }
    // classification on the same spectra, via the generic machinery
    SourceConfig cut = config;
    cut.lmax = L;
    std::vector<SpectrumEntry> ss;
    const auto sig2 = jacobian_spectrum(cut);
    for (const auto& e : sig2.entries())
        ss.push_back({e.label, std::sqrt(e.value), e.multiplicity, e.underflow});
    out.regime = fisher::regime_classify(ModalSpectrum(std::move(ss), SpectrumOrdering::by_label),
                                         noise_spectrum(cut));
    return out;
}

}  // namespace crbound::emsource
