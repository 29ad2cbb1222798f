#include "crbound/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crbound/kahan.hpp"
#include "crbound/specfun.hpp"

namespace crbound::mcsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    // xoshiro256++ seeded via splitmix64 over (seed, stream)
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_word() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted away from 0
    const double u1 = (static_cast<double>(next_word() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::complex<double> Rng::complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

Direction Rng::isotropic_direction() {
    const double ct = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * kPi * uniform();
    return Direction(std::acos(std::clamp(ct, -1.0, 1.0)), phi);
}

std::size_t ModeSet::index(int tau, int l, int m) const {
    if (l < 1 || l > lmax || tau < 1 || tau > 2 || std::abs(m) > l)
        throw std::out_of_range("ModeSet::index: bad mode");
    // modes with l' < l occupy 2 * (l'(l'+2) - ... ) slots; closed form:
    const std::size_t before = static_cast<std::size_t>(2 * ((l - 1) * (l + 1)));
    return before + static_cast<std::size_t>((tau - 1) * (2 * l + 1) + (m + l));
}

std::vector<ModeSet::Entry> ModeSet::entries() const {
    std::vector<Entry> out;
    out.reserve(size());
    for (int l = 1; l <= lmax; ++l)
        for (int tau = 1; tau <= 2; ++tau)
            for (int m = -l; m <= l; ++m) out.push_back({tau, l, m});
    return out;
}

std::vector<std::complex<double>> project_plane_waves(
    const emsource::SourceConfig& config, int lmax, const std::vector<Direction>& directions,
    const std::vector<PlaneWaveAmplitude>& amplitudes) {
    config.validate();
    if (lmax < 1) throw std::invalid_argument("project_plane_waves: lmax must be >= 1");
    if (directions.size() != amplitudes.size())
        throw std::invalid_argument("project_plane_waves: directions/amplitudes size mismatch");

    const ModeSet modes{lmax};
    std::vector<std::complex<double>> acc(modes.size(), {0.0, 0.0});
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(lmax) + 1);

    for (std::size_t d = 0; d < directions.size(); ++d) {
        const Direction& kh = directions[d];
        const std::complex<double> a1 = amplitudes[d].a1;
        const std::complex<double> a2 = amplitudes[d].a2;
        const specfun::AngularTable tab(lmax, kh.cos_theta());
        const std::complex<double> e1(std::cos(kh.phi()), std::sin(kh.phi()));
        phase[0] = {1.0, 0.0};
        for (int m = 1; m <= lmax; ++m) phase[static_cast<std::size_t>(m)] = phase[static_cast<std::size_t>(m - 1)] * e1;

        for (int l = 1; l <= lmax; ++l) {
            const double invn = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
            const std::size_t base = modes.index(1, l, -l);
            const std::size_t span = static_cast<std::size_t>(2 * l + 1);
            for (int m = -l; m <= l; ++m) {
                const int am = std::abs(m);
                double piv = tab.pi(l, am);
                double tauv = tab.tau(l, am);
                if (m < 0) {
                    const double sgn = (am % 2 == 0) ? 1.0 : -1.0;
                    piv *= -sgn;
                    tauv *= sgn;
                }
                std::complex<double> ph = phase[static_cast<std::size_t>(am)];
                if (m < 0) ph = std::conj(ph);
                const double cs = (m % 2 == 0) ? 1.0 : -1.0;
                // conj(c) with c = cs * ph * invn
                const std::complex<double> cc = cs * invn * std::conj(ph);
                const std::complex<double> iu(0.0, 1.0);
                // A_1^* . (a1 e_theta + a2 e_phi) and A_2^* . (...)
                const std::complex<double> s1 = cc * (-iu * piv * a1 - tauv * a2);
                const std::complex<double> s2 = cc * (tauv * a1 - iu * piv * a2);
                acc[base + static_cast<std::size_t>(m + l)] += s1;
                acc[base + span + static_cast<std::size_t>(m + l)] += s2;
            }
        }
    }

    // surface projection: coefficient against the unit-normalized harmonic
    // A/r1 on the measurement sphere, variance target lambda = E0^2 r1^2 g^2
    const double kr1 = config.k * config.r1;
    std::vector<std::complex<double>> out(modes.size());
    for (int l = 1; l <= lmax; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            const double g = emsource::radial_factor_g(tau, l, kr1);
            const std::complex<double> ph = specfun::ipow(l - tau - 1);
            for (int m = -l; m <= l; ++m) {
                const std::size_t i = modes.index(tau, l, m);
                out[i] = config.r1 * g * ph * acc[i];
            }
        }
    }
    return out;
}

std::vector<std::complex<double>> sample_isotropic_coeffs(const emsource::SourceConfig& config,
                                                          int lmax, int n_directions, Rng& rng) {
    if (n_directions < 1)
        throw std::invalid_argument("sample_isotropic_coeffs: need at least one direction");
    const double amp_var = config.E0 * config.E0 * 4.0 * kPi / n_directions;
    std::vector<Direction> dirs;
    std::vector<PlaneWaveAmplitude> amps;
    dirs.reserve(static_cast<std::size_t>(n_directions));
    amps.reserve(static_cast<std::size_t>(n_directions));
    for (int d = 0; d < n_directions; ++d) {
        dirs.push_back(rng.isotropic_direction());
        amps.push_back({rng.complex_normal(amp_var), rng.complex_normal(amp_var)});
    }
    return project_plane_waves(config, lmax, dirs, amps);
}

namespace {

std::vector<double> lambda_targets(const emsource::SourceConfig& config, int lmax) {
    emsource::SourceConfig iso = config;
    iso.lmax = lmax;
    const ModeSet modes{lmax};
    std::vector<double> t(modes.size(), 0.0);
    for (const auto& mv : emsource::noise_spectrum_scaled(iso)) {
        const double v = mv.value.value();
        for (int m = -mv.mode.l; m <= mv.mode.l; ++m)
            t[modes.index(mv.mode.tau, mv.mode.l, m)] = v;
    }
    return t;
}

}  // namespace

TrialReport empirical_covariance(const std::vector<std::vector<std::complex<double>>>& realizations,
                                 const emsource::SourceConfig& config, int lmax) {
    if (realizations.size() < 100)
        throw std::invalid_argument("empirical_covariance: need at least 100 realizations");
    const ModeSet modes{lmax};
    const std::size_t n_modes = modes.size();
    for (const auto& r : realizations)
        if (r.size() != n_modes)
            throw std::invalid_argument("empirical_covariance: realization size mismatch");

    const auto targets = lambda_targets(config, lmax);
    const double n = static_cast<double>(realizations.size());
    TrialReport report;
    report.trials = static_cast<int>(realizations.size());
    report.per_mode.reserve(n_modes);
    const auto entry_list = modes.entries();
    for (std::size_t i = 0; i < n_modes; ++i) {
        KahanComplex mean;
        for (const auto& r : realizations) mean += r[i];
        const std::complex<double> mu = mean.value() / n;
        KahanSum<> var;
        for (const auto& r : realizations) var += std::norm(r[i] - mu);
        ModeStat s;
        s.mode = entry_list[i];
        s.emp_mean = mu;
        s.emp_var = var.value() / (n - 1.0);
        s.target = targets[i];
        s.std_error = s.target / std::sqrt(n);
        s.z_score = s.std_error > 0.0 ? (s.emp_var - s.target) / s.std_error : 0.0;
        report.per_mode.push_back(s);
    }
    return report;
}

std::vector<CrossStat> cross_covariance(
    const std::vector<std::vector<std::complex<double>>>& realizations,
    const emsource::SourceConfig& config, int lmax,
    const std::vector<std::pair<ModeSet::Entry, ModeSet::Entry>>& pairs) {
    if (realizations.size() < 100)
        throw std::invalid_argument("cross_covariance: need at least 100 realizations");
    const ModeSet modes{lmax};
    const auto targets = lambda_targets(config, lmax);
    const double n = static_cast<double>(realizations.size());
    std::vector<CrossStat> out;
    out.reserve(pairs.size());
    for (const auto& [ma, mb] : pairs) {
        const std::size_t ia = modes.index(ma.tau, ma.l, ma.m);
        const std::size_t ib = modes.index(mb.tau, mb.l, mb.m);
        KahanComplex mean_a, mean_b;
        for (const auto& r : realizations) {
            mean_a += r[ia];
            mean_b += r[ib];
        }
        const std::complex<double> mua = mean_a.value() / n;
        const std::complex<double> mub = mean_b.value() / n;
        KahanComplex cov, pcov;
        for (const auto& r : realizations) {
            cov += (r[ia] - mua) * std::conj(r[ib] - mub);
            pcov += (r[ia] - mua) * (r[ib] - mub);
        }
        CrossStat s;
        s.a = ma;
        s.b = mb;
        s.covariance = cov.value() / (n - 1.0);
        s.pseudo_covariance = pcov.value() / (n - 1.0);
        s.std_error = std::sqrt(targets[ia] * targets[ib] / n);
        out.push_back(s);
    }
    return out;
}

TrialReport simulate_linear_estimation(const emsource::SourceConfig& config,
                                       const std::vector<std::complex<double>>& true_coeffs,
                                       std::size_t r, int trials, Rng& rng) {
    config.validate();
    if (trials < 100) throw std::invalid_argument("simulate_linear_estimation: trials must be >= 100");
    const bool real_field = config.field == fisher::ScalarField::real_field;

    // expanded (l asc, tau asc, m asc) modal sigma and lambda
    const auto sig2 = emsource::jacobian_spectrum_scaled(config);
    const auto lam = emsource::noise_spectrum_scaled(config);
    const double white = config.resolved_sigma_w2();
    std::vector<double> sigma_exp, lambda_exp;
    std::vector<ModeSet::Entry> mode_exp;
    for (std::size_t i = 0; i < sig2.size(); ++i) {
        const auto& mode = sig2[i].mode;
        const double sv = std::sqrt(sig2[i].value.value());
        const double lv = lam[i].value.value() + white;
        for (int m = -mode.l; m <= mode.l; ++m) {
            sigma_exp.push_back(sv);
            lambda_exp.push_back(lv);
            mode_exp.push_back({mode.tau, mode.l, m});
        }
    }
    if (r > sigma_exp.size())
        throw std::invalid_argument("simulate_linear_estimation: r exceeds available modes");
    if (true_coeffs.size() < r)
        throw std::invalid_argument("simulate_linear_estimation: fewer true coefficients than r");
    for (std::size_t i = 0; i < r; ++i)
        if (sigma_exp[i] == 0.0)
            throw std::invalid_argument("simulate_linear_estimation: zero singular value in range");

    std::vector<std::vector<std::complex<double>>> estimates(r);
    for (auto& v : estimates) v.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < r; ++i) {
            const std::complex<double> w = rng.complex_normal(lambda_exp[i]);
            const std::complex<double> xi = sigma_exp[i] * true_coeffs[i] + w;
            std::complex<double> est = xi / sigma_exp[i];
            if (real_field) est = {est.real(), 0.0};
            estimates[i].push_back(est);
        }
    }

    TrialReport report;
    report.trials = trials;
    report.per_mode.reserve(r);
    const double n = static_cast<double>(trials);
    for (std::size_t i = 0; i < r; ++i) {
        const std::complex<double> truth =
            real_field ? std::complex<double>(true_coeffs[i].real(), 0.0) : true_coeffs[i];
        KahanComplex mean;
        for (const auto& e : estimates[i]) mean += e;
        const std::complex<double> mu = mean.value() / n;
        KahanSum<> var;
        for (const auto& e : estimates[i]) var += std::norm(e - mu);
        ModeStat s;
        s.mode = mode_exp[i];
        s.emp_mean = mu - truth;  // bias
        s.emp_var = var.value() / (n - 1.0);
        const double mu_fisher = (real_field ? 2.0 : 1.0) * sigma_exp[i] * sigma_exp[i] / lambda_exp[i];
        s.target = 1.0 / mu_fisher;
        s.std_error = real_field ? s.target * std::sqrt(2.0 / n) : s.target / std::sqrt(n);
        s.z_score = s.std_error > 0.0 ? (s.emp_var - s.target) / s.std_error : 0.0;
        report.per_mode.push_back(s);
    }
    return report;
}

namespace {

struct RadialFactors {
    double j = 0.0;       // j_l(x)
    double ric = 0.0;     // (x j_l)'/x
    double jox = 0.0;     // j_l(x)/x
};

RadialFactors radial_at(int l, double x) {
    RadialFactors f;
    if (x == 0.0) {
        if (l == 1) {
            f.ric = 2.0 / 3.0;
            f.jox = 1.0 / 3.0;
        }
        return f;
    }
    f.j = specfun::sph_bessel_j(l, x);
    f.ric = specfun::riccati_factor_regular_scaled(l, x).value();
    f.jox = f.j / x;
    return f;
}

ComplexVec3 wave_from_parts(int tau, int l, int m, const Direction& dir,
                            const specfun::AngularTable& tab, const RadialFactors& rad) {
    if (tau == 1) {
        return rad.j * specfun::vector_harmonic(1, l, m, dir, tab);
    }
    const double nl = std::sqrt(static_cast<double>(l) * (l + 1));
    const ComplexVec3 a2 = specfun::vector_harmonic(2, l, m, dir, tab);
    const ComplexVec3 a3 = specfun::vector_harmonic(3, l, m, dir, tab);
    return rad.ric * a2 + (nl * rad.jox) * a3;
}

}  // namespace

ComplexVec3 regular_wave_cartesian(int tau, int l, int m, double k, const Vec3& r) {
    if (tau < 1 || tau > 2) throw std::domain_error("regular_wave_cartesian: tau must be 1 or 2");
    const double rr = r.norm();
    const Direction dir = rr == 0.0 ? Direction(0.0, 0.0) : Direction::from_vec(r);
    const specfun::AngularTable tab(l, dir.cos_theta());
    const RadialFactors rad = radial_at(l, k * rr);
    return wave_from_parts(tau, l, m, dir, tab, rad).to_cartesian(dir);
}

double green_identity_check(const emsource::SourceConfig& config, int lmax,
                            const std::vector<std::pair<Vec3, Vec3>>& point_pairs) {
    config.validate();
    if (lmax < 1) throw std::invalid_argument("green_identity_check: lmax must be >= 1");
    const double k = config.k;
    const double e0sq = config.E0 * config.E0;
    double worst = 0.0;
    for (const auto& [ra, rb] : point_pairs) {
        const double rmax = std::max(ra.norm(), rb.norm());
        if (2.718281828459045 * k * rmax / 2.0 >= static_cast<double>(lmax))
            throw std::invalid_argument(
                "green_identity_check: lmax too small for requested radii (need lmax > e*k*r/2)");
        const Direction da = ra.norm() == 0.0 ? Direction(0.0, 0.0) : Direction::from_vec(ra);
        const Direction db = rb.norm() == 0.0 ? Direction(0.0, 0.0) : Direction::from_vec(rb);
        const specfun::AngularTable tab_a(lmax, da.cos_theta());
        const specfun::AngularTable tab_b(lmax, db.cos_theta());
        Dyadic3 sum;
        for (int l = 1; l <= lmax; ++l) {
            const RadialFactors rad_a = radial_at(l, k * ra.norm());
            const RadialFactors rad_b = radial_at(l, k * rb.norm());
            for (int tau = 1; tau <= 2; ++tau) {
                for (int m = -l; m <= l; ++m) {
                    const ComplexVec3 va =
                        wave_from_parts(tau, l, m, da, tab_a, rad_a).to_cartesian(da);
                    const ComplexVec3 vb =
                        wave_from_parts(tau, l, m, db, tab_b, rad_b).to_cartesian(db);
                    sum += Dyadic3::outer_conj(va, vb);
                }
            }
        }
        const Dyadic3 closed = specfun::green_imag_closed(k, ra, rb);
        double fro = 0.0;
        for (const auto& e : closed.m) fro += std::norm(e);
        fro = std::sqrt(fro);
        const Dyadic3 diff = (e0sq * sum) - (e0sq * closed);
        const double err = diff.max_abs() / (e0sq * fro);
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace crbound::mcsim
