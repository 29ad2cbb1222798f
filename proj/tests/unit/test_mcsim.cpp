#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "crbound/emsource.hpp"
#include "crbound/mcsim.hpp"
#include "crbound/specfun.hpp"
#include "support/oracles.hpp"

using namespace crbound;
using namespace crbound::mcsim;

namespace {

emsource::SourceConfig fig2_config() { return emsource::SourceConfig{}; }

std::vector<std::vector<std::complex<double>>> make_realizations(
    const emsource::SourceConfig& cfg, int lmax, int n_dirs, int count, std::uint64_t seed) {
    std::vector<std::vector<std::complex<double>>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        Rng rng(seed, static_cast<std::uint64_t>(t) + 1);
        out.push_back(sample_isotropic_coeffs(cfg, lmax, n_dirs, rng));
    }
    return out;
}

}  // namespace

TEST_CASE("Rng determinism and stream independence") {
    Rng a(123, 7), b(123, 7), c(123, 8);
    for (int i = 0; i < 64; ++i) {
        const double ua = a.uniform();
        CHECK(ua == b.uniform());
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
    }
    bool any_diff = false;
    for (int i = 0; i < 16; ++i) any_diff = any_diff || (a.uniform() != c.uniform());
    CHECK(any_diff);
    // normal moments sane on a fixed seed
    Rng g(5, 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.03);
    CHECK(std::fabs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("complex_normal convention: E|z|^2 = variance, E z^2 = 0") {
    Rng g(11, 3);
    const double var = 2.5;
    std::complex<double> pseudo = 0.0;
    double power = 0.0, re2 = 0.0, im2 = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto z = g.complex_normal(var);
        power += std::norm(z);
        pseudo += z * z;
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
    }
    CHECK(power / n == doctest::Approx(var).epsilon(0.03));
    CHECK(std::abs(pseudo) / n < 3.0 * var / std::sqrt(static_cast<double>(n)));
    // real and imaginary parts carry half the variance each
    CHECK(re2 / n == doctest::Approx(var / 2).epsilon(0.05));
    CHECK(im2 / n == doctest::Approx(var / 2).epsilon(0.05));
}

TEST_CASE("ModeSet indexing round-trips") {
    const ModeSet m{6};
    const auto entries = m.entries();
    REQUIRE(entries.size() == m.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        CHECK(m.index(entries[i].tau, entries[i].l, entries[i].m) == i);
    CHECK_THROWS_AS(m.index(1, 7, 0), std::out_of_range);
    CHECK_THROWS_AS(m.index(3, 1, 0), std::out_of_range);
}

TEST_CASE("project_plane_waves: single pole direction excites only |m| = 1") {
    const auto cfg = fig2_config();
    const std::vector<Direction> dirs = {Direction(0.0, 0.0)};
    const std::vector<PlaneWaveAmplitude> amps = {{{1.0, 0.0}, {0.0, 0.0}}};  // unit e_theta
    const auto coeffs = project_plane_waves(cfg, 4, dirs, amps);
    const ModeSet modes{4};
    for (const auto& e : modes.entries()) {
        const auto c = coeffs[modes.index(e.tau, e.l, e.m)];
        if (std::abs(e.m) == 1)
            CHECK(std::abs(c) > 1e-6);
        else
            CHECK(std::abs(c) < 1e-13);
    }
}

TEST_CASE("sample_isotropic_coeffs scales linearly in E0") {
    auto cfg = fig2_config();
    Rng r1(99, 1), r2(99, 1);
    const auto base = sample_isotropic_coeffs(cfg, 3, 50, r1);
    cfg.E0 = 1e-6;
    const auto tiny = sample_isotropic_coeffs(cfg, 3, 50, r2);
    REQUIRE(base.size() == tiny.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(tiny[i] - 1e-6 * base[i]) <= 1e-18 * std::abs(base[i]));
}

TEST_CASE("empirical_covariance hits the lambda targets") {
    const auto cfg = fig2_config();
    const int lmax = 2, n_dirs = 3000, n_real = 400;
    const auto reals = make_realizations(cfg, lmax, n_dirs, n_real, 2024);
    const auto report = empirical_covariance(reals, cfg, lmax);
    REQUIRE(report.per_mode.size() == ModeSet{lmax}.size());
    for (const auto& s : report.per_mode) {
        // mean within 3 standard errors of zero
        const double se_mean = std::sqrt(s.target / n_real);
        CHECK(std::abs(s.emp_mean) < 3.0 * se_mean);
        CHECK(s.target > 0.0);
    }
    // m-pooled variance ratio per (tau, l), sampling error ~ 1/sqrt(n (2l+1))
    for (int l = 1; l <= lmax; ++l) {
        for (int tau = 1; tau <= 2; ++tau) {
            double pooled = 0.0, target = 0.0;
            int count = 0;
            for (const auto& s : report.per_mode)
                if (s.mode.tau == tau && s.mode.l == l) {
                    pooled += s.emp_var;
                    target = s.target;
                    ++count;
                }
            const double ratio = pooled / (count * target);
            const double se = 1.0 / std::sqrt(static_cast<double>(n_real * count));
            CHECK_MESSAGE(std::fabs(ratio - 1.0) < 4.0 * se, "tau=", tau, " l=", l,
                          " ratio=", ratio);
        }
    }
    CHECK_THROWS_AS(empirical_covariance({}, cfg, lmax), std::invalid_argument);
}

TEST_CASE("cross-mode and pseudo covariance vanish") {
    const auto cfg = fig2_config();
    const int lmax = 3, n_dirs = 2000, n_real = 300;
    const auto reals = make_realizations(cfg, lmax, n_dirs, n_real, 77);
    const std::vector<std::pair<ModeSet::Entry, ModeSet::Entry>> pairs = {
        {{1, 1, 0}, {2, 3, 1}}, {{1, 2, 1}, {1, 2, -1}}, {{2, 1, 0}, {2, 2, 0}},
        {{1, 1, 1}, {1, 1, 1}},  // self pair: pseudo-covariance E{NN}
    };
    const auto stats = cross_covariance(reals, cfg, lmax, pairs);
    REQUIRE(stats.size() == pairs.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const bool self = pairs[i].first.tau == pairs[i].second.tau &&
                          pairs[i].first.l == pairs[i].second.l &&
                          pairs[i].first.m == pairs[i].second.m;
        if (!self) CHECK(std::abs(stats[i].covariance) < 3.0 * stats[i].std_error);
        CHECK(std::abs(stats[i].pseudo_covariance) < 3.0 * stats[i].std_error);
    }
}

TEST_CASE("whitened coefficients have unit covariance") {
    const auto cfg = fig2_config();
    const int lmax = 2, n_dirs = 2000, n_real = 400;
    auto reals = make_realizations(cfg, lmax, n_dirs, n_real, 4242);
    const ModeSet modes{lmax};
    // whiten by 1 / sqrt(lambda)
    std::vector<double> lam(modes.size(), 0.0);
    {
        const auto iso = emsource::noise_spectrum_isotropic(cfg);
        for (const auto& e : iso.entries())
            if (*e.label.l <= lmax)
                for (int m = -*e.label.l; m <= *e.label.l; ++m)
                    lam[modes.index(*e.label.tau, *e.label.l, m)] = e.value;
    }
    for (auto& r : reals)
        for (std::size_t i = 0; i < r.size(); ++i) r[i] /= std::sqrt(lam[i]);
    // empirical second moment per mode should be 1 within sampling error
    for (std::size_t i = 0; i < modes.size(); ++i) {
        double power = 0.0;
        for (const auto& r : reals) power += std::norm(r[i]);
        const double second = power / n_real;
        CHECK(std::fabs(second - 1.0) < 4.0 / std::sqrt(static_cast<double>(n_real)));
    }
}

TEST_CASE("isotropy: rotated direction ensembles are statistically identical") {
    // 50 repetitions per arm; arm B applies a fixed rotation to every
    // drawn direction (independent draws); KS on the per-(tau,l) variance
    const auto cfg = fig2_config();
    const int lmax = 1, n_dirs = 400, reps = 50, n_real = 24;
    const ModeSet modes{lmax};
    auto variance_sample = [&](std::uint64_t seed, bool rotate) {
        std::vector<double> out;
        for (int rep = 0; rep < reps; ++rep) {
            double acc = 0.0;
            int cnt = 0;
            for (int t = 0; t < n_real; ++t) {
                Rng rng(seed, static_cast<std::uint64_t>(rep * 1000 + t));
                std::vector<Direction> dirs;
                std::vector<PlaneWaveAmplitude> amps;
                const double var = cfg.E0 * cfg.E0 * 4.0 * kPi / n_dirs;
                for (int d = 0; d < n_dirs; ++d) {
                    Direction dir = rng.isotropic_direction();
                    if (rotate) dir = Direction(dir.theta() + 1.1, dir.phi() + 2.3);
                    dirs.push_back(dir);
                    amps.push_back({rng.complex_normal(var), rng.complex_normal(var)});
                }
                const auto coeffs = project_plane_waves(cfg, lmax, dirs, amps);
                for (int m = -1; m <= 1; ++m) {
                    acc += std::norm(coeffs[modes.index(1, 1, m)]);
                    ++cnt;
                }
            }
            out.push_back(acc / cnt);
        }
        return out;
    };
    const auto arm_a = variance_sample(31, false);
    const auto arm_b = variance_sample(97, true);
    const double p = oracles::ks_two_sample_pvalue(arm_a, arm_b);
    CHECK(p > 0.01);
}

TEST_CASE("simulate_linear_estimation: unbiased and CRB-efficient") {
    const auto cfg = fig2_config();
    const std::size_t r = 10;
    const int trials = 10000;
    std::vector<std::complex<double>> truth;
    Rng tr(555, 1);
    for (std::size_t i = 0; i < r; ++i) truth.push_back(tr.complex_normal(1.0));
    Rng rng(555, 2);
    const auto report = simulate_linear_estimation(cfg, truth, r, trials, rng);
    REQUIRE(report.per_mode.size() == r);
    double mse_sum = 0.0, crb_sum = 0.0;
    for (const auto& s : report.per_mode) {
        const double se_mean = std::sqrt(s.emp_var / trials);
        CHECK(std::abs(s.emp_mean) < 3.0 * se_mean);            // unbiased
        CHECK(s.emp_var / s.target == doctest::Approx(1.0).epsilon(0.05));
        mse_sum += s.emp_var + std::norm(s.emp_mean);
        crb_sum += s.target;
    }
    CHECK(mse_sum == doctest::Approx(crb_sum).epsilon(0.05));   // MSE sum vs CRB(r)
}

TEST_CASE("simulate_linear_estimation: vanishing noise recovers exactly") {
    auto cfg = fig2_config();
    cfg.E0 = 1e-12;
    const std::vector<std::complex<double>> truth = {{1.0, 2.0}, {-0.5, 0.25}, {3.0, 0.0}};
    Rng rng(1, 1);
    const auto report = simulate_linear_estimation(cfg, truth, 3, 200, rng);
    for (const auto& s : report.per_mode) {
        CHECK(std::abs(s.emp_mean) < 1e-8);
        CHECK(s.emp_var < 1e-16);
    }
}

TEST_CASE("simulate_linear_estimation: real field variance halves") {
    auto cfg = fig2_config();
    cfg.field = fisher::ScalarField::real_field;
    std::vector<std::complex<double>> truth(6, {0.7, 0.0});
    Rng rng(9, 9);
    const auto rep = simulate_linear_estimation(cfg, truth, 6, 10000, rng);
    auto cfg_c = fig2_config();
    Rng rng2(9, 9);
    const auto rep_c = simulate_linear_estimation(cfg_c, truth, 6, 10000, rng2);
    for (std::size_t i = 0; i < 6; ++i) {
        // 1/mu with the factor-2 real-field Fisher eigenvalue
        CHECK(rep.per_mode[i].target == doctest::Approx(rep_c.per_mode[i].target / 2));
        CHECK(rep.per_mode[i].emp_var / rep.per_mode[i].target ==
              doctest::Approx(1.0).epsilon(0.07));
    }
}

TEST_CASE("simulate_linear_estimation errors") {
    const auto cfg = fig2_config();
    const std::vector<std::complex<double>> truth(4, {1.0, 0.0});
    Rng rng(3, 3);
    CHECK_THROWS_AS(simulate_linear_estimation(cfg, truth, 4, 50, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_linear_estimation(cfg, truth, 4000, 200, rng),
                    std::invalid_argument);
}

TEST_CASE("reproducibility: identical RngSpec gives bit-identical reports") {
    const auto cfg = fig2_config();
    const RngSpec spec{2718, 42};
    auto run = [&]() {
        Rng rng = spec.make();
        std::vector<std::vector<std::complex<double>>> reals;
        for (int t = 0; t < 120; ++t) {
            Rng r(spec.seed, static_cast<std::uint64_t>(t));
            reals.push_back(sample_isotropic_coeffs(cfg, 2, 200, r));
        }
        auto cov = empirical_covariance(reals, cfg, 2);
        std::vector<std::complex<double>> truth = {{1.0, -1.0}, {0.5, 0.5}};
        auto est = simulate_linear_estimation(cfg, truth, 2, 500, rng);
        return std::make_pair(cov, est);
    };
    const auto [cov1, est1] = run();
    const auto [cov2, est2] = run();
    REQUIRE(cov1.per_mode.size() == cov2.per_mode.size());
    for (std::size_t i = 0; i < cov1.per_mode.size(); ++i) {
        CHECK(std::memcmp(&cov1.per_mode[i].emp_var, &cov2.per_mode[i].emp_var, sizeof(double)) ==
              0);
        CHECK(std::memcmp(&cov1.per_mode[i].emp_mean, &cov2.per_mode[i].emp_mean,
                          sizeof(std::complex<double>)) == 0);
    }
    for (std::size_t i = 0; i < est1.per_mode.size(); ++i)
        CHECK(std::memcmp(&est1.per_mode[i].emp_var, &est2.per_mode[i].emp_var, sizeof(double)) ==
              0);
}

TEST_CASE("regular_wave_cartesian origin limits") {
    const double k = 10.0;
    const Vec3 origin{0.0, 0.0, 0.0};
    // tau = 1 vanishes at the origin for every l
    for (int l : {1, 2, 5})
        for (int m = -l; m <= l; ++m)
            CHECK(regular_wave_cartesian(1, l, m, k, origin).norm() < 1e-15);
    // tau = 2 survives only at l = 1
    for (int m : {-1, 0, 1}) CHECK(regular_wave_cartesian(2, 1, m, k, origin).norm() > 0.1);
    for (int l : {2, 3, 6})
        for (int m = -l; m <= l; ++m)
            CHECK(regular_wave_cartesian(2, l, m, k, origin).norm() < 1e-15);
}

TEST_CASE("green_identity_check at the origin and at kr = 3") {
    auto cfg = fig2_config();
    // coincident origin: closed form is E0^2 I/(6 pi), only l = 1 contributes
    const std::vector<std::pair<Vec3, Vec3>> origin_pair = {{{0, 0, 0}, {0, 0, 0}}};
    CHECK(green_identity_check(cfg, 2, origin_pair) < 1e-14);

    // random pairs with k|r| <= 3
    Rng rng(7, 7);
    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (int i = 0; i < 5; ++i) {
        auto draw = [&]() {
            const Direction d = rng.isotropic_direction();
            return (0.3 * std::cbrt(rng.uniform())) * d.unit_radial();
        };
        pairs.emplace_back(draw(), draw());
    }
    CHECK(green_identity_check(cfg, 40, pairs) < 1e-8);

    // truncation error decreases in lmax beyond l ~ e k r / 2, until it
    // saturates at rounding level
    double prev = 1e9;
    for (int lmax : {10, 14, 18, 24, 30}) {
        const double err = green_identity_check(cfg, lmax, pairs);
        CHECK((err < prev || err < 1e-13));
        prev = err;
    }

    // precondition: lmax must exceed e k rmax / 2
    const std::vector<std::pair<Vec3, Vec3>> far = {{{1.5, 0, 0}, {0, 0, 0}}};
    CHECK_THROWS_AS(green_identity_check(cfg, 5, far), std::invalid_argument);
}
