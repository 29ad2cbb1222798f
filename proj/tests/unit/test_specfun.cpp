#include <doctest.h>

#include <cmath>
#include <complex>

#include "crbound/specfun.hpp"
#include "support/oracles.hpp"

using namespace crbound;
using namespace crbound::specfun;

namespace {
constexpr double kTwoPi = 2.0 * kPi;

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
}  // namespace

TEST_CASE("sph_bessel_j closed forms and series oracle") {
    // j_0 = sin(x)/x
    CHECK(rel_err(sph_bessel_j(0, 2.0), std::sin(2.0) / 2.0) < 1e-15);
    CHECK(sph_bessel_j(0, 2.0) == doctest::Approx(0.4546487134128408).epsilon(1e-12));
    // reference value from the power-series expansion (mpmath cross-checked)
    CHECK(sph_bessel_j(1, 1.0) == doctest::Approx(0.30116867893975679).epsilon(1e-12));
    CHECK(rel_err(sph_bessel_j(1, 1.0), oracles::series_sph_bessel_j(1, 1.0)) < 1e-13);
    // l = -1 extension
    CHECK(rel_err(sph_bessel_j(-1, 3.0), std::cos(3.0) / 3.0) < 1e-15);
    // j_l -> 0 as x -> 0 for l >= 1
    CHECK(std::fabs(sph_bessel_j(1, 1e-8)) < 1e-8);
    CHECK(std::fabs(sph_bessel_j(6, 1e-4)) < 1e-24);
}

TEST_CASE("sph_bessel_j vs series across l and x") {
    for (int l : {0, 1, 2, 5, 8, 12, 17, 20}) {
        for (double x : {0.3, 1.0, 4.0, 9.5, 14.0, 20.0}) {
            const double want = oracles::series_sph_bessel_j(l, x);
            CHECK_MESSAGE(rel_err(sph_bessel_j(l, x), want) < 1e-11,
                          "l=", l, " x=", x);
        }
    }
    // large order / argument spot checks (mpmath, 25 digits)
    CHECK(rel_err(sph_bessel_j(40, 10.0), 8.43567163445920870697208910038e-22) < 1e-12);
    CHECK(rel_err(sph_bessel_j(80, 100.0), 0.00561666595360724570167865087485) < 1e-12);
    CHECK(rel_err(sph_bessel_j(20, 5.0), 5.42772676079320835007899599265e-12) < 1e-12);
}

TEST_CASE("sph_bessel_j domain errors and underflow flag") {
    CHECK_THROWS_AS(sph_bessel_j(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(sph_bessel_j(3, -1.0), std::domain_error);
    CHECK_THROWS_AS(sph_bessel_j(-2, 1.0), std::domain_error);
    const auto tiny = sph_bessel_j_flagged(260, 1.0);
    CHECK(tiny.underflow);
    CHECK(tiny.value == 0.0);
    const ScaledReal scaled = sph_bessel_j_scaled(260, 1.0);
    CHECK(!scaled.is_zero());
    CHECK(scaled.log10_abs() < -308.0);
}

TEST_CASE("sph_hankel1 closed forms") {
    for (double x : {0.7, 3.0, 15.0}) {
        const std::complex<double> i(0.0, 1.0);
        const std::complex<double> eix(std::cos(x), std::sin(x));
        const std::complex<double> h0 = -i * eix / x;
        const std::complex<double> h1 = -(1.0 + i / x) * eix / x;
        CHECK(std::abs(sph_hankel1(0, x) - h0) < 1e-14 * std::abs(h0));
        CHECK(std::abs(sph_hankel1(1, x) - h1) < 1e-13 * std::abs(h1));
    }
    // frozen reference (mpmath): j_5(15), y_5(15)
    const std::complex<double> h5 = sph_hankel1(5, 15.0);
    CHECK(rel_err(h5.real(), 0.0659680070765219607415795389606) < 1e-10);
    CHECK(rel_err(h5.imag(), 0.0204756982818590655314692091413) < 1e-10);
    CHECK_THROWS_AS(sph_hankel1(2, 0.0), std::domain_error);
}

TEST_CASE("Wronskian j_l y_l' - j_l' y_l = 1/x^2") {
    // derivatives via z_l' = z_{l-1} - (l+1)/x z_l
    for (double x : {1.0, 10.0, 15.0, 50.0}) {
        for (int l = 1; l <= 40; ++l) {
            const ScaledReal jl = sph_bessel_j_scaled(l, x);
            const ScaledReal jm = sph_bessel_j_scaled(l - 1, x);
            const ScaledReal yl = sph_neumann_y_scaled(l, x);
            const ScaledReal ym = sph_neumann_y_scaled(l - 1, x);
            const double c = (l + 1.0) / x;
            const ScaledReal jp = jm - c * jl;   // j_l'
            const ScaledReal yp = ym - c * yl;   // y_l'
            const double w = (jl * yp - jp * yl).value();
            CHECK_MESSAGE(rel_err(w, 1.0 / (x * x)) < 1e-10, "l=", l, " x=", x);
        }
    }
}

TEST_CASE("riccati_factor identities") {
    // small-x limit: (x j_1)' ~ 2x/3, so the factor itself tends to 2/3
    const double x0 = 1e-4;
    const auto small = riccati_factor(RiccatiKind::regular, 1, x0);
    CHECK(rel_err(small.real(), 2.0 / 3.0) < 1e-7);
    CHECK(small.imag() == 0.0);

    // central finite difference of x z_l(x) divided by x
    for (int l : {1, 3, 7}) {
        for (double x : {2.0, 15.0}) {
            const double h = 2e-5;
            const double fd = oracles::central_difference(
                                  [l](double t) { return t * oracles::series_sph_bessel_j(l, t); },
                                  x, h) /
                              x;
            const auto got = riccati_factor(RiccatiKind::regular, l, x);
            CHECK_MESSAGE(rel_err(got.real(), fd) < 1e-8, "l=", l, " x=", x);
        }
    }
    {
        const double x = 15.0, h = 1e-5;
        const auto fd = oracles::central_difference_c(
                            [](double t) { return t * sph_hankel1(1, t); }, x, h) /
                        x;
        const auto got = riccati_factor(RiccatiKind::outgoing, 1, x);
        CHECK(std::abs(got - fd) / std::abs(fd) < 1e-8);
    }
    CHECK_THROWS_AS(riccati_factor(RiccatiKind::regular, 1, -2.0), std::domain_error);
}

TEST_CASE("assoc_legendre low orders and symbolic oracle") {
    for (double x : {-0.9, -0.2, 0.0, 0.5, 1.0}) {
        CHECK(assoc_legendre(1, 0, x) == doctest::Approx(x).epsilon(1e-14));
    }
    CHECK(assoc_legendre(1, 1, 0.0) == doctest::Approx(-1.0));  // Condon-Shortley
    // P_5^3(x) = (105/2)(1 - 9x^2)(1 - x^2)^(3/2)
    const double x = 0.3;
    const double want = 52.5 * (1.0 - 9.0 * x * x) * std::pow(1.0 - x * x, 1.5);
    CHECK(rel_err(assoc_legendre(5, 3, x), want) < 1e-12);
    CHECK(assoc_legendre(5, 3, 0.3) == doctest::Approx(8.65914461606196989).epsilon(1e-12));
    CHECK_THROWS_AS(assoc_legendre(2, 3, 0.5), std::domain_error);
    CHECK_THROWS_AS(assoc_legendre(2, 1, 1.5), std::domain_error);
}

TEST_CASE("assoc_legendre stays finite at high order") {
    // unnormalized values grow factorially; the internal rescaling keeps
    // them exact up to the double range (mpmath / sympy references)
    CHECK(rel_err(assoc_legendre(60, 30, 0.2), 3.55351645355351771524423533703e+51) < 1e-12);
    CHECK(rel_err(assoc_legendre(90, 90, 0.99), 3.067075476209543684641411e+87) < 1e-12);
    CHECK(std::isfinite(assoc_legendre(100, 60, -0.7)));
}

TEST_CASE("scalar_harmonic closed forms") {
    const Direction d(0.7, 1.3);
    CHECK(std::abs(scalar_harmonic(0, 0, d) - 1.0 / std::sqrt(4.0 * kPi)) < 1e-15);
    const std::complex<double> y10 = scalar_harmonic(1, 0, d);
    CHECK(rel_err(y10.real(), std::sqrt(3.0 / (4.0 * kPi)) * std::cos(0.7)) < 1e-14);
    CHECK(y10.imag() == 0.0);
    // conjugation symmetry Y_{l,-m} = (-1)^m conj(Y_{l,m})
    for (int l : {1, 3, 6}) {
        for (int m = 1; m <= l; ++m) {
            const auto a = scalar_harmonic(l, -m, d);
            const auto b = std::conj(scalar_harmonic(l, m, d));
            const double s = (m % 2 == 0) ? 1.0 : -1.0;
            CHECK(std::abs(a - s * b) < 1e-14);
        }
    }
    CHECK_THROWS_AS(scalar_harmonic(2, 3, d), std::domain_error);
}

TEST_CASE("scalar_harmonic orthonormality by quadrature") {
    const int L = 8;
    double worst = 0.0;
    for (int l = 0; l <= L; ++l) {
        for (int lp = l; lp <= L; ++lp) {
            for (int m = -std::min(l, 2); m <= std::min(l, 2); ++m) {
                for (int mp = -std::min(lp, 2); mp <= std::min(lp, 2); ++mp) {
                    const auto integral = oracles::sphere_quadrature(
                        [&](double ct, double phi) {
                            const Direction dir(std::acos(ct), phi);
                            return std::conj(scalar_harmonic(l, m, dir)) *
                                   scalar_harmonic(lp, mp, dir);
                        },
                        2 * L + 2, 2 * L + 2);
                    const double want = (l == lp && m == mp) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(integral - want));
                }
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("vector_harmonic structure and pole regularity") {
    const Direction d(1.1, 0.4);
    for (int l : {1, 2, 5}) {
        for (int m = -l; m <= l; ++m) {
            const ComplexVec3 a1 = vector_harmonic(1, l, m, d);
            const ComplexVec3 a2 = vector_harmonic(2, l, m, d);
            CHECK(a1[0] == std::complex<double>(0.0, 0.0));  // no radial part
            CHECK(a2[0] == std::complex<double>(0.0, 0.0));
            // A2 = rhat x A1 in spherical components: (0, -A1_phi, A1_theta)
            CHECK(std::abs(a2[1] + a1[2]) < 1e-14);
            CHECK(std::abs(a2[2] - a1[1]) < 1e-14);
        }
    }
    // finite at the poles for every m
    for (double theta : {0.0, kPi}) {
        const Direction pole(theta, 0.0);
        for (int l : {1, 4, 9}) {
            for (int m = -l; m <= l; ++m) {
                for (int tau : {1, 2, 3}) {
                    const ComplexVec3 a = vector_harmonic(tau, l, m, pole);
                    CHECK(std::isfinite(a.norm()));
                    if (tau != 3 && std::abs(m) != 1) CHECK(a.norm() < 1e-13);
                }
            }
        }
    }
    CHECK_THROWS_AS(vector_harmonic(4, 1, 0, d), std::domain_error);
    CHECK_THROWS_AS(vector_harmonic(0, 1, 0, d), std::domain_error);
}

TEST_CASE("vector_harmonic orthonormality by quadrature") {
    const int L = 6;
    double worst_diag = 0.0, worst_cross = 0.0;
    for (int tau = 1; tau <= 3; ++tau) {
        for (int l = 1; l <= L; ++l) {
            for (int m : {-l, 0, l / 2}) {
                const auto diag = oracles::sphere_quadrature(
                    [&](double ct, double phi) {
                        const Direction dir(std::acos(ct), phi);
                        const ComplexVec3 a = vector_harmonic(tau, l, m, dir);
                        return dot_conj(a, a);
                    },
                    2 * L + 2, 2 * L + 2);
                worst_diag = std::max(worst_diag, std::abs(diag - 1.0));
            }
        }
    }
    // a handful of cross terms across tau, l, m
    const int combos[][6] = {{1, 1, 0, 2, 1, 0}, {1, 3, 2, 1, 3, 1}, {2, 2, -1, 3, 2, -1},
                             {1, 4, 3, 1, 3, 3},  {3, 5, 0, 3, 3, 0}};
    for (const auto& c : combos) {
        const auto cross = oracles::sphere_quadrature(
            [&](double ct, double phi) {
                const Direction dir(std::acos(ct), phi);
                return dot_conj(vector_harmonic(c[0], c[1], c[2], dir),
                                vector_harmonic(c[3], c[4], c[5], dir));
            },
            2 * L + 2, 2 * L + 2);
        worst_cross = std::max(worst_cross, std::abs(cross));
    }
    CHECK(worst_diag < 1e-10);
    CHECK(worst_cross < 1e-10);
}

TEST_CASE("green_imag_closed limits and symmetry") {
    const double k = 10.0;
    const Vec3 p{0.2, -0.1, 0.05};
    const Dyadic3 at_zero = green_imag_closed(k, p, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = i == j ? 1.0 / (6.0 * kPi) : 0.0;
            CHECK(std::abs(at_zero(i, j) - want) < 1e-15);
        }
    const Vec3 a{0.3, 0.0, -0.2}, b{-0.1, 0.25, 0.1};
    const Dyadic3 ab = green_imag_closed(k, a, b);
    const Dyadic3 ba = green_imag_closed(k, b, a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(ab(i, j).imag() == 0.0);
            CHECK(std::abs(ab(i, j) - ba(i, j)) < 1e-16);
            CHECK(std::abs(ab(i, j) - ab(j, i)) < 1e-16);
        }
}

TEST_CASE("Direction normalization") {
    const Direction d1(-0.3, 0.0);  // reflects through the pole
    CHECK(d1.theta() == doctest::Approx(0.3));
    CHECK(d1.phi() == doctest::Approx(kPi));
    const Direction d2(kPi / 2, -kPi / 2);
    CHECK(d2.phi() == doctest::Approx(3.0 * kPi / 2));
    const Direction d3(kPi + 0.1, 0.0);
    CHECK(d3.theta() == doctest::Approx(kPi - 0.1));
    CHECK(d3.theta() >= 0.0);
    CHECK(d3.theta() <= kPi);
    CHECK(d3.phi() >= 0.0);
    CHECK(d3.phi() < kTwoPi);
}

TEST_CASE("downward and series j agree to 1e-11 for l <= 20, x <= 20") {
    double worst = 0.0;
    for (int l = 0; l <= 20; ++l) {
        for (double x : {0.5, 2.0, 6.5, 11.0, 16.0, 20.0}) {
            const double a = sph_bessel_j(l, x);
            const double b = oracles::series_sph_bessel_j(l, x);
            worst = std::max(worst, rel_err(a, b));
        }
    }
    CHECK(worst < 1e-11);
}
