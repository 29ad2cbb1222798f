#pragma once

#include <complex>
#include <vector>

#include "crbound/geometry.hpp"
#include "crbound/scaled_real.hpp"

namespace crbound::specfun {

/// Value with an underflow flag: underflow means the true magnitude is
/// below the smallest normal double and 0.0 was returned in its place.
struct FlaggedValue {
    double value = 0.0;
    bool underflow = false;
};

/// Spherical Bessel function j_l(x) in extended range. Miller downward
/// recurrence normalized at l = 0 (upward is unstable for j). l = -1 is
/// the cos(x)/x extension used by the Lommel recursion seed.
ScaledReal sph_bessel_j_scaled(int l, double x);

/// Spherical Neumann function y_l(x) in extended range; upward recurrence
/// from the l = 0, 1 closed forms (stable direction for y).
ScaledReal sph_neumann_y_scaled(int l, double x);

FlaggedValue sph_bessel_j_flagged(int l, double x);
double sph_bessel_j(int l, double x);
double sph_neumann_y(int l, double x);

/// h_l^(1)(x) = j_l(x) + i y_l(x). Overflows to inf for l far beyond x;
/// extended-range consumers use the scaled parts directly.
std::complex<double> sph_hankel1(int l, double x);

enum class RiccatiKind { regular, outgoing };

/// (x z_l(x))' / x with z = j (regular) or h^(1) (outgoing), evaluated via
/// the derivative identity (x z_l)'/x = z_{l-1}(x) - (l/x) z_l(x).
std::complex<double> riccati_factor(RiccatiKind kind, int l, double x);

/// Real part of the regular Riccati factor in extended range (the factor
/// is real for z = j).
ScaledReal riccati_factor_regular_scaled(int l, double x);

/// Extended-range pieces of the outgoing Riccati factor, real part from
/// j and imaginary part from y.
struct ScaledComplex {
    ScaledReal re, im;
};
ScaledComplex riccati_factor_outgoing_scaled(int l, double x);
ScaledComplex sph_hankel1_scaled(int l, double x);

/// Unnormalized associated Legendre function P_l^m(x), Condon-Shortley
/// phase included (P_1^1(0) = -1). Stable m-then-l recurrence with
/// extended-range intermediates.
double assoc_legendre(int l, int m, double x);

/// Fully normalized spherical-harmonic basis functions of cos(theta) for
/// all 0 <= m <= l <= lmax, pole-safe:
///   p(l,m)   = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(cos theta)
///   pi(l,m)  = m * p(l,m) / sin(theta)
///   tau(l,m) = d p(l,m) / d theta
class AngularTable {
public:
    AngularTable(int lmax, double cos_theta);

    int lmax() const { return lmax_; }
    double p(int l, int m) const { return p_[idx(l, m)]; }
    double pi(int l, int m) const { return pi_[idx(l, m)]; }
    double tau(int l, int m) const { return tau_[idx(l, m)]; }

private:
    std::size_t idx(int l, int m) const {
        return static_cast<std::size_t>(l * (l + 1) / 2 + m);
    }
    int lmax_;
    std::vector<double> p_, pi_, tau_;
};

/// Scalar spherical harmonic
///   Y_lm = (-1)^m sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(cos theta) e^{i m phi},
/// with Y_{l,-m} = (-1)^m conj(Y_{l,m}).
std::complex<double> scalar_harmonic(int l, int m, const Direction& dir);

/// Vector spherical harmonics in the spherical frame at dir:
///   A_1lm = grad x (r Y_lm) / sqrt(l(l+1))   (tangential, no r-hat part)
///   A_2lm = r-hat x A_1lm
///   A_3lm = r-hat Y_lm
/// Built from analytic theta/phi derivatives; finite at the poles.
ComplexVec3 vector_harmonic(int tau, int l, int m, const Direction& dir);

/// Same, given a precomputed AngularTable for dir (batch evaluation).
ComplexVec3 vector_harmonic(int tau, int l, int m, const Direction& dir, const AngularTable& tab);

/// (1/k) Im G_e(k, r, r') = (1/4pi) (I + grad grad / k^2) sinc(k|r - r'|):
/// the real symmetric dyadic
///   (1/4pi) [ (j_0(u) - j_1(u)/u) I + (3 j_1(u)/u - j_0(u)) Rhat Rhat ],
/// u = k|r - r'|, regular at coincidence where it equals I/(6pi).
Dyadic3 green_imag_closed(double k, const Vec3& r, const Vec3& rp);

/// i^n for possibly negative n.
std::complex<double> ipow(int n);

}  // namespace crbound::specfun
