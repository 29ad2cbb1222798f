#include "crbound/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crbound::specfun {

namespace {

void require_positive(double x) {
    if (!(x > 0.0)) throw std::domain_error("spherical Bessel argument must be > 0");
}

// Downward pass for j: seeds (0, tiny) at lstart, recurrence
// z_{k-1} = (2k+1)/x z_k - z_{k+1}, rescaling when the magnitudes grow.
// Returns j_l relative to the recurrence's unnormalized j_0 as a scaled pair.
struct MillerResult {
    ScaledReal jl_raw;
    ScaledReal j0_raw;
};

MillerResult miller_downward(int l, double x, int lstart) {
    double up = 0.0;      // z_{k+1}
    double cur = 1e-305;  // z_k, arbitrary tiny seed (lstart > l always)
    std::int64_t scale_exp = 0;
    ScaledReal jl_raw;
    for (int k = lstart; k >= 1; --k) {
        const double down = (2.0 * k + 1.0) / x * cur - up;
        up = cur;
        cur = down;
        if (std::fabs(cur) > 1e250) {
            cur *= 0x1p-500;
            up *= 0x1p-500;
            scale_exp += 500;
        }
        if (k - 1 == l) {
            jl_raw = ScaledReal::from(cur);
            jl_raw.exp2 += scale_exp;
        }
    }
    ScaledReal j0_raw = ScaledReal::from(cur);
    j0_raw.exp2 += scale_exp;
    return {jl_raw, j0_raw};
}

int miller_start_order(int l, double x) {
    // past the turning point j_{k} decays like (x/2k)^k; this start gives
    // well over double precision for the normalized result
    const int base = std::max(l, static_cast<int>(x));
    return base + 20 + static_cast<int>(std::sqrt(40.0 * base));
}

}  // namespace

ScaledReal sph_bessel_j_scaled(int l, double x) {
    require_positive(x);
    if (l < -1) throw std::domain_error("sph_bessel_j: order must be >= -1");
    if (l == -1) return ScaledReal::from(std::cos(x) / x);
    if (l == 0) return ScaledReal::from(std::sin(x) / x);

    const ScaledReal j0 = ScaledReal::from(std::sin(x) / x);
    int lstart = miller_start_order(l, x);
    MillerResult a = miller_downward(l, x, lstart);
    MillerResult b = miller_downward(l, x, lstart + 12);
    ScaledReal ra = a.jl_raw / a.j0_raw;
    ScaledReal rb = b.jl_raw / b.j0_raw;
    // extend the start until two runs agree; a handful of passes at most
    for (int guard = 0; guard < 8; ++guard) {
        if (ra.is_zero() && rb.is_zero()) break;
        const ScaledReal diff = ra - rb;
        if (diff.is_zero() || std::fabs((diff / rb).value()) <= 4e-16) break;
        lstart += 20;
        a = miller_downward(l, x, lstart);
        b = miller_downward(l, x, lstart + 12);
        ra = a.jl_raw / a.j0_raw;
        rb = b.jl_raw / b.j0_raw;
    }
    return rb * j0;
}

ScaledReal sph_neumann_y_scaled(int l, double x) {
    require_positive(x);
    if (l < 0) throw std::domain_error("sph_neumann_y: order must be >= 0");
    const double y0 = -std::cos(x) / x;
    if (l == 0) return ScaledReal::from(y0);
    const double y1 = -std::cos(x) / (x * x) - std::sin(x) / x;
    if (l == 1) return ScaledReal::from(y1);
    ScaledReal prev = ScaledReal::from(y0);
    ScaledReal cur = ScaledReal::from(y1);
    for (int k = 1; k < l; ++k) {
        ScaledReal next = ((2.0 * k + 1.0) / x) * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

FlaggedValue sph_bessel_j_flagged(int l, double x) {
    const ScaledReal s = sph_bessel_j_scaled(l, x);
    if (s.underflows_double()) return {0.0, true};
    return {s.value(), false};
}

double sph_bessel_j(int l, double x) { return sph_bessel_j_flagged(l, x).value; }

double sph_neumann_y(int l, double x) { return sph_neumann_y_scaled(l, x).value(); }

std::complex<double> sph_hankel1(int l, double x) {
    require_positive(x);
    if (l < 0) throw std::domain_error("sph_hankel1: order must be >= 0");
    if (l == 0) {
        // -i e^{ix} / x
        return std::complex<double>(std::sin(x) / x, -std::cos(x) / x);
    }
    return {sph_bessel_j(l, x), sph_neumann_y(l, x)};
}

ScaledComplex sph_hankel1_scaled(int l, double x) {
    return {sph_bessel_j_scaled(l, x), sph_neumann_y_scaled(l, x)};
}

ScaledReal riccati_factor_regular_scaled(int l, double x) {
    require_positive(x);
    if (l < 1) throw std::domain_error("riccati_factor: order must be >= 1");
    return sph_bessel_j_scaled(l - 1, x) - (static_cast<double>(l) / x) * sph_bessel_j_scaled(l, x);
}

ScaledComplex riccati_factor_outgoing_scaled(int l, double x) {
    require_positive(x);
    if (l < 1) throw std::domain_error("riccati_factor: order must be >= 1");
    const double lox = static_cast<double>(l) / x;
    ScaledReal re = sph_bessel_j_scaled(l - 1, x) - lox * sph_bessel_j_scaled(l, x);
    ScaledReal im = sph_neumann_y_scaled(l - 1, x) - lox * sph_neumann_y_scaled(l, x);
    return {re, im};
}

std::complex<double> riccati_factor(RiccatiKind kind, int l, double x) {
    if (kind == RiccatiKind::regular) {
        return {riccati_factor_regular_scaled(l, x).value(), 0.0};
    }
    const ScaledComplex f = riccati_factor_outgoing_scaled(l, x);
    return {f.re.value(), f.im.value()};
}

double assoc_legendre(int l, int m, double x) {
    if (l < 0 || m < 0 || m > l) throw std::domain_error("assoc_legendre: need 0 <= m <= l");
    if (!(std::fabs(x) <= 1.0)) throw std::domain_error("assoc_legendre: |x| must be <= 1");
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    // P_m^m = (-1)^m (2m-1)!! s^m, extended range against overflow
    ScaledReal pmm = ScaledReal::from(1.0);
    for (int k = 1; k <= m; ++k) pmm = pmm * ScaledReal::from(-(2.0 * k - 1.0) * s);
    if (l == m) return pmm.value();
    ScaledReal prev = pmm;
    ScaledReal cur = ScaledReal::from((2.0 * m + 1.0) * x) * pmm;
    for (int k = m + 2; k <= l; ++k) {
        ScaledReal next =
            (ScaledReal::from((2.0 * k - 1.0) * x) * cur - ScaledReal::from(k + m - 1.0) * prev) /
            ScaledReal::from(static_cast<double>(k - m));
        prev = cur;
        cur = next;
    }
    return cur.value();
}

AngularTable::AngularTable(int lmax, double cos_theta) : lmax_(lmax) {
    if (lmax < 0) throw std::domain_error("AngularTable: lmax must be >= 0");
    if (!(std::fabs(cos_theta) <= 1.0)) throw std::domain_error("AngularTable: |cos theta| > 1");
    const std::size_t n = static_cast<std::size_t>((lmax + 1) * (lmax + 2) / 2);
    p_.assign(n, 0.0);
    pi_.assign(n, 0.0);
    tau_.assign(n, 0.0);
    const double x = cos_theta;
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));

    // sectoral seeds: p(m,m) = c_m s^m, pi(m,m) = m c_m s^{m-1}
    // with c_m = c_{m-1} * (-sqrt((2m+1)/(2m))), c_0 = 1/sqrt(4pi)
    double c = std::sqrt(1.0 / (4.0 * kPi));
    p_[idx(0, 0)] = c;
    double s_pow = 1.0;  // s^{m-1} running power
    for (int m = 1; m <= lmax; ++m) {
        c *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        p_[idx(m, m)] = c * s_pow * s;
        pi_[idx(m, m)] = m * c * s_pow;
        s_pow *= s;
    }
    // upward in l at fixed m; same three-term recurrence for p and pi
    for (int m = 0; m <= lmax; ++m) {
        if (m + 1 <= lmax) {
            const double f = std::sqrt(2.0 * m + 3.0) * x;
            p_[idx(m + 1, m)] = f * p_[idx(m, m)];
            pi_[idx(m + 1, m)] = f * pi_[idx(m, m)];
        }
        for (int l = m + 2; l <= lmax; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
            const double b =
                std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m) /
                          (4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0));
            p_[idx(l, m)] = a * (x * p_[idx(l - 1, m)] - b * p_[idx(l - 2, m)]);
            pi_[idx(l, m)] = a * (x * pi_[idx(l - 1, m)] - b * pi_[idx(l - 2, m)]);
        }
    }
    // tau from pi (m >= 1) and from p(l,1) for m = 0
    for (int l = 1; l <= lmax; ++l) {
        tau_[idx(l, 0)] = std::sqrt(static_cast<double>(l) * (l + 1)) * p_[idx(l, 1)];
        for (int m = 1; m <= l; ++m) {
            double t = l * x * pi_[idx(l, m)];
            if (l - 1 >= m) {
                t -= std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0)) *
                     std::sqrt(static_cast<double>(l) * l - static_cast<double>(m) * m) *
                     pi_[idx(l - 1, m)];
            }
            tau_[idx(l, m)] = t / m;
        }
    }
}

std::complex<double> scalar_harmonic(int l, int m, const Direction& dir) {
    if (l < 0 || std::abs(m) > l) throw std::domain_error("scalar_harmonic: need |m| <= l");
    const int am = std::abs(m);
    const AngularTable tab(l, dir.cos_theta());
    double pv = tab.p(l, am);
    if (m < 0 && (am % 2 != 0)) pv = -pv;  // p(l,-m) = (-1)^m p(l,m)
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m prefactor
    const double mp = static_cast<double>(m) * dir.phi();
    return sign * pv * std::complex<double>(std::cos(mp), std::sin(mp));
}

ComplexVec3 vector_harmonic(int tau, int l, int m, const Direction& dir, const AngularTable& tab) {
    if (tau < 1 || tau > 3) throw std::domain_error("vector_harmonic: tau must be 1, 2 or 3");
    if (l < 1 || std::abs(m) > l) throw std::domain_error("vector_harmonic: need l >= 1, |m| <= l");
    if (tab.lmax() < l) throw std::domain_error("vector_harmonic: table too small");
    const int am = std::abs(m);
    double pv = tab.p(l, am);
    double piv = tab.pi(l, am);
    double tauv = tab.tau(l, am);
    if (m < 0) {
        const double sgn = (am % 2 == 0) ? 1.0 : -1.0;
        pv *= sgn;
        piv *= -sgn;  // pi carries a factor m
        tauv *= sgn;
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double mp = static_cast<double>(m) * dir.phi();
    const std::complex<double> phase =
        sign * std::complex<double>(std::cos(mp), std::sin(mp));
    const std::complex<double> iu(0.0, 1.0);

    ComplexVec3 out;
    out.frame = Frame::spherical;
    if (tau == 3) {
        out.v[0] = phase * pv;
        return out;
    }
    const std::complex<double> c = phase / std::sqrt(static_cast<double>(l) * (l + 1));
    if (tau == 1) {
        out.v[1] = c * iu * piv;
        out.v[2] = -c * tauv;
    } else {
        out.v[1] = c * tauv;
        out.v[2] = c * iu * piv;
    }
    return out;
}

ComplexVec3 vector_harmonic(int tau, int l, int m, const Direction& dir) {
    const AngularTable tab(l, dir.cos_theta());
    return vector_harmonic(tau, l, m, dir, tab);
}

Dyadic3 green_imag_closed(double k, const Vec3& r, const Vec3& rp) {
    if (!(k > 0.0)) throw std::domain_error("green_imag_closed: k must be > 0");
    const Vec3 d = r - rp;
    const double R = d.norm();
    if (!std::isfinite(R)) throw std::domain_error("green_imag_closed: non-finite input");
    const double u = k * R;
    double j0 = 0.0, j1ou = 0.0;
    if (u < 1e-4) {
        const double u2 = u * u;
        j0 = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
        j1ou = 1.0 / 3.0 - u2 / 30.0 + u2 * u2 / 840.0;
    } else {
        j0 = std::sin(u) / u;
        j1ou = (std::sin(u) / (u * u) - std::cos(u) / u) / u;
    }
    const double ci = (j0 - j1ou) / (4.0 * kPi);
    const double crr = (3.0 * j1ou - j0) / (4.0 * kPi);
    Dyadic3 out = Dyadic3::identity(ci);
    if (R > 0.0) {
        const Vec3 rh = (1.0 / R) * d;
        const double h[3] = {rh.x, rh.y, rh.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out(i, j) += crr * h[i] * h[j];
    }
    return out;
}

std::complex<double> ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace crbound::specfun
