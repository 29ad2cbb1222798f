#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace crbound {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
};

/// Unit direction on the sphere. Angles are normalized into
/// theta in [0, pi], phi in [0, 2*pi) on construction.
class Direction {
public:
    Direction(double theta, double phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi))
            throw std::domain_error("Direction: non-finite angle");
        theta = std::fmod(theta, 2.0 * kPi);
        if (theta < 0.0) theta += 2.0 * kPi;
        if (theta > kPi) {          // reflect through the pole
            theta = 2.0 * kPi - theta;
            phi += kPi;
        }
        phi = std::fmod(phi, 2.0 * kPi);
        if (phi < 0.0) phi += 2.0 * kPi;
        theta_ = theta;
        phi_ = phi;
    }

    static Direction from_vec(const Vec3& v) {
        const double r = v.norm();
        if (r == 0.0) return Direction(0.0, 0.0);
        const double ct = std::clamp(v.z / r, -1.0, 1.0);
        return Direction(std::acos(ct), std::atan2(v.y, v.x));
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }
    double cos_theta() const { return std::cos(theta_); }
    double sin_theta() const { return std::sin(theta_); }

    Vec3 unit_radial() const {
        const double st = sin_theta(), ct = cos_theta();
        return {st * std::cos(phi_), st * std::sin(phi_), ct};
    }
    Vec3 unit_theta() const {
        const double st = sin_theta(), ct = cos_theta();
        return {ct * std::cos(phi_), ct * std::sin(phi_), -st};
    }
    Vec3 unit_phi() const { return {-std::sin(phi_), std::cos(phi_), 0.0}; }

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

enum class Frame { spherical, cartesian };

/// Complex 3-vector tagged with its frame: spherical components are
/// (r-hat, theta-hat, phi-hat) at some direction, Cartesian are (x, y, z).
struct ComplexVec3 {
    std::array<std::complex<double>, 3> v{};
    Frame frame = Frame::spherical;

    std::complex<double>& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    const std::complex<double>& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    friend ComplexVec3 operator+(const ComplexVec3& a, const ComplexVec3& b) {
        if (a.frame != b.frame) throw std::logic_error("ComplexVec3: frame mismatch");
        return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2]}, a.frame};
    }
    friend ComplexVec3 operator*(std::complex<double> s, const ComplexVec3& a) {
        return {{s * a.v[0], s * a.v[1], s * a.v[2]}, a.frame};
    }
    friend ComplexVec3 operator*(double s, const ComplexVec3& a) {
        return std::complex<double>(s, 0.0) * a;
    }

    double norm() const {
        return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    }

    /// Spherical components at `dir` expressed in the Cartesian frame.
    ComplexVec3 to_cartesian(const Direction& dir) const {
        if (frame == Frame::cartesian) return *this;
        const Vec3 er = dir.unit_radial(), et = dir.unit_theta(), ep = dir.unit_phi();
        ComplexVec3 out;
        out.frame = Frame::cartesian;
        out.v[0] = v[0] * er.x + v[1] * et.x + v[2] * ep.x;
        out.v[1] = v[0] * er.y + v[1] * et.y + v[2] * ep.y;
        out.v[2] = v[0] * er.z + v[1] * et.z + v[2] * ep.z;
        return out;
    }
};

inline std::complex<double> dot_conj(const ComplexVec3& a, const ComplexVec3& b) {
    if (a.frame != b.frame) throw std::logic_error("dot_conj: frame mismatch");
    return std::conj(a.v[0]) * b.v[0] + std::conj(a.v[1]) * b.v[1] + std::conj(a.v[2]) * b.v[2];
}

/// 3x3 complex matrix in the Cartesian frame.
struct Dyadic3 {
    std::array<std::complex<double>, 9> m{};

    std::complex<double>& operator()(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
    const std::complex<double>& operator()(int i, int j) const {
        return m[static_cast<std::size_t>(3 * i + j)];
    }

    static Dyadic3 identity(double s = 1.0) {
        Dyadic3 d;
        d(0, 0) = d(1, 1) = d(2, 2) = s;
        return d;
    }

    /// a (outer) conj(b), both Cartesian.
    static Dyadic3 outer_conj(const ComplexVec3& a, const ComplexVec3& b) {
        Dyadic3 d;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) d(i, j) = a[i] * std::conj(b[j]);
        return d;
    }

    Dyadic3& operator+=(const Dyadic3& o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    friend Dyadic3 operator-(const Dyadic3& a, const Dyadic3& b) {
        Dyadic3 d;
        for (std::size_t i = 0; i < 9; ++i) d.m[i] = a.m[i] - b.m[i];
        return d;
    }
    friend Dyadic3 operator*(double s, const Dyadic3& a) {
        Dyadic3 d;
        for (std::size_t i = 0; i < 9; ++i) d.m[i] = s * a.m[i];
        return d;
    }

    double max_abs() const {
        double mx = 0.0;
        for (const auto& e : m) mx = std::max(mx, std::abs(e));
        return mx;
    }
};

}  // namespace crbound
