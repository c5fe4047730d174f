#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <functional>

namespace hyperns {

using Complex = std::complex<double>;

/// Integer lattice wavenumber on Z^3.
struct Frequency {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr auto operator<=>(const Frequency&) const = default;

  constexpr int operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr std::int64_t norm2() const {
    return std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm2())); }
  constexpr int max_abs() const {
    const int ax = x < 0 ? -x : x;
    const int ay = y < 0 ? -y : y;
    const int az = z < 0 ? -z : z;
    return ax > ay ? (ax > az ? ax : az) : (ay > az ? ay : az);
  }
  constexpr bool is_zero() const { return x == 0 && y == 0 && z == 0; }
};

constexpr Frequency operator-(Frequency a) { return {-a.x, -a.y, -a.z}; }
constexpr Frequency operator+(Frequency a, Frequency b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Frequency operator-(Frequency a, Frequency b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

struct FrequencyHash {
  std::size_t operator()(const Frequency& k) const noexcept {
    std::uint64_t h = (std::uint64_t(std::uint32_t(k.x)) * 0x9E3779B97F4A7C15ULL) ^
                      (std::uint64_t(std::uint32_t(k.y)) * 0xC2B2AE3D27D4EB4FULL) ^
                      (std::uint64_t(std::uint32_t(k.z)) * 0x165667B19E3779F9ULL);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Real 3-vector.
using Vec3 = std::array<double, 3>;

/// Complex 3-vector: one Fourier coefficient of a vector field.
struct CVec3 {
  std::array<Complex, 3> c{};

  Complex& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  const Complex& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  CVec3& operator+=(const CVec3& o) {
    for (int i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
  }
  CVec3& operator-=(const CVec3& o) {
    for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
    return *this;
  }
  CVec3& operator*=(Complex s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  double norm2() const { return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]); }
  double norm() const { return std::sqrt(norm2()); }
  bool is_zero() const { return c[0] == Complex{} && c[1] == Complex{} && c[2] == Complex{}; }

  CVec3 conj() const { return {{std::conj(c[0]), std::conj(c[1]), std::conj(c[2])}}; }

  /// k . v with integer k.
  Complex dot(Frequency k) const { return double(k.x) * c[0] + double(k.y) * c[1] + double(k.z) * c[2]; }

  static CVec3 real(const Vec3& v) { return {{Complex(v[0]), Complex(v[1]), Complex(v[2])}}; }
};

inline CVec3 operator+(CVec3 a, const CVec3& b) { return a += b; }
inline CVec3 operator-(CVec3 a, const CVec3& b) { return a -= b; }
inline CVec3 operator*(Complex s, CVec3 a) { return a *= s; }
inline CVec3 operator*(double s, CVec3 a) { return a *= Complex(s); }

/// Bilinear (non-conjugating) dot product sum_m a_m b_m.
inline Complex bilinear_dot(const CVec3& a, const CVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Hermitian inner product sum_m a_m conj(b_m).
inline Complex hermitian_dot(const CVec3& a, const CVec3& b) {
  return a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]) + a[2] * std::conj(b[2]);
}

}  // namespace hyperns
