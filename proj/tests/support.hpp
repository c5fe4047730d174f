#pragma once

// Random field generators shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hyperns/spectral_core.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns::testing {

using Rng = std::mt19937_64;

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

/// Representative of each conjugate pair: the first nonzero coordinate is positive.
inline bool upper_half(Frequency k) {
  if (k.x != 0) return k.x > 0;
  if (k.y != 0) return k.y > 0;
  return k.z > 0;
}

/// Adds v at k and conj(v) at -k.
inline void add_pair(std::vector<SpectralEntry>& out, Frequency k, const CVec3& v) {
  out.push_back({k, v});
  out.push_back({-k, v.conj()});
}

/// Real field with `modes` random conjugate pairs in the cube |k_i| <= kmax.
/// Divergence-free when solenoidal is set.
inline SparseSpectralField random_field(Rng& rng, int kmax, int modes, bool solenoidal = true) {
  std::uniform_int_distribution<int> coord(-kmax, kmax);
  std::vector<SpectralEntry> entries;
  std::vector<Frequency> used;
  while (int(used.size()) < modes) {
    Frequency k{coord(rng), coord(rng), coord(rng)};
    if (k.is_zero() || !upper_half(k)) continue;
    bool seen = false;
    for (auto u : used) seen = seen || u == k;
    if (seen) continue;
    used.push_back(k);
    CVec3 v{{gaussian_complex(rng), gaussian_complex(rng), gaussian_complex(rng)}};
    if (solenoidal) v = apply_leray(k, v);
    add_pair(entries, k, v);
  }
  return SparseSpectralField(std::move(entries));
}

/// Every frequency of shell q in the upper half space.
inline std::vector<Frequency> shell_representatives(int q) {
  const int r = int(std::ceil(1.5 * dyadic(q)));
  std::vector<Frequency> out;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      for (int z = -r; z <= r; ++z) {
        const Frequency k{x, y, z};
        if (upper_half(k) && shell_of(k) == q) out.push_back(k);
      }
  return out;
}

/// Gaussian divergence-free field over all of shell q.
inline SparseSpectralField gaussian_shell_field(Rng& rng, int q) {
  std::vector<SpectralEntry> entries;
  for (auto k : shell_representatives(q)) {
    CVec3 v{{gaussian_complex(rng), gaussian_complex(rng), gaussian_complex(rng)}};
    add_pair(entries, k, apply_leray(k, v));
  }
  return SparseSpectralField(std::move(entries));
}

/// Phase-aligned field on a random fraction of shell q: every mode carries p(k) d
/// for one real direction d, so all of them add up at x = 0.
inline SparseSpectralField coherent_shell_field(Rng& rng, int q) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> g;
  Vec3 d{g(rng), g(rng), g(rng)};
  const double dn = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  for (auto& c : d) c /= dn;
  const double keep = 0.05 + 0.95 * unit(rng);
  std::vector<SpectralEntry> entries;
  for (auto k : shell_representatives(q)) {
    if (unit(rng) > keep) continue;
    const Vec3 p = apply_leray(k, d);
    add_pair(entries, k, CVec3{{p[0], p[1], p[2]}});
  }
  return SparseSpectralField(std::move(entries));
}

struct BernsteinCalibration {
  double max_ratio = 0.0;
  int samples = 0;
};

/// Largest Bernstein ratio over `samples` shell fields (q in {2, 3}, Gaussian and
/// coherent alternating) for the exponent pairs (2,4), (2,inf), (4,inf).
inline BernsteinCalibration calibrate_bernstein(std::uint64_t seed, int samples) {
  Rng rng(seed);
  BernsteinCalibration out;
  const double inf = std::numeric_limits<double>::infinity();
  const double pairs[3][2] = {{2.0, 4.0}, {2.0, inf}, {4.0, inf}};
  for (int s = 0; s < samples; ++s) {
    const int q = 2 + (s / 2) % 2;
    const SparseSpectralField u = s % 2 ? coherent_shell_field(rng, q) : gaussian_shell_field(rng, q);
    if (u.empty()) continue;
    for (const auto& p : pairs) out.max_ratio = std::max(out.max_ratio, bernstein_ratio(u, p[0], p[1]));
    ++out.samples;
  }
  return out;
}

}  // namespace hyperns::testing
