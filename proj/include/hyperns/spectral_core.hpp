#pragma once

#include <array>
#include <vector>

#include "hyperns/dense_field.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns {

/// lambda_q = 2^q.
inline double dyadic(int q) { return std::ldexp(1.0, q); }

/// Sharp dyadic shell: q >= 1 holds (3/2) lambda_{q-1} < |k| <= (3/2) lambda_q,
/// q = 0 holds |k| <= 3/2. Evaluated in exact integer arithmetic.
int shell_of(Frequency k);

using LerayMatrix = std::array<std::array<double, 3>, 3>;

/// p(k) = id - k (x) k / |k|^2, with p(0) = id.
LerayMatrix leray_symbol(Frequency k);
CVec3 apply_leray(Frequency k, const CVec3& v);
Vec3 apply_leray(Frequency k, const Vec3& v);

SparseSpectralField project_leray(const SparseSpectralField& u);

/// Littlewood-Paley pieces under the sharp convention.
SparseSpectralField lp_project(const SparseSpectralField& u, int q);
/// u_{q-1} + u_q + u_{q+1}.
SparseSpectralField extended_lp(const SparseSpectralField& u, int q);
/// sum_{p <= q} u_p.
SparseSpectralField ball_project(const SparseSpectralField& u, int q);

/// u_hat(k) -> |k|^beta u_hat(k). Throws std::domain_error for beta < 0 when
/// the zero mode is present.
SparseSpectralField fractional_multiplier(const SparseSpectralField& u, double beta);

/// Sum_k |k|^{2 beta} |u_hat(k)|^2, i.e. || |nabla|^beta u ||_2^2 by Plancherel.
double homogeneous_sobolev_norm2(const SparseSpectralField& u, double beta);

/// Normalized-measure L^r norm from grid samples; r = infinity gives the grid
/// maximum of the pointwise Euclidean magnitude. Throws for r < 1.
double lr_norm(const DenseGridField& u, double r);

/// Same quantity without materializing all three components at once: one
/// transform buffer plus one accumulator of n^3 doubles. Pass
/// std::numeric_limits<double>::infinity() for the sup norm.
double lr_norm(const SparseSpectralField& u, double r, int n);

/// Default grid for norms of u: smallest power of two >= 3 max|k_i| + 1 (at least 8).
int default_grid_size(const SparseSpectralField& u);

struct BesovReport {
  double value = 0.0;                 // sup over shells
  std::vector<double> per_shell;      // lambda_q^s |u_q|_r, q = 0..q_max
};

/// sup_{0 <= q <= q_max} lambda_q^s |u_q|_r. r = 2 uses Plancherel; other r use
/// grid quadrature on default_grid_size(u_q).
BesovReport besov_norm(const SparseSpectralField& u, double s, double r, int q_max);

/// Artifact-wide Bernstein constant for shell-supported fields, frozen from a
/// seeded calibration (twice the largest ratio seen over 1000 random shell
/// fields). tests/test_spectral_core.cpp reruns that calibration.
inline constexpr double kBernsteinConstant = 2.0 * 2.8903575327;

/// |u_q|_{r2} / (lambda_q^{3(1/r - 1/r2)} |u_q|_r) for u_q supported in shell q.
/// Throws std::invalid_argument unless r2 > r and the support is one shell.
double bernstein_ratio(const SparseSpectralField& uq, double r, double r2, int n = 0);

}  // namespace hyperns
