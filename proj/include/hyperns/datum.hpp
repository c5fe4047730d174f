#pragma once

#include <span>
#include <string>
#include <vector>

#include "hyperns/field_io.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns {

/// Admissible dissipation exponents: [1, 5/4).
inline constexpr double kAlphaMin = 1.0;
inline constexpr double kAlphaMax = 1.25;

struct PairCheck {
  int q_lo = 0;
  int q_hi = 0;
  double value = 0.0;  // lambda_{q_lo}^{2 alpha} lambda_{q_hi}^{4 alpha - 5}
  bool pass = false;   // value < 1
};

struct SequenceReport {
  double alpha = 0.0;
  std::vector<int> qs;
  std::vector<PairCheck> pairs;
  bool admissible = true;
};

/// Throws ConfigError when alpha is outside [1, 5/4) ("exponent out of the
/// paper's range"), when qs is empty or not strictly increasing, or when q_1 < 2.
/// Spacing failures are reported, not thrown.
SequenceReport validate_sequence(double alpha, std::span<const int> qs);

struct SequenceSpec {
  double alpha = 1.0;
  std::vector<int> qs;
  bool relaxed = false;  // build even when the spacing condition fails
};

struct DatumConfig {
  SequenceSpec sequence;
  double multiplier = 1.0;
};

/// Closed integer box [lo, hi] in Z^3.
struct IntBox {
  Frequency lo;
  Frequency hi;

  std::size_t count() const;
  bool contains(Frequency k) const {
    return k.x >= lo.x && k.x <= hi.x && k.y >= lo.y && k.y <= hi.y && k.z >= lo.z && k.z <= hi.z;
  }
  /// Integer points in lexicographic order.
  std::vector<Frequency> points() const;
};

/// Integer points of [num/den * 2^q ... ] style bounds: ceil and floor of
/// (num * 2^q) / den computed exactly.
int ceil_scaled(int num, int q, int den);
int floor_scaled(int num, int q, int den);

struct BlockFamily {
  int j = 1;
  int q = 0;  // q_j
  IntBox a_box, b_box, c_box;
  std::vector<Frequency> A, B, C;
  std::vector<Frequency> Astar, Bstar, Cstar;
};

/// Lattice blocks for one shell index q_j >= 2. C = A + B is again an integer box.
BlockFamily build_blocks(int q, int j = 1);

/// U_{q_j} (shell q_j) and U_{q_j - 1} (shell q_j - 1). Both share the amplitude
/// multiplier * lambda_{q_j}^{2 alpha - 4}.
struct ComponentPair {
  int q = 0;
  SparseSpectralField top;
  SparseSpectralField below;

  SparseSpectralField extended() const { return top + below; }
};

ComponentPair build_component_pair(int q, double alpha, double multiplier = 1.0);

struct ShellPlacement {
  int j = 0;
  int q = 0;
  bool top_in_shell = false;    // every mode of U_{q_j} in shell q_j
  bool below_in_shell = false;  // every mode of U_{q_j - 1} in shell q_j - 1
  bool next_shell_empty = false;  // U has no modes in shell q_j + 1
};

struct Datum {
  DatumConfig config;
  SequenceReport admissibility;
  std::vector<ComponentPair> components;  // index j - 1
  SparseSpectralField field;

  int count() const { return static_cast<int>(components.size()); }
  const ComponentPair& component(int j) const;
  /// sum_{k <= j} (U_{q_k} + U_{q_k - 1}); j = 0 gives the empty field.
  SparseSpectralField partial_sum(int j) const;
  std::vector<ShellPlacement> placement() const;
};

/// Throws ConfigError for an inadmissible sequence unless relaxed, and for
/// sequences whose components would share a shell ("overlapping supports").
Datum assemble_datum(const DatumConfig& config);

struct ShellL2 {
  int j = 0;
  int q = 0;
  double l2 = 0.0;     // |U_{q_j}|_2
  double ratio = 0.0;  // l2 / lambda_{q_j}^{2 alpha - 5/2}
};

ShellL2 shell_l2_exact(const Datum& datum, int j);
ShellL2 shell_l2_exact(const ComponentPair& pair, double alpha);

/// D_N(x) = sum_{|k| <= N} e^{ikx}.
double dirichlet_kernel(int n, double x);

/// Normalized-measure L^r norm of D_N by periodic quadrature on `points`
/// nodes (0 picks a size adequate for r).
double dirichlet_norm(int n, double r, int points = 0);

/// Frozen constant for |D_N|_r <= C_D N^{1 - 1/r}: twice the largest ratio
/// over N <= 64, r in {2, 4, 8}. tests/test_datum.cpp reruns the calibration.
inline constexpr double kDirichletConstant = 2.0 * 2.4016983108;

struct DirichletCheck {
  int n = 0;
  double r = 0.0;
  double norm = 0.0;
  double bound = 0.0;  // N^{1 - 1/r}
  double ratio = 0.0;
  bool pass = false;   // norm <= kDirichletConstant * bound
};

/// Throws std::invalid_argument for r <= 1 or N < 1.
DirichletCheck dirichlet_norm_check(int n, double r);

struct BoxFactorization {
  double norm3d = 0.0;      // |(chi_box)^vee|_r from a 3-D grid
  double product_1d = 0.0;  // product of the three 1-D factor norms on the same grid
  bool pass = false;        // norm3d <= product_1d up to rounding
};

/// |(chi_box)^vee|_r against the product of its 1-D factors on an n^3 grid.
BoxFactorization box_factorization_check(const IntBox& box, double r, int n);

json datum_metadata(const Datum& datum);

struct NormScalingRow {
  int q = 0;
  int grid = 0;         // 0 when the norm is an exact Plancherel sum
  double norm = 0.0;    // |U_q|_r
  double scaled = 0.0;  // lambda_q^{1 + 3/r - 2 alpha} |U_q|_r
};

struct NormScalingReport {
  double alpha = 0.0;
  double r = 0.0;
  std::vector<NormScalingRow> rows;
  double slope = 0.0;     // least-squares slope of log2 |U_q|_r against q
  double expected = 0.0;  // 2 alpha - 1 - 3/r
};

/// |U_q|_r over standalone pairs; r = 2 uses Plancherel, other r the grid of
/// default_grid_size (grid maximum for r = inf).
NormScalingReport lr_scaling_study(double alpha, const std::vector<int>& q_range, double r);
json to_json(const NormScalingReport& r);

}  // namespace hyperns
