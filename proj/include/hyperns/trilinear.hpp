#pragma once

#include <optional>
#include <vector>

#include "hyperns/datum.hpp"
#include "hyperns/dense_field.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns {

struct Triad {
  Frequency xi, eta, zeta;  // xi + eta + zeta = 0
  Complex contribution;
};

enum class TriadRetention {
  kOff,
  kAuto,  // keep the breakdown while it stays under kAutoRetentionLimit triads
  kOn,    // keep everything; throws beyond kRetentionCap
};

inline constexpr std::size_t kAutoRetentionLimit = 100'000;
inline constexpr std::size_t kRetentionCap = 10'000'000;

struct TriadTerm {
  double value = 0.0;
  double imag = 0.0;       // should vanish for Hermitian inputs
  double magnitude = 0.0;  // sum of |contribution|, the natural rounding scale
  std::size_t triads = 0;
  std::vector<Triad> breakdown;  // empty unless retained
};

/// u (x) v : grad w = (2pi)^{-3} int v_i d_i w_j u_j dx
///   = sum_{xi + eta + zeta = 0} u_hat_m(xi) v_hat_i(eta) (i zeta_i) w_hat_m(zeta).
///
/// Iterates the two smaller supports and probes the largest one; the outer
/// loop is split into fft_thread_count() contiguous chunks whose partial sums
/// are added in chunk order.
TriadTerm tri_terms(const SparseSpectralField& u, const SparseSpectralField& v, const SparseSpectralField& w,
                    TriadRetention retention = TriadRetention::kOff);

inline double tri(const SparseSpectralField& u, const SparseSpectralField& v, const SparseSpectralField& w) {
  return tri_terms(u, v, w).value;
}

/// The same integral by spectral differentiation, pointwise products and grid
/// quadrature. Throws std::invalid_argument("aliased product") unless
/// n >= 3 K + 1 with K the largest |k_i| carried by any of the fields.
double tri_dense_oracle(const DenseGridField& u, const DenseGridField& v, const DenseGridField& w);

struct ABCReport {
  int j = 0;
  int q = 0;
  double a_term = 0.0;  // sum_{k > j} tri(U~_{q_k}, U~_{q_k}, U_{q_j})
  double b_term = 0.0;  // tri(U_{q_j - 1}, U_{q_j}, U_{q_j})
  double c_term = 0.0;  // -tri(U_{q_j}, U_{q_j}, U_{<= q_{j-1}})
  double total = 0.0;   // tri(U, U, U_{q_j})
  std::optional<double> a_bound;  // lambda_{q_j}^{2a} lambda_{q_{j+1}}^{4a-5}, when j < J
  double b_scale = 0.0;           // lambda_{q_j}^{6a-5}
  std::optional<double> c_bound;  // lambda_{q_{j-1}}^{2a} lambda_{q_j}^{4a-5}, when j > 1

  double reconciliation_error() const;  // |A + B + C - total| / max(|total|, tiny)
  /// |B| / (|A| + |C|); infinite when both vanish.
  double dominance() const;
};

/// Throws std::out_of_range when j is not in 1..J.
ABCReport decompose_abc(const Datum& datum, int j);

struct BScalingRow {
  int q = 0;
  double b = 0.0;
  double log2_abs_b = 0.0;
  double ratio_to_previous = 0.0;  // B(q) / B(q - 1); 0 for the first row
};

struct BScalingReport {
  double alpha = 0.0;
  std::vector<BScalingRow> rows;
  double slope = 0.0;       // least-squares slope of log2 |B| against q
  double expected = 0.0;    // 6 alpha - 5
  bool all_positive = true;
};

/// Standalone pair (U_{q-1}, U_q) for each q; B = tri(U_{q-1}, U_q, U_q).
BScalingReport b_scaling_study(double alpha, const std::vector<int>& q_range);

json to_json(const ABCReport& r);
json to_json(const BScalingReport& r);

}  // namespace hyperns
