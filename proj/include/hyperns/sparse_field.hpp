#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperns/frequency.hpp"

namespace hyperns {

struct SpectralEntry {
  Frequency k;
  CVec3 coeff;
};

/// Fourier coefficients u_hat(k) of a vector field u(x) = sum_k u_hat(k) e^{i k.x}
/// on [0, 2pi]^3, stored sparsely.
///
/// Entries are kept sorted lexicographically by frequency, without duplicates
/// and without exact zeros. Hermitian symmetry is not enforced on construction
/// (fault-injection tests need asymmetric fields); use is_hermitian() to check.
class SparseSpectralField {
 public:
  SparseSpectralField() = default;

  /// Duplicated frequencies are summed; entries that end up exactly zero are dropped.
  explicit SparseSpectralField(std::vector<SpectralEntry> entries);

  std::span<const SpectralEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Coefficient at k, or nullptr when k is not stored.
  const CVec3* find(Frequency k) const;
  CVec3 at(Frequency k) const;

  /// Coefficientwise map; zero results are dropped.
  template <class F>
  SparseSpectralField transformed(F&& f) const {
    std::vector<SpectralEntry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.k, f(e.k, e.coeff)});
    return SparseSpectralField(std::move(out));
  }

  /// Keeps entries whose frequency satisfies pred.
  template <class P>
  SparseSpectralField filtered(P&& pred) const {
    SparseSpectralField out;
    for (const auto& e : entries_)
      if (pred(e.k)) out.entries_.push_back(e);
    return out;
  }

  /// Largest |k_i| over stored frequencies (0 for the empty field).
  int max_abs_frequency() const;

  /// Plancherel: |u|_2^2 under the normalized measure.
  double l2_norm2() const;
  double l2_norm() const;

  /// Worst |u_hat(-k) - conj(u_hat(k))| relative to |u_hat(k)|; a missing
  /// partner counts as relative defect 1.
  double hermitian_defect() const;
  bool is_hermitian(double rel_tol = 1e-12) const { return hermitian_defect() <= rel_tol; }

  /// Worst |k . u_hat(k)| / (|k| |u_hat(k)|) over nonzero k.
  double divergence_defect() const;
  bool is_divergence_free(double rel_tol = 1e-12) const { return divergence_defect() <= rel_tol; }

  friend SparseSpectralField operator+(const SparseSpectralField& a, const SparseSpectralField& b);
  friend SparseSpectralField operator-(const SparseSpectralField& a, const SparseSpectralField& b);
  friend SparseSpectralField operator*(Complex s, const SparseSpectralField& a);

  /// Real inner product (2pi)^{-3} int u . v dx = sum_k u_hat(k) . conj(v_hat(k)).
  friend double inner_product(const SparseSpectralField& u, const SparseSpectralField& v);

 private:
  std::vector<SpectralEntry> entries_;
};

/// Fast membership/lookup from frequency to the position of an entry in a field.
///
/// Uses a dense table over the bounding box when that box is not much larger
/// than the support, and a hash map otherwise.
class FrequencyIndex {
 public:
  explicit FrequencyIndex(const SparseSpectralField& field);

  /// Position of k in field.entries(), or -1.
  std::ptrdiff_t lookup(Frequency k) const {
    if (dense_) {
      const int ix = k.x - lo_.x, iy = k.y - lo_.y, iz = k.z - lo_.z;
      if (ix < 0 || iy < 0 || iz < 0 || ix >= ext_.x || iy >= ext_.y || iz >= ext_.z) return -1;
      return table_[(std::size_t(ix) * std::size_t(ext_.y) + std::size_t(iy)) * std::size_t(ext_.z) +
                    std::size_t(iz)];
    }
    auto it = map_.find(k);
    return it == map_.end() ? -1 : it->second;
  }

 private:
  bool dense_ = false;
  Frequency lo_{}, ext_{};
  std::vector<std::int32_t> table_;
  std::unordered_map<Frequency, std::ptrdiff_t, FrequencyHash> map_;
};

}  // namespace hyperns
