#pragma once

#include <array>
#include <span>
#include <vector>

#include "hyperns/fft.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns {

/// Three real components sampled on the uniform n^3 grid of [0, 2pi)^3,
/// together with their half-spectrum (kz >= 0, |kx|, |ky| <= n/2).
///
/// Samples are stored unpadded with index (i * n + j) * n + l, where i runs
/// along x1. Spectra use the Fft3 layout.
class DenseGridField {
 public:
  DenseGridField() = default;

  /// Requires max |k_i| < n/2 over the support of u.
  static DenseGridField from_sparse(const SparseSpectralField& u, int n);
  static DenseGridField from_samples(int n, std::array<std::vector<double>, 3> samples);

  int n() const { return n_; }
  std::size_t point_count() const { return std::size_t(n_) * n_ * n_; }

  std::span<const double> samples(int component) const { return samples_[std::size_t(component)]; }
  std::span<const Complex> spectrum(int component) const { return spectra_[std::size_t(component)]; }

  Vec3 sample(std::size_t index) const {
    return {samples_[0][index], samples_[1][index], samples_[2][index]};
  }

  /// Coefficient at k with |k_i| <= n/2; negative kz is read through conjugate symmetry.
  CVec3 coefficient(Frequency k) const;

  /// Coefficients with |k_i| < n/2 whose magnitude exceeds drop_tol.
  SparseSpectralField to_sparse(double drop_tol = 0.0) const;

 private:
  int n_ = 0;
  std::array<std::vector<double>, 3> samples_;
  std::array<std::vector<Complex>, 3> spectra_;
};

/// Writes the coefficients of one component of u into fft.spectrum()
/// (clearing it first). Requires max |k_i| < n/2.
void scatter_component(const SparseSpectralField& u, int component, Fft3& fft);

}  // namespace hyperns
