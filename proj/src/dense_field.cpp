#include "hyperns/dense_field.hpp"

#include <stdexcept>
#include <string>

namespace hyperns {

void scatter_component(const SparseSpectralField& u, int component, Fft3& fft) {
  const int n = fft.n();
  if (u.max_abs_frequency() >= n / 2)
    throw std::invalid_argument("grid of size " + std::to_string(n) + " does not resolve frequency " +
                                std::to_string(u.max_abs_frequency()));
  fft.clear();
  auto spec = fft.spectrum();
  for (const auto& e : u.entries()) {
    if (e.k.z < 0) continue;
    spec[fft.spectral_index(e.k)] = e.coeff[component];
  }
}

DenseGridField DenseGridField::from_sparse(const SparseSpectralField& u, int n) {
  DenseGridField out;
  out.n_ = n;
  Fft3 fft(n);
  for (int c = 0; c < 3; ++c) {
    scatter_component(u, c, fft);
    auto spec = fft.spectrum();
    out.spectra_[c].assign(spec.begin(), spec.end());
    fft.to_real();
    auto& s = out.samples_[c];
    s.resize(out.point_count());
    const double* data = fft.real_data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s[(std::size_t(i) * n + j) * n + l] = data[fft.real_index(i, j, l)];
  }
  return out;
}

DenseGridField DenseGridField::from_samples(int n, std::array<std::vector<double>, 3> samples) {
  DenseGridField out;
  out.n_ = n;
  Fft3 fft(n);
  for (int c = 0; c < 3; ++c) {
    if (samples[c].size() != out.point_count())
      throw std::invalid_argument("DenseGridField: sample count does not match n^3");
    double* data = fft.real_data();
    const auto& s = samples[c];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) data[fft.real_index(i, j, l)] = s[(std::size_t(i) * n + j) * n + l];
    fft.to_spectrum();
    auto spec = fft.spectrum();
    out.spectra_[c].assign(spec.begin(), spec.end());
  }
  out.samples_ = std::move(samples);
  return out;
}

CVec3 DenseGridField::coefficient(Frequency k) const {
  const int h = n_ / 2;
  if (k.max_abs() > h) return {};
  const bool flip = k.z < 0;
  const Frequency kk = flip ? -k : k;
  const int ix = kk.x < 0 ? kk.x + n_ : kk.x;
  const int iy = kk.y < 0 ? kk.y + n_ : kk.y;
  const std::size_t idx = (std::size_t(ix) * n_ + std::size_t(iy)) * std::size_t(h + 1) + std::size_t(kk.z);
  CVec3 c{{spectra_[0][idx], spectra_[1][idx], spectra_[2][idx]}};
  return flip ? c.conj() : c;
}

SparseSpectralField DenseGridField::to_sparse(double drop_tol) const {
  std::vector<SpectralEntry> out;
  const int h = n_ / 2;
  for (int kx = -h + 1; kx < h; ++kx)
    for (int ky = -h + 1; ky < h; ++ky)
      for (int kz = -h + 1; kz < h; ++kz) {
        const Frequency k{kx, ky, kz};
        const CVec3 c = coefficient(k);
        if (c.norm() > drop_tol) out.push_back({k, c});
      }
  return SparseSpectralField(std::move(out));
}

}  // namespace hyperns
