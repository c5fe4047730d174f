#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "hyperns/frequency.hpp"

namespace hyperns {

/// Number of threads handed to FFTW, read once from HYPERNS_THREADS (default 1).
int fft_thread_count();

/// Smallest integer >= m whose only prime factors are 2, 3 and 5, and which is even.
int fft_friendly_size(int m);

/// Smallest power of two >= m.
int next_power_of_two(int m);

/// In-place real <-> half-spectrum 3-D transform on an n^3 periodic grid
/// sampling [0, 2pi)^3 at x_j = 2 pi j / n.
///
/// Normalization follows u(x) = sum_k c_k e^{i k.x}: to_real() evaluates that
/// sum on the grid and to_spectrum() recovers c_k (divided by n^3).
/// Planning uses FFTW_ESTIMATE so that repeated runs execute identical plans.
class Fft3 {
 public:
  explicit Fft3(int n);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;
  Fft3(Fft3&& other) noexcept;
  Fft3& operator=(Fft3&& other) noexcept;

  int n() const { return n_; }
  int nz_complex() const { return n_ / 2 + 1; }
  std::size_t spectrum_size() const { return std::size_t(n_) * n_ * nz_complex(); }
  std::size_t real_size() const { return std::size_t(n_) * n_ * n_; }

  std::span<Complex> spectrum();
  std::span<const Complex> spectrum() const;
  double* real_data() { return data_; }
  const double* real_data() const { return data_; }

  /// Offset of grid point (i, j, l) in real_data(); rows are padded.
  std::size_t real_index(int i, int j, int l) const {
    return (std::size_t(i) * n_ + std::size_t(j)) * std::size_t(2 * nz_complex()) + std::size_t(l);
  }
  /// Offset of stored wavenumber (kx, ky, kz >= 0) in spectrum().
  std::size_t spectral_index(Frequency k) const {
    const int ix = k.x < 0 ? k.x + n_ : k.x;
    const int iy = k.y < 0 ? k.y + n_ : k.y;
    return (std::size_t(ix) * n_ + std::size_t(iy)) * std::size_t(nz_complex()) + std::size_t(k.z);
  }
  /// Signed wavenumber represented by array index i along x or y.
  int signed_wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

  void clear();
  void to_real();
  void to_spectrum();

 private:
  int n_ = 0;
  double* data_ = nullptr;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Fft3-layout transform restricted to the cube |k_i| <= band.
///
/// to_real() assumes every stored coefficient outside the cube is zero and
/// skips the lines that would only move zeros. to_spectrum() produces correct
/// values inside the cube only; entries outside it are left holding partial
/// transforms. Both are about 30% cheaper than the full transform when band
/// is near n / 3.
class BandedFft3 {
 public:
  BandedFft3(int n, int band);
  ~BandedFft3();
  BandedFft3(const BandedFft3&) = delete;
  BandedFft3& operator=(const BandedFft3&) = delete;

  int n() const { return n_; }
  int band() const { return band_; }
  int nz_complex() const { return n_ / 2 + 1; }
  std::size_t spectrum_size() const { return std::size_t(n_) * n_ * nz_complex(); }
  std::size_t padded_real_size() const { return std::size_t(n_) * n_ * 2 * nz_complex(); }

  Complex* spectrum() { return reinterpret_cast<Complex*>(data_); }
  double* real_data() { return data_; }
  std::size_t spectral_index(Frequency k) const {
    const int ix = k.x < 0 ? k.x + n_ : k.x;
    const int iy = k.y < 0 ? k.y + n_ : k.y;
    return (std::size_t(ix) * n_ + std::size_t(iy)) * std::size_t(nz_complex()) + std::size_t(k.z);
  }

  void clear();
  void to_real();
  void to_spectrum();  // unscaled: returns n^3 c_k

 private:
  int n_ = 0;
  int band_ = 0;
  double* data_ = nullptr;
  void* inverse_[4] = {};
  void* forward_[4] = {};
};

}  // namespace hyperns
