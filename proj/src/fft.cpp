#include "hyperns/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperns {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void ensure_threads_initialized() {
  static std::once_flag once;
  std::call_once(once, [] {
    fftw_init_threads();
    fftw_plan_with_nthreads(fft_thread_count());
  });
}

}  // namespace

int fft_thread_count() {
  static const int count = [] {
    const char* env = std::getenv("HYPERNS_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
  }();
  return count;
}

int fft_friendly_size(int m) {
  for (int c = std::max(m, 2);; ++c) {
    if (c % 2) continue;
    int r = c;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return c;
  }
}

int next_power_of_two(int m) {
  int p = 1;
  while (p < m) p *= 2;
  return p;
}

Fft3::Fft3(int n) : n_(n) {
  if (n < 2 || n % 2) throw std::invalid_argument("Fft3: grid size must be even and >= 2, got " + std::to_string(n));
  ensure_threads_initialized();
  const std::size_t doubles = 2 * spectrum_size();
  data_ = static_cast<double*>(fftw_malloc(sizeof(double) * doubles));
  if (!data_) throw std::bad_alloc();
  std::lock_guard lock(planner_mutex());
  auto* spec = reinterpret_cast<fftw_complex*>(data_);
  forward_ = fftw_plan_dft_r2c_3d(n, n, n, data_, spec, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_3d(n, n, n, spec, data_, FFTW_ESTIMATE);
  clear();
}

Fft3::~Fft3() {
  if (forward_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  }
  if (data_) fftw_free(data_);
}

Fft3::Fft3(Fft3&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      data_(std::exchange(other.data_, nullptr)),
      forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)) {}

Fft3& Fft3::operator=(Fft3&& other) noexcept {
  if (this != &other) {
    Fft3 tmp(std::move(other));
    std::swap(n_, tmp.n_);
    std::swap(data_, tmp.data_);
    std::swap(forward_, tmp.forward_);
    std::swap(backward_, tmp.backward_);
  }
  return *this;
}

std::span<Complex> Fft3::spectrum() { return {reinterpret_cast<Complex*>(data_), spectrum_size()}; }

std::span<const Complex> Fft3::spectrum() const {
  return {reinterpret_cast<const Complex*>(data_), spectrum_size()};
}

void Fft3::clear() { std::memset(data_, 0, sizeof(double) * 2 * spectrum_size()); }

void Fft3::to_real() { fftw_execute(static_cast<fftw_plan>(backward_)); }

void Fft3::to_spectrum() {
  fftw_execute(static_cast<fftw_plan>(forward_));
  const double scale = 1.0 / (double(n_) * n_ * n_);
  for (auto& c : spectrum()) c *= scale;
}

BandedFft3::BandedFft3(int n, int band) : n_(n), band_(band) {
  if (n < 2 || n % 2) throw std::invalid_argument("BandedFft3: grid size must be even and >= 2");
  if (band < 0 || 2 * band >= n) throw std::invalid_argument("BandedFft3: band must satisfy 0 <= 2 band < n");
  ensure_threads_initialized();
  data_ = static_cast<double*>(fftw_malloc(sizeof(double) * padded_real_size()));
  if (!data_) throw std::bad_alloc();
  clear();

  const int nz = nz_complex();
  const int kept = band + 1;
  auto* spec = reinterpret_cast<fftw_complex*>(data_);
  auto* upper = spec + std::size_t(n - band) * nz;
  // x lines carrying ky in [0, band] and in [n - band, n), kz in [0, band].
  fftw_iodim along_x{n, n * nz, n * nz};
  fftw_iodim low_rows[2] = {{kept, nz, nz}, {kept, 1, 1}};
  fftw_iodim high_rows[2] = {{band, nz, nz}, {kept, 1, 1}};
  // y lines for every x, kz in [0, band].
  fftw_iodim along_y{n, nz, nz};
  fftw_iodim planes[2] = {{n, n * nz, n * nz}, {kept, 1, 1}};
  // z lines, full length; strides are in complex units on the spectral side.
  fftw_iodim along_z{n, 1, 1};
  fftw_iodim rows_c2r{n * n, nz, 2 * nz};
  fftw_iodim rows_r2c{n * n, 2 * nz, nz};

  std::lock_guard lock(planner_mutex());
  inverse_[0] = fftw_plan_guru_dft(1, &along_x, 2, low_rows, spec, spec, FFTW_BACKWARD, FFTW_ESTIMATE);
  inverse_[1] = band > 0 ? fftw_plan_guru_dft(1, &along_x, 2, high_rows, upper, upper, FFTW_BACKWARD, FFTW_ESTIMATE)
                         : nullptr;
  inverse_[2] = fftw_plan_guru_dft(1, &along_y, 2, planes, spec, spec, FFTW_BACKWARD, FFTW_ESTIMATE);
  inverse_[3] = fftw_plan_guru_dft_c2r(1, &along_z, 1, &rows_c2r, spec, data_, FFTW_ESTIMATE);
  forward_[0] = fftw_plan_guru_dft_r2c(1, &along_z, 1, &rows_r2c, data_, spec, FFTW_ESTIMATE);
  forward_[1] = fftw_plan_guru_dft(1, &along_y, 2, planes, spec, spec, FFTW_FORWARD, FFTW_ESTIMATE);
  forward_[2] = fftw_plan_guru_dft(1, &along_x, 2, low_rows, spec, spec, FFTW_FORWARD, FFTW_ESTIMATE);
  forward_[3] = band > 0 ? fftw_plan_guru_dft(1, &along_x, 2, high_rows, upper, upper, FFTW_FORWARD, FFTW_ESTIMATE)
                         : nullptr;
  for (int i = 0; i < 4; ++i)
    if ((!inverse_[i] && !(i == 1 && band == 0)) || (!forward_[i] && !(i == 3 && band == 0)))
      throw std::runtime_error("BandedFft3: FFTW planning failed");
}

BandedFft3::~BandedFft3() {
  {
    std::lock_guard lock(planner_mutex());
    for (void* p : inverse_)
      if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
    for (void* p : forward_)
      if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
  }
  if (data_) fftw_free(data_);
}

void BandedFft3::clear() { std::memset(data_, 0, sizeof(double) * padded_real_size()); }

void BandedFft3::to_real() {
  for (void* p : inverse_)
    if (p) fftw_execute(static_cast<fftw_plan>(p));
}

void BandedFft3::to_spectrum() {
  for (void* p : forward_)
    if (p) fftw_execute(static_cast<fftw_plan>(p));
}

}  // namespace hyperns
