#include "hyperns/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyperns {

int shell_of(Frequency k) {
  const std::int64_t four_k2 = 4 * k.norm2();
  std::int64_t bound = 9;  // 4 * (3/2 lambda_q)^2 at q = 0
  int q = 0;
  while (four_k2 > bound) {
    bound *= 4;
    ++q;
  }
  return q;
}

LerayMatrix leray_symbol(Frequency k) {
  LerayMatrix p{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  if (k.is_zero()) return p;
  const double inv = 1.0 / static_cast<double>(k.norm2());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p[i][j] -= double(k[i]) * double(k[j]) * inv;
  return p;
}

CVec3 apply_leray(Frequency k, const CVec3& v) {
  if (k.is_zero()) return v;
  const Complex s = v.dot(k) / static_cast<double>(k.norm2());
  return {{v[0] - s * double(k.x), v[1] - s * double(k.y), v[2] - s * double(k.z)}};
}

Vec3 apply_leray(Frequency k, const Vec3& v) {
  if (k.is_zero()) return v;
  const double s = (v[0] * k.x + v[1] * k.y + v[2] * k.z) / static_cast<double>(k.norm2());
  return {v[0] - s * k.x, v[1] - s * k.y, v[2] - s * k.z};
}

SparseSpectralField project_leray(const SparseSpectralField& u) {
  return u.transformed([](Frequency k, const CVec3& c) { return apply_leray(k, c); });
}

SparseSpectralField lp_project(const SparseSpectralField& u, int q) {
  return u.filtered([q](Frequency k) { return shell_of(k) == q; });
}

SparseSpectralField extended_lp(const SparseSpectralField& u, int q) {
  return u.filtered([q](Frequency k) {
    const int s = shell_of(k);
    return s >= q - 1 && s <= q + 1;
  });
}

SparseSpectralField ball_project(const SparseSpectralField& u, int q) {
  return u.filtered([q](Frequency k) { return shell_of(k) <= q; });
}

SparseSpectralField fractional_multiplier(const SparseSpectralField& u, double beta) {
  if (beta == 0.0) return u;
  if (beta < 0.0 && u.find(Frequency{}) != nullptr) throw std::domain_error("singular at zero frequency");
  return u.transformed([beta](Frequency k, const CVec3& c) {
    if (k.is_zero()) return CVec3{};
    return std::pow(static_cast<double>(k.norm2()), 0.5 * beta) * c;
  });
}

double homogeneous_sobolev_norm2(const SparseSpectralField& u, double beta) {
  double s = 0.0;
  for (const auto& e : u.entries()) {
    if (e.k.is_zero()) continue;
    s += std::pow(static_cast<double>(e.k.norm2()), beta) * e.coeff.norm2();
  }
  return s;
}

namespace {

void check_exponent(double r) {
  if (!(r >= 1.0) || std::isnan(r)) throw std::invalid_argument("L^r norm needs r >= 1");
}

double reduce_magnitudes(const std::vector<double>& mag2, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : mag2) m = std::max(m, v);
    return std::sqrt(m);
  }
  double s = 0.0;
  if (r == 2.0) {
    for (double v : mag2) s += v;
  } else {
    for (double v : mag2) s += std::pow(v, 0.5 * r);
  }
  return std::pow(s / double(mag2.size()), 1.0 / r);
}

}  // namespace

double lr_norm(const DenseGridField& u, double r) {
  check_exponent(r);
  std::vector<double> mag2(u.point_count());
  for (int c = 0; c < 3; ++c) {
    auto s = u.samples(c);
    for (std::size_t i = 0; i < mag2.size(); ++i) mag2[i] += s[i] * s[i];
  }
  return reduce_magnitudes(mag2, r);
}

double lr_norm(const SparseSpectralField& u, double r, int n) {
  check_exponent(r);
  if (u.empty()) return 0.0;
  Fft3 fft(n);
  std::vector<double> mag2(fft.real_size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    bool any = false;
    for (const auto& e : u.entries()) any = any || e.coeff[c] != Complex{};
    if (!any) continue;
    scatter_component(u, c, fft);
    fft.to_real();
    const double* data = fft.real_data();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* row = data + fft.real_index(i, j, 0);
        for (int l = 0; l < n; ++l, ++idx) mag2[idx] += row[l] * row[l];
      }
  }
  return reduce_magnitudes(mag2, r);
}

int default_grid_size(const SparseSpectralField& u) {
  return std::max(8, next_power_of_two(3 * u.max_abs_frequency() + 1));
}

BesovReport besov_norm(const SparseSpectralField& u, double s, double r, int q_max) {
  check_exponent(r);
  BesovReport report;
  report.per_shell.assign(std::size_t(std::max(q_max, 0) + 1), 0.0);
  for (int q = 0; q <= q_max; ++q) {
    const auto uq = lp_project(u, q);
    if (uq.empty()) continue;
    const double norm = r == 2.0 ? uq.l2_norm() : lr_norm(uq, r, default_grid_size(uq));
    report.per_shell[std::size_t(q)] = std::pow(dyadic(q), s) * norm;
    report.value = std::max(report.value, report.per_shell[std::size_t(q)]);
  }
  return report;
}

double bernstein_ratio(const SparseSpectralField& uq, double r, double r2, int n) {
  check_exponent(r);
  if (!(r2 > r)) throw std::invalid_argument("bernstein_ratio needs r' > r");
  if (uq.empty()) throw std::invalid_argument("bernstein_ratio of the zero field");
  const int q = shell_of(uq.entries().front().k);
  for (const auto& e : uq.entries())
    if (shell_of(e.k) != q) throw std::invalid_argument("bernstein_ratio: field is not supported in one shell");
  if (n == 0) n = default_grid_size(uq);
  const double lo = r == 2.0 ? uq.l2_norm() : lr_norm(uq, r, n);
  const double hi = lr_norm(uq, r2, n);
  const double inv_r2 = std::isinf(r2) ? 0.0 : 1.0 / r2;
  return hi / (std::pow(dyadic(q), 3.0 * (1.0 / r - inv_r2)) * lo);
}

}  // namespace hyperns
