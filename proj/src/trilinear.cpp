#include "hyperns/trilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hyperns/fft.hpp"
#include "hyperns/fit.hpp"
#include "hyperns/spectral_core.hpp"

namespace hyperns {

namespace {

inline Complex triad_value(const CVec3& u, const CVec3& v, const CVec3& w, Frequency zeta) {
  const Complex advect = Complex(0.0, 1.0) * v.dot(zeta);
  return bilinear_dot(u, w) * advect;
}

struct Partial {
  Complex sum{};
  double magnitude = 0.0;
  std::size_t triads = 0;
  std::vector<Triad> kept;
  bool keep = false;
};

// Probe selects which slot (0 = u, 1 = v, 2 = w) is looked up; the other two
// are iterated, the first of them in [begin, end).
template <int Probe>
void accumulate_triads(const SparseSpectralField* slots[3], const FrequencyIndex& index, std::size_t begin,
                std::size_t end, TriadRetention retention, Partial& out) {
  constexpr int outer = Probe == 0 ? 1 : 0;
  constexpr int inner = Probe == 2 ? 1 : 2;
  const auto outer_entries = slots[outer]->entries();
  const auto inner_entries = slots[inner]->entries();
  const auto probe_entries = slots[Probe]->entries();
  out.keep = retention != TriadRetention::kOff;
  for (std::size_t a = begin; a < end; ++a) {
    const SpectralEntry& ea = outer_entries[a];
    for (const SpectralEntry& eb : inner_entries) {
      const Frequency kp = -(ea.k + eb.k);
      const std::ptrdiff_t hit = index.lookup(kp);
      if (hit < 0) continue;
      const SpectralEntry& ep = probe_entries[std::size_t(hit)];
      const SpectralEntry* by_slot[3];
      by_slot[outer] = &ea;
      by_slot[inner] = &eb;
      by_slot[Probe] = &ep;
      const Complex c = triad_value(by_slot[0]->coeff, by_slot[1]->coeff, by_slot[2]->coeff, by_slot[2]->k);
      out.sum += c;
      out.magnitude += std::abs(c);
      ++out.triads;
      if (out.keep) {
        if (retention == TriadRetention::kAuto && out.kept.size() >= kAutoRetentionLimit) {
          out.keep = false;
          out.kept.clear();
          out.kept.shrink_to_fit();
          continue;
        }
        if (out.kept.size() >= kRetentionCap)
          throw std::length_error("triad retention cap exceeded");
        out.kept.push_back({by_slot[0]->k, by_slot[1]->k, by_slot[2]->k, c});
      }
    }
  }
}

}  // namespace

TriadTerm tri_terms(const SparseSpectralField& u, const SparseSpectralField& v, const SparseSpectralField& w,
                    TriadRetention retention) {
  TriadTerm term;
  if (u.empty() || v.empty() || w.empty()) return term;

  const SparseSpectralField* slots[3] = {&u, &v, &w};
  int probe = 2;
  for (int s : {1, 0})
    if (slots[s]->size() > slots[probe]->size()) probe = s;
  const FrequencyIndex index(*slots[probe]);
  const int outer = probe == 0 ? 1 : 0;
  const std::size_t outer_size = slots[outer]->size();

  const int threads = std::min<int>(fft_thread_count(), int(std::max<std::size_t>(1, outer_size / 64)));
  std::vector<Partial> partials(static_cast<std::size_t>(threads));
  auto work = [&](int t) {
    const std::size_t begin = outer_size * std::size_t(t) / std::size_t(threads);
    const std::size_t end = outer_size * std::size_t(t + 1) / std::size_t(threads);
    auto& p = partials[std::size_t(t)];
    switch (probe) {
      case 0: accumulate_triads<0>(slots, index, begin, end, retention, p); break;
      case 1: accumulate_triads<1>(slots, index, begin, end, retention, p); break;
      default: accumulate_triads<2>(slots, index, begin, end, retention, p); break;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  Complex sum{};
  bool keep = retention != TriadRetention::kOff;
  std::size_t kept = 0;
  for (const auto& p : partials) {
    sum += p.sum;
    term.magnitude += p.magnitude;
    term.triads += p.triads;
    keep = keep && p.keep;
    kept += p.kept.size();
  }
  if (retention == TriadRetention::kAuto && kept > kAutoRetentionLimit) keep = false;
  if (keep) {
    term.breakdown.reserve(kept);
    for (auto& p : partials) term.breakdown.insert(term.breakdown.end(), p.kept.begin(), p.kept.end());
  }
  term.value = sum.real();
  term.imag = sum.imag();
  return term;
}

double tri_dense_oracle(const DenseGridField& u, const DenseGridField& v, const DenseGridField& w) {
  const int n = u.n();
  if (v.n() != n || w.n() != n) throw std::invalid_argument("tri_dense_oracle: grid sizes differ");

  // Largest wavenumber carried by any field, ignoring transform round-off.
  auto band = [n](const DenseGridField& f) {
    double peak = 0.0;
    for (int c = 0; c < 3; ++c)
      for (auto z : f.spectrum(c)) peak = std::max(peak, std::abs(z));
    int k_max = 0;
    if (peak == 0.0) return 0;
    const int nz = n / 2 + 1;
    for (int c = 0; c < 3; ++c) {
      auto spec = f.spectrum(c);
      for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        if (std::abs(spec[idx]) <= 1e-13 * peak) continue;
        const int kz = int(idx % std::size_t(nz));
        const int iy = int((idx / std::size_t(nz)) % std::size_t(n));
        const int ix = int(idx / (std::size_t(nz) * std::size_t(n)));
        const int kx = ix <= n / 2 ? ix : ix - n;
        const int ky = iy <= n / 2 ? iy : iy - n;
        k_max = std::max({k_max, std::abs(kx), std::abs(ky), kz});
      }
    }
    return k_max;
  };
  const int k_max = std::max({band(u), band(v), band(w)});
  if (n < 3 * k_max + 1) throw std::invalid_argument("aliased product");

  Fft3 fft(n);
  const std::size_t points = u.point_count();
  std::vector<double> advected(points);
  double total = 0.0;
  for (int m = 0; m < 3; ++m) {
    std::fill(advected.begin(), advected.end(), 0.0);
    for (int i = 0; i < 3; ++i) {
      auto src = w.spectrum(m);
      auto dst = fft.spectrum();
      const int nz = n / 2 + 1;
      for (std::size_t idx = 0; idx < dst.size(); ++idx) {
        const int kz = int(idx % std::size_t(nz));
        const int iy = int((idx / std::size_t(nz)) % std::size_t(n));
        const int ix = int(idx / (std::size_t(nz) * std::size_t(n)));
        int k = i == 0 ? fft.signed_wavenumber(ix) : (i == 1 ? fft.signed_wavenumber(iy) : kz);
        if ((i == 0 && ix == n / 2) || (i == 1 && iy == n / 2) || (i == 2 && kz == n / 2)) k = 0;
        dst[idx] = Complex(0.0, double(k)) * src[idx];
      }
      fft.to_real();
      const double* grad = fft.real_data();
      auto vi = v.samples(i);
      std::size_t p = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double* row = grad + fft.real_index(a, b, 0);
          for (int l = 0; l < n; ++l, ++p) advected[p] += vi[p] * row[l];
        }
    }
    auto um = u.samples(m);
    for (std::size_t p = 0; p < points; ++p) total += um[p] * advected[p];
  }
  return total / double(points);
}

double ABCReport::reconciliation_error() const {
  const double scale = std::max({std::abs(total), std::abs(a_term) + std::abs(b_term) + std::abs(c_term),
                                 std::numeric_limits<double>::min()});
  return std::abs(a_term + b_term + c_term - total) / scale;
}

double ABCReport::dominance() const {
  const double denom = std::abs(a_term) + std::abs(c_term);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(b_term) / denom;
}

ABCReport decompose_abc(const Datum& datum, int j) {
  if (j < 1 || j > datum.count()) throw std::out_of_range("ABC decomposition: j out of range");
  const double alpha = datum.config.sequence.alpha;
  const auto& cj = datum.component(j);
  ABCReport r;
  r.j = j;
  r.q = cj.q;
  for (int k = j + 1; k <= datum.count(); ++k) {
    const auto ext = datum.component(k).extended();
    r.a_term += tri(ext, ext, cj.top);
  }
  r.b_term = tri(cj.below, cj.top, cj.top);
  if (j > 1) r.c_term = -tri(cj.top, cj.top, datum.partial_sum(j - 1));
  r.total = tri(datum.field, datum.field, cj.top);

  const double lam = dyadic(cj.q);
  r.b_scale = std::pow(lam, 6.0 * alpha - 5.0);
  if (j < datum.count())
    r.a_bound = std::pow(lam, 2.0 * alpha) * std::pow(dyadic(datum.component(j + 1).q), 4.0 * alpha - 5.0);
  if (j > 1)
    r.c_bound = std::pow(dyadic(datum.component(j - 1).q), 2.0 * alpha) * std::pow(lam, 4.0 * alpha - 5.0);
  return r;
}

BScalingReport b_scaling_study(double alpha, const std::vector<int>& q_range) {
  BScalingReport report;
  report.alpha = alpha;
  report.expected = 6.0 * alpha - 5.0;
  std::vector<double> xs, ys;
  for (int q : q_range) {
    const ComponentPair pair = build_component_pair(q, alpha);
    BScalingRow row;
    row.q = q;
    row.b = tri(pair.below, pair.top, pair.top);
    row.log2_abs_b = std::log2(std::abs(row.b));
    if (!report.rows.empty() && report.rows.back().b != 0.0) row.ratio_to_previous = row.b / report.rows.back().b;
    report.all_positive = report.all_positive && row.b > 0.0;
    report.rows.push_back(row);
    if (row.b != 0.0) {
      xs.push_back(double(q));
      ys.push_back(row.log2_abs_b);
    }
  }
  if (xs.size() >= 2) report.slope = least_squares(xs, ys).slope;
  return report;
}

json to_json(const ABCReport& r) {
  json j{{"j", r.j},
         {"q", r.q},
         {"A_term", r.a_term},
         {"B_term", r.b_term},
         {"C_term", r.c_term},
         {"total", r.total},
         {"reconciliation_error", r.reconciliation_error()},
         {"B_scale", r.b_scale}};
  j["A_bound"] = r.a_bound ? json(*r.a_bound) : json(nullptr);
  j["C_bound"] = r.c_bound ? json(*r.c_bound) : json(nullptr);
  const double dom = r.dominance();
  j["dominance"] = std::isinf(dom) ? json(nullptr) : json(dom);
  return j;
}

json to_json(const BScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"q", row.q}, {"B", row.b}, {"log2_abs_B", row.log2_abs_b}, {"ratio", row.ratio_to_previous}});
  return json{{"alpha", r.alpha},
              {"slope", r.slope},
              {"expected_slope", r.expected},
              {"all_positive", r.all_positive},
              {"rows", std::move(rows)}};
}

}  // namespace hyperns
