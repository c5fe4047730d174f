#include "hyperns/sparse_field.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hyperns {

namespace {

bool by_frequency(const SpectralEntry& a, const SpectralEntry& b) { return a.k < b.k; }

}  // namespace

SparseSpectralField::SparseSpectralField(std::vector<SpectralEntry> entries) {
  if (!std::is_sorted(entries.begin(), entries.end(), by_frequency))
    std::stable_sort(entries.begin(), entries.end(), by_frequency);
  entries_.reserve(entries.size());
  for (auto& e : entries) {
    if (!entries_.empty() && entries_.back().k == e.k) {
      entries_.back().coeff += e.coeff;
      continue;
    }
    if (!entries_.empty() && entries_.back().coeff.is_zero()) entries_.pop_back();
    entries_.push_back(e);
  }
  if (!entries_.empty() && entries_.back().coeff.is_zero()) entries_.pop_back();
}

const CVec3* SparseSpectralField::find(Frequency k) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                             [](const SpectralEntry& e, const Frequency& key) { return e.k < key; });
  if (it == entries_.end() || it->k != k) return nullptr;
  return &it->coeff;
}

CVec3 SparseSpectralField::at(Frequency k) const {
  const CVec3* c = find(k);
  return c ? *c : CVec3{};
}

int SparseSpectralField::max_abs_frequency() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.k.max_abs());
  return m;
}

double SparseSpectralField::l2_norm2() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.coeff.norm2();
  return s;
}

double SparseSpectralField::l2_norm() const { return std::sqrt(l2_norm2()); }

double SparseSpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (const auto& e : entries_) {
    const CVec3* partner = find(-e.k);
    if (!partner) return 1.0;
    const double scale = e.coeff.norm();
    const double d = (*partner - e.coeff.conj()).norm();
    worst = std::max(worst, d / scale);
  }
  return worst;
}

double SparseSpectralField::divergence_defect() const {
  double worst = 0.0;
  for (const auto& e : entries_) {
    if (e.k.is_zero()) continue;
    const double d = std::abs(e.coeff.dot(e.k)) / (e.k.norm() * e.coeff.norm());
    worst = std::max(worst, d);
  }
  return worst;
}

namespace {

template <class Op>
SparseSpectralField merge(const SparseSpectralField& a, const SparseSpectralField& b, Op op) {
  std::vector<SpectralEntry> out;
  out.reserve(a.size() + b.size());
  auto ia = a.entries().begin(), ea = a.entries().end();
  auto ib = b.entries().begin(), eb = b.entries().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->k < ib->k)) {
      out.push_back({ia->k, op(ia->coeff, CVec3{})});
      ++ia;
    } else if (ia == ea || ib->k < ia->k) {
      out.push_back({ib->k, op(CVec3{}, ib->coeff)});
      ++ib;
    } else {
      out.push_back({ia->k, op(ia->coeff, ib->coeff)});
      ++ia;
      ++ib;
    }
  }
  return SparseSpectralField(std::move(out));
}

}  // namespace

SparseSpectralField operator+(const SparseSpectralField& a, const SparseSpectralField& b) {
  return merge(a, b, [](const CVec3& x, const CVec3& y) { return x + y; });
}

SparseSpectralField operator-(const SparseSpectralField& a, const SparseSpectralField& b) {
  return merge(a, b, [](const CVec3& x, const CVec3& y) { return x - y; });
}

SparseSpectralField operator*(Complex s, const SparseSpectralField& a) {
  return a.transformed([s](Frequency, const CVec3& c) { return s * c; });
}

double inner_product(const SparseSpectralField& u, const SparseSpectralField& v) {
  const auto& small = u.size() <= v.size() ? u : v;
  const auto& large = u.size() <= v.size() ? v : u;
  Complex s{};
  for (const auto& e : small.entries()) {
    if (const CVec3* c = large.find(e.k)) s += hermitian_dot(e.coeff, *c);
  }
  return s.real();
}

FrequencyIndex::FrequencyIndex(const SparseSpectralField& field) {
  const auto entries = field.entries();
  if (entries.empty()) {
    dense_ = true;
    return;
  }
  if (entries.size() > std::size_t(std::numeric_limits<std::int32_t>::max()))
    throw std::length_error("FrequencyIndex: field too large");
  Frequency lo = entries.front().k, hi = entries.front().k;
  for (const auto& e : entries) {
    lo = {std::min(lo.x, e.k.x), std::min(lo.y, e.k.y), std::min(lo.z, e.k.z)};
    hi = {std::max(hi.x, e.k.x), std::max(hi.y, e.k.y), std::max(hi.z, e.k.z)};
  }
  const Frequency ext = hi - lo + Frequency{1, 1, 1};
  const double volume = double(ext.x) * double(ext.y) * double(ext.z);
  if (volume <= 64.0 * double(entries.size()) + 4096.0 && volume < 4.0e8) {
    dense_ = true;
    lo_ = lo;
    ext_ = ext;
    table_.assign(std::size_t(volume), -1);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Frequency d = entries[i].k - lo;
      table_[(std::size_t(d.x) * std::size_t(ext.y) + std::size_t(d.y)) * std::size_t(ext.z) +
             std::size_t(d.z)] = static_cast<std::int32_t>(i);
    }
  } else {
    map_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) map_.emplace(entries[i].k, std::ptrdiff_t(i));
  }
}

}  // namespace hyperns
