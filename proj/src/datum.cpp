#include "hyperns/datum.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hyperns/errors.hpp"
#include "hyperns/fit.hpp"
#include "hyperns/spectral_core.hpp"

namespace hyperns {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// num * 2^q / den is never an integer for the block fractions used here, so
// open and closed intervals select the same lattice points.
void assert_off_lattice(int num, int q, int den) {
  const std::int64_t v = std::int64_t(num) << q;
  if (v % den == 0) throw std::logic_error("block boundary falls on a lattice point");
}

IntBox make_box(std::array<std::array<int, 2>, 3> nums, int q, int den) {
  IntBox b;
  int lo[3], hi[3];
  for (int d = 0; d < 3; ++d) {
    assert_off_lattice(nums[d][0], q, den);
    assert_off_lattice(nums[d][1], q, den);
    lo[d] = ceil_scaled(nums[d][0], q, den);
    hi[d] = floor_scaled(nums[d][1], q, den);
  }
  b.lo = {lo[0], lo[1], lo[2]};
  b.hi = {hi[0], hi[1], hi[2]};
  return b;
}

std::vector<Frequency> negated(const std::vector<Frequency>& v) {
  std::vector<Frequency> out;
  out.reserve(v.size());
  for (auto k : v) out.push_back(-k);
  std::sort(out.begin(), out.end());
  return out;
}

constexpr Vec3 kE1{1.0, 0.0, 0.0};
constexpr Vec3 kE2{0.0, 1.0, 0.0};

}  // namespace

int ceil_scaled(int num, int q, int den) { return static_cast<int>(ceil_div(std::int64_t(num) << q, den)); }
int floor_scaled(int num, int q, int den) { return static_cast<int>(floor_div(std::int64_t(num) << q, den)); }

std::size_t IntBox::count() const {
  if (hi.x < lo.x || hi.y < lo.y || hi.z < lo.z) return 0;
  return std::size_t(hi.x - lo.x + 1) * std::size_t(hi.y - lo.y + 1) * std::size_t(hi.z - lo.z + 1);
}

std::vector<Frequency> IntBox::points() const {
  std::vector<Frequency> out;
  out.reserve(count());
  for (int x = lo.x; x <= hi.x; ++x)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int z = lo.z; z <= hi.z; ++z) out.push_back({x, y, z});
  return out;
}

SequenceReport validate_sequence(double alpha, std::span<const int> qs) {
  if (!(alpha >= kAlphaMin && alpha < kAlphaMax)) throw ConfigError("exponent out of the paper's range");
  if (qs.empty()) throw ConfigError("empty shell sequence");
  for (std::size_t i = 1; i < qs.size(); ++i)
    if (qs[i] <= qs[i - 1]) throw ConfigError("shell sequence must be strictly increasing");
  if (qs.front() < 2) throw ConfigError("shell sequence must start at q >= 2");
  if (qs.back() > 24) throw ConfigError("shell index too large for the integer lattice");

  SequenceReport report;
  report.alpha = alpha;
  report.qs.assign(qs.begin(), qs.end());
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    PairCheck p;
    p.q_lo = qs[i];
    p.q_hi = qs[i + 1];
    const double exponent = 2.0 * alpha * qs[i] + (4.0 * alpha - 5.0) * qs[i + 1];
    p.value = std::exp2(exponent);
    p.pass = exponent < 0.0;
    report.admissible = report.admissible && p.pass;
    report.pairs.push_back(p);
  }
  return report;
}

BlockFamily build_blocks(int q, int j) {
  if (q < 2) throw ConfigError("blocks need q >= 2");
  BlockFamily f;
  f.j = j;
  f.q = q;
  f.a_box = make_box({{{9, 11}, {-1, 1}, {-1, 1}}}, q, 10);
  f.b_box = make_box({{{-1, 1}, {-1, 1}, {9, 11}}}, q - 1, 10);
  f.c_box = {f.a_box.lo + f.b_box.lo, f.a_box.hi + f.b_box.hi};
  f.A = f.a_box.points();
  f.B = f.b_box.points();
  f.C = f.c_box.points();
  f.Astar = negated(f.A);
  f.Bstar = negated(f.B);
  f.Cstar = negated(f.C);
  return f;
}

ComponentPair build_component_pair(int q, double alpha, double multiplier) {
  if (!(multiplier > 0.0)) throw ConfigError("amplitude multiplier must be positive");
  const BlockFamily f = build_blocks(q);
  const double amp = multiplier * std::pow(dyadic(q), 2.0 * alpha - 4.0);
  const Complex i_unit{0.0, 1.0};

  std::vector<SpectralEntry> top;
  top.reserve(2 * (f.A.size() + f.C.size()));
  for (auto k : f.A) {
    const Vec3 e2 = apply_leray(k, kE2);
    assert(e2[0] != 0.0 || e2[1] != 0.0 || e2[2] != 0.0);
    const CVec3 c = amp * CVec3::real(e2);
    top.push_back({k, c});
    top.push_back({-k, c});
  }
  for (auto k : f.C) {
    const Vec3 e2 = apply_leray(k, kE2);
    const Vec3 e1 = apply_leray(k, kE1);
    const CVec3 d = CVec3::real({e2[0] - e1[0], e2[1] - e1[1], e2[2] - e1[2]});
    top.push_back({k, (amp * i_unit) * d});
    top.push_back({-k, (-amp * i_unit) * d});
  }
  std::vector<SpectralEntry> below;
  below.reserve(2 * f.B.size());
  for (auto k : f.B) {
    const CVec3 c = amp * CVec3::real(apply_leray(k, kE1));
    below.push_back({k, c});
    below.push_back({-k, c});
  }
  ComponentPair pair;
  pair.q = q;
  pair.top = SparseSpectralField(std::move(top));
  pair.below = SparseSpectralField(std::move(below));
  return pair;
}

const ComponentPair& Datum::component(int j) const {
  if (j < 1 || j > count()) throw std::out_of_range("component index out of range");
  return components[std::size_t(j - 1)];
}

SparseSpectralField Datum::partial_sum(int j) const {
  SparseSpectralField s;
  for (int k = 1; k <= std::min(j, count()); ++k) s = s + component(k).extended();
  return s;
}

std::vector<ShellPlacement> Datum::placement() const {
  std::vector<ShellPlacement> out;
  for (int j = 1; j <= count(); ++j) {
    const auto& c = component(j);
    ShellPlacement p;
    p.j = j;
    p.q = c.q;
    p.top_in_shell = std::all_of(c.top.entries().begin(), c.top.entries().end(),
                                 [&](const SpectralEntry& e) { return shell_of(e.k) == c.q; });
    p.below_in_shell = std::all_of(c.below.entries().begin(), c.below.entries().end(),
                                   [&](const SpectralEntry& e) { return shell_of(e.k) == c.q - 1; });
    p.next_shell_empty = std::none_of(field.entries().begin(), field.entries().end(),
                                      [&](const SpectralEntry& e) { return shell_of(e.k) == c.q + 1; });
    out.push_back(p);
  }
  return out;
}

Datum assemble_datum(const DatumConfig& config) {
  Datum d;
  d.config = config;
  d.admissibility = validate_sequence(config.sequence.alpha, config.sequence.qs);
  if (!d.admissibility.admissible && !config.sequence.relaxed) {
    std::ostringstream msg;
    msg << "inadmissible sequence:";
    for (const auto& p : d.admissibility.pairs)
      if (!p.pass) msg << " (q=" << p.q_lo << ", q'=" << p.q_hi << ": " << p.value << " >= 1)";
    throw ConfigError(msg.str());
  }
  std::set<int> shells;
  for (int q : config.sequence.qs) {
    if (!shells.insert(q).second || !shells.insert(q - 1).second)
      throw ConfigError("overlapping supports: shell " + std::to_string(q) + " or " + std::to_string(q - 1) +
                        " is used twice");
  }
  for (int q : config.sequence.qs) {
    d.components.push_back(build_component_pair(q, config.sequence.alpha, config.multiplier));
    d.field = d.field + d.components.back().extended();
  }
  return d;
}

ShellL2 shell_l2_exact(const ComponentPair& pair, double alpha) {
  ShellL2 s;
  s.q = pair.q;
  s.l2 = lp_project(pair.top, pair.q).l2_norm();
  s.ratio = s.l2 / std::pow(dyadic(pair.q), 2.0 * alpha - 2.5);
  return s;
}

ShellL2 shell_l2_exact(const Datum& datum, int j) {
  const auto& pair = datum.component(j);
  ShellL2 s = shell_l2_exact(pair, datum.config.sequence.alpha);
  s.j = j;
  s.l2 = lp_project(datum.field, pair.q).l2_norm();
  s.ratio = s.l2 / std::pow(dyadic(pair.q), 2.0 * datum.config.sequence.alpha - 2.5);
  return s;
}

double dirichlet_kernel(int n, double x) {
  const double half = 0.5 * x;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-12) return 2.0 * n + 1.0;
  return std::sin((n + 0.5) * x) / s;
}

double dirichlet_norm(int n, double r, int points) {
  if (points == 0) {
    const double finite_r = std::isinf(r) ? 2.0 : r;
    points = std::max(1024, int(64 * (std::ceil(finite_r) * n + 1)));
  }
  if (std::isinf(r)) return 2.0 * n + 1.0;
  double s = 0.0;
  for (int m = 0; m < points; ++m) {
    const double x = 2.0 * std::numbers::pi * m / points;
    s += std::pow(std::abs(dirichlet_kernel(n, x)), r);
  }
  return std::pow(s / points, 1.0 / r);
}

DirichletCheck dirichlet_norm_check(int n, double r) {
  if (n < 1) throw std::invalid_argument("Dirichlet kernel order must be >= 1");
  if (!(r > 1.0)) throw std::invalid_argument("Dirichlet norm check needs r > 1");
  DirichletCheck c;
  c.n = n;
  c.r = r;
  c.norm = dirichlet_norm(n, r);
  c.bound = std::isinf(r) ? double(n) : std::pow(double(n), 1.0 - 1.0 / r);
  c.ratio = c.norm / c.bound;
  c.pass = c.norm <= kDirichletConstant * c.bound;
  return c;
}

BoxFactorization box_factorization_check(const IntBox& box, double r, int n) {
  // The indicator is complex-valued; carry cos(k.x) and sin(k.x) as two real
  // components so the pointwise magnitude is |sum e^{ikx}|.
  std::vector<SpectralEntry> entries;
  for (auto k : box.points()) {
    entries.push_back({k, CVec3{{Complex(0.5), Complex(0.0, -0.5), Complex{}}}});
    entries.push_back({-k, CVec3{{Complex(0.5), Complex(0.0, 0.5), Complex{}}}});
  }
  const SparseSpectralField indicator(std::move(entries));
  BoxFactorization out;
  out.norm3d = lr_norm(indicator, r, n);

  // |sum_{k=a}^{b} e^{ikx}| sampled on the same n nodes.
  auto factor = [&](int a, int b) {
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      const double x = 2.0 * std::numbers::pi * m / n;
      Complex s{};
      for (int k = a; k <= b; ++k) s += std::polar(1.0, k * x);
      mags[std::size_t(m)] = std::abs(s);
    }
    if (std::isinf(r)) return *std::max_element(mags.begin(), mags.end());
    double acc = 0.0;
    for (double v : mags) acc += std::pow(v, r);
    return std::pow(acc / n, 1.0 / r);
  };
  out.product_1d = factor(box.lo.x, box.hi.x) * factor(box.lo.y, box.hi.y) * factor(box.lo.z, box.hi.z);
  out.pass = out.norm3d <= out.product_1d * (1.0 + 1e-9);
  return out;
}

json datum_metadata(const Datum& datum) {
  json shell_table = json::array();
  for (int j = 1; j <= datum.count(); ++j) {
    const auto s = shell_l2_exact(datum, j);
    shell_table.push_back({{"j", j}, {"q", s.q}, {"l2", s.l2}, {"ratio", s.ratio}});
  }
  json pairs = json::array();
  for (const auto& p : datum.admissibility.pairs)
    pairs.push_back({{"q", p.q_lo}, {"q_next", p.q_hi}, {"value", p.value}, {"pass", p.pass}});
  return json{{"alpha", datum.config.sequence.alpha},
              {"qs", datum.config.sequence.qs},
              {"relaxed", datum.config.sequence.relaxed},
              {"admissible", datum.admissibility.admissible},
              {"multiplier", datum.config.multiplier},
              {"mode_count", datum.field.size()},
              {"sequence_pairs", std::move(pairs)},
              {"shell_l2", std::move(shell_table)}};
}

NormScalingReport lr_scaling_study(double alpha, const std::vector<int>& q_range, double r) {
  NormScalingReport out;
  out.alpha = alpha;
  out.r = r;
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  out.expected = 2.0 * alpha - 1.0 - 3.0 * inv_r;
  std::vector<double> xs, ys;
  for (int q : q_range) {
    const ComponentPair pair = build_component_pair(q, alpha);
    NormScalingRow row;
    row.q = q;
    if (r == 2.0) {
      row.norm = pair.top.l2_norm();
    } else {
      row.grid = default_grid_size(pair.top);
      row.norm = lr_norm(pair.top, r, row.grid);
    }
    row.scaled = std::pow(dyadic(q), 1.0 + 3.0 * inv_r - 2.0 * alpha) * row.norm;
    xs.push_back(double(q));
    ys.push_back(std::log2(row.norm));
    out.rows.push_back(row);
  }
  if (xs.size() >= 2) out.slope = least_squares(xs, ys).slope;
  return out;
}

json to_json(const NormScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"q", row.q}, {"grid", row.grid}, {"norm", row.norm}, {"scaled", row.scaled}});
  return json{{"alpha", r.alpha},
              {"r", std::isinf(r.r) ? json("inf") : json(r.r)},
              {"slope", r.slope},
              {"expected_slope", r.expected},
              {"rows", std::move(rows)}};
}

}  // namespace hyperns
