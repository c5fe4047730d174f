// Acceptance suite: one PASS/FAIL line per criterion, tolerances as specified.
// Usage: acceptance [--seed N] [--only 1,4,7]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyperns/datum.hpp"
#include "hyperns/dense_field.hpp"
#include "hyperns/fit.hpp"
#include "hyperns/solver.hpp"
#include "hyperns/spectral_core.hpp"
#include "hyperns/trilinear.hpp"
#include "support.hpp"

using namespace hyperns;
using hyperns::testing::Rng;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void info(const std::string& line) { std::printf("     %s\n", line.c_str()); }

Datum default_datum() {
  DatumConfig cfg;
  cfg.sequence.alpha = 1.0;
  cfg.sequence.qs = {2, 5};
  return assemble_datum(cfg);
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int q = lo; q <= hi; ++q) v.push_back(q);
  return v;
}

double dense_tri(const SparseSpectralField& u, const SparseSpectralField& v, const SparseSpectralField& w) {
  const int k = std::max({u.max_abs_frequency(), v.max_abs_frequency(), w.max_abs_frequency()});
  int n = 8;
  while (n < 3 * k + 1) n *= 2;
  return tri_dense_oracle(DenseGridField::from_sparse(u, n), DenseGridField::from_sparse(v, n),
                          DenseGridField::from_sparse(w, n));
}

// ---------------------------------------------------------------------------

Outcome criterion_l2_scaling() {
  const auto s = lr_scaling_study(1.0, range(4, 9), 2.0);
  for (const auto& r : s.rows) info(fmt("q=%d |U_q|_2=%.6e scaled=%.4f", r.q, r.norm, r.scaled));
  return {std::abs(s.slope - s.expected) <= 0.15,
          fmt("slope %.4f, expected %.2f +- 0.15", s.slope, s.expected)};
}

Outcome criterion_linf_scaling() {
  bool pass = true;
  std::string detail;
  for (double alpha : {1.0, 1.1}) {
    const auto s = lr_scaling_study(alpha, range(4, 7), kInf);
    for (const auto& r : s.rows)
      info(fmt("alpha=%.1f q=%d grid=%d |U_q|_inf=%.6e scaled=%.4f", alpha, r.q, r.grid, r.norm, r.scaled));
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      xs.push_back(s.rows[i].q);
      ys.push_back(std::log2(s.rows[i].norm));
    }
    info(fmt("alpha=%.1f slope over q=5..7: %.4f", alpha, least_squares(xs, ys).slope));
    const bool ok = std::abs(s.slope - s.expected) <= 0.2;
    pass = pass && ok;
    detail += fmt("%salpha=%.1f slope %.4f vs %.2f +- 0.2", detail.empty() ? "" : "; ", alpha, s.slope, s.expected);
  }
  return {pass, detail};
}

Outcome criterion_b_scaling() {
  bool pass = true;
  std::string detail;
  for (double alpha : {1.0, 1.1}) {
    const auto s = b_scaling_study(alpha, range(3, 7));
    for (const auto& r : s.rows) info(fmt("alpha=%.1f q=%d B=%.6e", alpha, r.q, r.b));
    if (!s.all_positive) info(fmt("alpha=%.1f: B is not positive at every q", alpha));
    const bool ok = std::abs(s.slope - s.expected) <= 0.25 && s.all_positive;
    pass = pass && ok;
    detail += fmt("%salpha=%.1f slope %.4f vs %.2f +- 0.25, positive=%s", detail.empty() ? "" : "; ", alpha, s.slope,
                  s.expected, s.all_positive ? "yes" : "no");
  }
  return {pass, detail};
}

Outcome criterion_subdominance() {
  const Datum d = default_datum();
  bool pass = true;
  bool literal_reading_applies = false;
  std::string detail;
  for (int j = 1; j <= d.count(); ++j) {
    const auto r = decompose_abc(d, j);
    info(fmt("j=%d A=%.6e B=%.6e C=%.6e total=%.6e reconciliation=%.1e", j, r.a_term, r.b_term, r.c_term, r.total,
             r.reconciliation_error()));
    if (r.a_bound) {
      const bool ok = std::abs(r.a_term) <= 10.0 * *r.a_bound;
      pass = pass && ok;
      detail += fmt("j=%d |A|=%.3e <= 10*%.3e %s; ", j, std::abs(r.a_term), *r.a_bound, ok ? "ok" : "no");
    }
    if (r.c_bound) {
      const bool ok = std::abs(r.c_term) <= 10.0 * *r.c_bound;
      pass = pass && ok;
      detail += fmt("j=%d |C|=%.3e <= 10*%.3e %s; ", j, std::abs(r.c_term), *r.c_bound, ok ? "ok" : "no");
    }
    literal_reading_applies = literal_reading_applies || (r.a_bound && r.c_bound);
    const double dom = r.dominance();
    if (std::isfinite(dom)) {
      const bool ok = dom > 1.0;
      pass = pass && ok;
      detail += fmt("j=%d |B|/(|A|+|C|)=%.4f %s; ", j, dom, ok ? "> 1" : "<= 1");
    }
  }
  if (!literal_reading_applies) info("no j has both comparison quantities; dominance checked wherever it is finite");
  if (detail.size() >= 2) detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome criterion_oracle(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto u = hyperns::testing::random_field(rng, 5, 30);
    const auto v = hyperns::testing::random_field(rng, 5, 30);
    const auto w = hyperns::testing::random_field(rng, 5, 30);
    const double a = tri(u, v, w), b = dense_tri(u, v, w);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  DatumConfig cfg;
  cfg.sequence = {1.0, {4}, false};
  const Datum d = assemble_datum(cfg);
  const auto& c = d.component(1);
  double datum_worst = 0.0;
  // tri(U, U, U) vanishes by cancellation, so only the shell pieces are compared.
  const SparseSpectralField* fields[2] = {&c.top, &c.below};
  for (const auto* x : fields) {
    const double a = tri(d.field, d.field, *x), b = dense_tri(d.field, d.field, *x);
    datum_worst = std::max(datum_worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  const double a = tri(c.below, c.top, c.top), b = dense_tri(c.below, c.top, c.top);
  datum_worst = std::max(datum_worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  return {worst <= 1e-8 && datum_worst <= 1e-8 && d.field.size() == 110,
          fmt("random max rel %.2e, datum (%zu modes) max rel %.2e, tolerance 1e-8", worst, d.field.size(),
              datum_worst)};
}

Outcome criterion_cancellation(std::uint64_t seed) {
  Rng rng(seed ^ 0x5bd1e995);
  double worst_self = 0.0, worst_anti = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto u = hyperns::testing::random_field(rng, 6, 40);
    const auto v = hyperns::testing::random_field(rng, 6, 40);
    const auto w = hyperns::testing::random_field(rng, 6, 40);
    const auto ww = tri_terms(w, v, w);
    worst_self = std::max(worst_self, std::abs(ww.value) / ww.magnitude);
    const auto uvw = tri_terms(u, v, w);
    const auto wvu = tri_terms(w, v, u);
    worst_anti = std::max(worst_anti, std::abs(uvw.value + wvu.value) / (uvw.magnitude + wvu.magnitude));
  }
  return {worst_self < 1e-10 && worst_anti < 1e-10,
          fmt("|tri(w,v,w)| %.2e, |tri(u,v,w)+tri(w,v,u)| %.2e (relative to sum of |triads|), tolerance 1e-10",
              worst_self, worst_anti)};
}

// The default run is shared by criteria 7 and 9.
struct DefaultRun {
  bool done = false;
  RunResult result;
  double seconds = 0.0;
};

const RunResult& default_run(DefaultRun& cache) {
  if (!cache.done) {
    const auto start = std::chrono::steady_clock::now();
    const SolverConfig cfg;
    std::fprintf(stderr, "default run: n=%d dt=%g t_end=%g (%ld steps)\n", cfg.n, cfg.dt, cfg.t_end,
                 cfg.step_count());
    cache.result = run(default_datum(), cfg, [](const DiagnosticsRecord& r) {
      std::fprintf(stderr, "  t=%.3f residual=%.3e\n", r.t, r.residual);
    });
    cache.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cache.done = true;
  }
  return cache.result;
}

Outcome criterion_energy(DefaultRun& cache) {
  const RunResult& main = default_run(cache);
  const SolverConfig base;
  info(fmt("default run: %zu records, max CFL %.3f, nu*E(t_end)/|U|^2 = %.4f", main.records.size(), main.max_cfl,
           base.nu * main.records.back().dissipation / main.initial_energy));

  // Residual at a common early time for dt and dt / 2.
  const double t_cmp = 0.04;
  const DiagnosticsRecord* coarse = nullptr;
  for (const auto& r : main.records)
    if (std::abs(r.t - t_cmp) < 1e-9) coarse = &r;
  SolverConfig half = base;
  half.dt = base.dt / 2;
  half.t_end = t_cmp;
  half.diag_every = 1'000'000;
  const auto fine = run(default_datum(), half);
  const double r_fine = fine.records.back().residual;
  const double ratio = coarse ? coarse->residual / r_fine : std::nan("");
  info(fmt("residual at t=%.2f: dt=%g %.4e, dt=%g %.4e", t_cmp, base.dt, coarse ? coarse->residual : std::nan(""),
           half.dt, r_fine));

  const bool bound = main.max_abs_residual <= 1e-6;
  const bool order = coarse && ratio >= 16.0 / 1.5 && ratio <= 16.0 * 1.5;
  return {bound && order,
          fmt("max |residual| %.3e <= 1e-6; dt-halving ratio %.2f in [%.2f, %.0f]", main.max_abs_residual, ratio,
              16.0 / 1.5, 16.0 * 1.5)};
}

Outcome criterion_shell_growth() {
  const Datum d = default_datum();
  const SolverConfig cfg;
  const auto checks = shell_growth_check(d.field, d.config.sequence.qs, cfg, 1e-4);
  bool pass = true;
  std::string detail;
  for (std::size_t j = 0; j < checks.size(); ++j) {
    const auto& c = checks[j];
    info(fmt("j=%zu q=%d rate(h)=%.9e rate(h/2)=%.9e extrapolated=%.9e", j + 1, c.q, c.rate_h, c.rate_half,
             c.extrapolated));
    info(fmt("      dissipative=%.9e transfer=%.9e predicted=%.9e", c.dissipative, c.transfer, c.predicted));
    const double transfer_part = c.extrapolated - c.dissipative;
    info(fmt("      transfer recovered %.9e, relative error %.2e", transfer_part,
             std::abs(transfer_part - c.transfer) / std::abs(c.transfer)));
    pass = pass && c.relative_error() <= 0.01;
    detail += fmt("%sj=%zu rel err %.2e", detail.empty() ? "" : "; ", j + 1, c.relative_error());
  }
  return {pass, detail + " (tolerance 1%)"};
}

Outcome criterion_inflation(DefaultRun& cache) {
  const RunResult& main = default_run(cache);
  const auto& s = main.summary;
  for (std::size_t j = 0; j < s.qs.size(); ++j)
    info(fmt("j=%zu q=%d max D=%.6e at t=%.3f", j + 1, s.qs[j], s.max_inflation[j], s.time_of_max[j]));
  if (s.t_star) {
    for (std::size_t j = 0; j < s.growth_coefficient.size(); ++j)
      info(fmt("c1_hat(j=%zu) at t*=%.4f: %.6e", j + 1, *s.t_star, s.growth_coefficient[j]));
  }
  const double threshold = SolverConfig{}.inflation_threshold;
  const double ratio = s.max_inflation[1] / s.max_inflation[0];
  return {ratio >= threshold, fmt("max D_2 / max D_1 = %.4f >= %.2f", ratio, threshold)};
}

Outcome criterion_structural(std::uint64_t seed) {
  Rng rng(seed + 7);
  const Datum d = default_datum();
  std::vector<std::string> failed;
  auto need = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };

  need(d.field.is_hermitian(1e-12), "datum Hermitian symmetry");
  need(d.field.is_divergence_free(1e-12), "datum divergence-free");
  for (const auto& p : d.placement())
    need(p.top_in_shell && p.below_in_shell && p.next_shell_empty, "datum shell placement");

  for (int s = 0; s < 10; ++s) {
    const auto u = hyperns::testing::random_field(rng, 20, 200, s % 2 == 0);
    int top = 0;
    for (const auto& e : u.entries()) top = std::max(top, shell_of(e.k));
    SparseSpectralField sum;
    for (int q = 0; q <= top + 1; ++q) {
      const auto uq = lp_project(u, q);
      sum = sum + uq;
      const double lhs = inner_product(u, uq), ext = inner_product(extended_lp(u, q), uq);
      need(std::abs(lhs - ext) <= 1e-12 * std::max(1.0, std::abs(lhs)), "extended-projection identity");
    }
    need((sum - u).empty(), "shell partition");
    const auto pu = project_leray(u);
    double drift = 0.0;
    for (const auto& e : (project_leray(pu) - pu).entries()) drift = std::max(drift, e.coeff.norm());
    need(drift <= 1e-12 * pu.l2_norm(), "Leray idempotence");
    need(pu.is_divergence_free(1e-12), "Leray output divergence-free");
  }

  double worst = 0.0;
  for (int s = 0; s < 40; ++s) {
    const int q = 2 + s % 2;
    const auto u = s % 4 < 2 ? hyperns::testing::gaussian_shell_field(rng, q)
                             : hyperns::testing::coherent_shell_field(rng, q);
    if (u.empty()) continue;
    for (auto [r, r2] : {std::pair{2.0, 4.0}, std::pair{2.0, kInf}, std::pair{4.0, kInf}})
      worst = std::max(worst, bernstein_ratio(u, r, r2));
  }
  need(worst <= kBernsteinConstant, "Bernstein bound");

  std::string detail = fmt("largest Bernstein ratio %.4f <= C_B %.4f", worst, kBernsteinConstant);
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::uint64_t seed = 20261014;
  std::string only;
  app.add_option("--seed", seed, "Seed for the randomized criteria");
  app.add_option("--only", only, "Comma-separated criterion numbers to run");
  CLI11_PARSE(app, argc, argv);

  std::set<int> selected;
  if (!only.empty()) {
    std::stringstream ss(only);
    for (std::string item; std::getline(ss, item, ',');) selected.insert(std::stoi(item));
  }

  DefaultRun cache;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "datum L2 scaling", 10, criterion_l2_scaling},
      {2, "L-infinity scaling of U_q", 300, criterion_linf_scaling},
      {3, "B-term scaling", 120, criterion_b_scaling},
      {4, "A/C subdominance", 60, criterion_subdominance},
      {5, "sparse vs dense oracle", 60, [&] { return criterion_oracle(seed); }},
      {6, "cancellation laws", 60, [&] { return criterion_cancellation(seed); }},
      {7, "energy balance", 1800, [&] { return criterion_energy(cache); }},
      {8, "shell-growth identity", 600, criterion_shell_growth},
      {9, "inflation signature", 1800, [&] { return criterion_inflation(cache); }},
      {10, "structural suite", 60, [&] { return criterion_structural(seed); }},
  };

  std::printf("acceptance suite, seed %llu, threads %d\n", static_cast<unsigned long long>(seed), fft_thread_count());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    std::printf("[%d] %s\n", c.id, c.name);
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Criterion 9 reuses the run paid for by criterion 7.
    if (c.id == 9 && cache.done && (selected.empty() || selected.count(7))) seconds = 0.0;
    const bool in_budget = seconds <= c.budget_s;
    const bool pass = out.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("%s [%d] %s: %s; %.1f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), seconds, c.budget_s, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
