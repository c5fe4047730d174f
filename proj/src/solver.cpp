#include "hyperns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "hyperns/errors.hpp"
#include "hyperns/spectral_core.hpp"
#include "hyperns/trilinear.hpp"

namespace hyperns {

namespace {

int dealias_band(int n) { return (n % 3 == 0) ? n / 3 - 1 : n / 3; }

[[noreturn]] void blow_up() { throw InstabilityError("blow-up or instability detected"); }

}  // namespace

void SolverConfig::validate() const {
  if (n < 8 || n % 2) throw ConfigError("grid size must be even and >= 8");
  if (!(nu > 0.0)) throw ConfigError("viscosity must be positive");
  if (!(alpha > 0.0)) throw ConfigError("dissipation exponent must be positive");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (diag_every < 1) throw ConfigError("diag_every must be >= 1");
  if (!(cfl_limit > 0.0)) throw ConfigError("cfl_limit must be positive");
  if (t_star_steps < 1) throw ConfigError("t_star_steps must be >= 1");
}

long SolverConfig::step_count() const { return std::lround(std::ceil(t_end / dt - 1e-9)); }

GalerkinLattice::GalerkinLattice(int n) : n_(n), band_(dealias_band(n)) {
  const int b = band_;
  modes_.reserve(std::size_t(2 * b + 1) * std::size_t(2 * b + 1) * std::size_t(b + 1));
  for (int x = -b; x <= b; ++x)
    for (int y = -b; y <= b; ++y)
      for (int z = 0; z <= b; ++z) {
        modes_.push_back({std::int16_t(x), std::int16_t(y), std::int16_t(z)});
        const int q = shell_of({x, y, z});
        shells_.push_back(std::int8_t(q));
        max_shell_ = std::max(max_shell_, q);
      }
}

Solver::Solver(SolverConfig config)
    : config_((config.validate(), config)), lattice_(config_.n), fft_(config_.n, lattice_.band()) {
  const std::size_t m = lattice_.size();
  symbol_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    symbol_[i] = std::pow(double(lattice_.frequency(i).norm2()), config_.alpha);
  for (auto& v : velocity_) v.assign(fft_.padded_real_size(), 0.0);
  stage_.resize(3 * m);
  slope_.resize(3 * m);
  accum_.resize(3 * m);
}

SolverState Solver::make_state(const SparseSpectralField& u) const {
  SolverState s;
  s.u.assign(3 * lattice_.size(), Complex{});
  s.shell_dissipation.assign(std::size_t(lattice_.max_shell() + 1), 0.0);
  const std::size_t m = lattice_.size();
  for (const auto& e : u.entries()) {
    if (e.k.is_zero()) throw ConfigError("initial field has a nonzero mean");
    if (!lattice_.contains(e.k))
      throw ConfigError("initial field does not fit the dealiasing band: need n/3 > max|k_i|");
    if (e.k.z < 0) continue;
    const std::size_t i = lattice_.index(e.k);
    for (int c = 0; c < 3; ++c) s.u[std::size_t(c) * m + i] = e.coeff.c[std::size_t(c)];
  }
  return s;
}

SparseSpectralField Solver::to_sparse(const Coefficients& u) const {
  const std::size_t m = lattice_.size();
  std::vector<SpectralEntry> entries;
  for (std::size_t i = 0; i < m; ++i) {
    CVec3 v{{u[i], u[m + i], u[2 * m + i]}};
    if (v.norm2() == 0.0) continue;
    const Frequency k = lattice_.frequency(i);
    entries.push_back({k, v});
    if (k.z > 0) entries.push_back({-k, v.conj()});
  }
  return SparseSpectralField(std::move(entries));
}

void Solver::nonlinear_rhs(const Coefficients& u, Coefficients& out, double* max_speed) {
  const std::size_t m = lattice_.size();
  const int n = config_.n;
  const std::size_t rows = std::size_t(n) * n;
  const std::size_t stride = std::size_t(2 * fft_.nz_complex());
  Complex* spec = fft_.spectrum();

  for (int c = 0; c < 3; ++c) {
    fft_.clear();
    const Complex* uc = u.data() + std::size_t(c) * m;
    for (std::size_t i = 0; i < m; ++i) spec[fft_.spectral_index(lattice_.frequency(i))] = uc[i];
    fft_.to_real();
    std::memcpy(velocity_[std::size_t(c)].data(), fft_.real_data(), sizeof(double) * fft_.padded_real_size());
  }

  const double* v1 = velocity_[0].data();
  const double* v2 = velocity_[1].data();
  const double* v3 = velocity_[2].data();
  double peak = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * stride;
    for (std::size_t l = 0; l < std::size_t(n); ++l) {
      const std::size_t p = base + l;
      const double s = v1[p] * v1[p] + v2[p] * v2[p] + v3[p] * v3[p];
      if (!std::isfinite(s)) blow_up();
      peak = std::max(peak, s);
    }
  }
  if (max_speed) *max_speed = std::sqrt(peak);

  std::fill(out.begin(), out.end(), Complex{});
  Complex* n1 = out.data();
  Complex* n2 = out.data() + m;
  Complex* n3 = out.data() + 2 * m;
  const double scale = 1.0 / (double(n) * n * n);
  const Complex i_unit(0.0, 1.0);

  // u (x) u minus u3^2 id: the dropped diagonal is a gradient the projection removes.
  // Entry t: (a, b) tensor slot; the divergence sends it to row a with k_b and,
  // off the diagonal, to row b with k_a.
  struct Slot {
    int a, b;
  };
  constexpr Slot slots[5] = {{0, 0}, {1, 1}, {0, 1}, {0, 2}, {1, 2}};
  for (int t = 0; t < 5; ++t) {
    double* buf = fft_.real_data();
    const std::size_t total = fft_.padded_real_size();
    switch (t) {
      case 0: for (std::size_t p = 0; p < total; ++p) buf[p] = v1[p] * v1[p] - v3[p] * v3[p]; break;
      case 1: for (std::size_t p = 0; p < total; ++p) buf[p] = v2[p] * v2[p] - v3[p] * v3[p]; break;
      case 2: for (std::size_t p = 0; p < total; ++p) buf[p] = v1[p] * v2[p]; break;
      case 3: for (std::size_t p = 0; p < total; ++p) buf[p] = v1[p] * v3[p]; break;
      default: for (std::size_t p = 0; p < total; ++p) buf[p] = v2[p] * v3[p]; break;
    }
    fft_.to_spectrum();
    Complex* rows_out[3] = {n1, n2, n3};
    const int a = slots[t].a, b = slots[t].b;
    for (std::size_t i = 0; i < m; ++i) {
      const Frequency k = lattice_.frequency(i);
      const Complex tv = spec[fft_.spectral_index(k)] * (i_unit * scale);
      rows_out[a][i] += tv * double(k[b]);
      if (a != b) rows_out[b][i] += tv * double(k[a]);
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    const Frequency k = lattice_.frequency(i);
    if (k.is_zero()) {
      n1[i] = n2[i] = n3[i] = Complex{};
      continue;
    }
    const CVec3 d = apply_leray(k, CVec3{{n1[i], n2[i], n3[i]}});
    n1[i] = -d.c[0];
    n2[i] = -d.c[1];
    n3[i] = -d.c[2];
  }
}

void Solver::prepare_factors(double h) {
  if (h == factor_h_) return;
  const std::size_t m = lattice_.size();
  half_factor_.resize(m);
  full_factor_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    half_factor_[i] = std::exp(-config_.nu * symbol_[i] * 0.5 * h);
    full_factor_[i] = std::exp(-config_.nu * symbol_[i] * h);
  }
  factor_h_ = h;
}

void Solver::dissipation_rates(const Coefficients& u, std::vector<double>& per_shell, double& total) const {
  const std::size_t m = lattice_.size();
  per_shell.assign(std::size_t(lattice_.max_shell() + 1), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double e = std::norm(u[i]) + std::norm(u[m + i]) + std::norm(u[2 * m + i]);
    if (e == 0.0) continue;
    per_shell[std::size_t(lattice_.shell(i))] += lattice_.weight(i) * symbol_[i] * e;
  }
  total = 0.0;
  for (double v : per_shell) total += v;
}

void Solver::step(SolverState& state, std::optional<double> h_opt) {
  const double h = h_opt.value_or(config_.dt);
  prepare_factors(h);
  const std::size_t m = lattice_.size();
  const std::size_t all = 3 * m;
  Coefficients& un = state.u;
  auto factor = [m](const std::vector<double>& f, std::size_t idx) { return f[idx % m]; };

  std::vector<double> g_shell, g_acc(std::size_t(lattice_.max_shell() + 1), 0.0);
  double g = 0.0, g_sum = 0.0;
  auto add_rates = [&](const Coefficients& u, double w) {
    dissipation_rates(u, g_shell, g);
    g_sum += w * g;
    for (std::size_t q = 0; q < g_shell.size(); ++q) g_acc[q] += w * g_shell[q];
  };

  const bool nl = config_.nonlinear;
  double speed = 0.0;

  // Stage 1.
  add_rates(un, 1.0);
  if (nl) {
    nonlinear_rhs(un, slope_, &speed);
  } else {
    std::fill(slope_.begin(), slope_.end(), Complex{});
  }
  last_cfl_ = speed * h * config_.n / 2.0;
  if (last_cfl_ > config_.cfl_limit) {
    if (config_.cfl_policy == CflPolicy::kAbort)
      throw InstabilityError("CFL limit exceeded: " + std::to_string(last_cfl_));
    if (!cfl_warned_) {
      std::fprintf(stderr, "warning: CFL number %.3g above limit %.3g\n", last_cfl_, config_.cfl_limit);
      cfl_warned_ = true;
    }
  }
  for (std::size_t i = 0; i < all; ++i) {
    const double eh = factor(half_factor_, i), ef = factor(full_factor_, i);
    stage_[i] = eh * (un[i] + 0.5 * h * slope_[i]);
    accum_[i] = ef * (un[i] + h / 6.0 * slope_[i]);
  }

  // Stage 2.
  add_rates(stage_, 2.0);
  if (nl) nonlinear_rhs(stage_, slope_);
  for (std::size_t i = 0; i < all; ++i) {
    const double eh = factor(half_factor_, i);
    accum_[i] += h / 3.0 * eh * slope_[i];
    stage_[i] = eh * un[i] + 0.5 * h * slope_[i];
  }

  // Stage 3.
  add_rates(stage_, 2.0);
  if (nl) nonlinear_rhs(stage_, slope_);
  for (std::size_t i = 0; i < all; ++i) {
    const double eh = factor(half_factor_, i), ef = factor(full_factor_, i);
    accum_[i] += h / 3.0 * eh * slope_[i];
    stage_[i] = ef * un[i] + h * eh * slope_[i];
  }

  // Stage 4.
  add_rates(stage_, 1.0);
  if (nl) nonlinear_rhs(stage_, slope_);
  for (std::size_t i = 0; i < all; ++i) un[i] = accum_[i] + h / 6.0 * slope_[i];

  state.dissipation += h / 6.0 * g_sum;
  if (state.shell_dissipation.size() != g_acc.size()) state.shell_dissipation.assign(g_acc.size(), 0.0);
  for (std::size_t q = 0; q < g_acc.size(); ++q) state.shell_dissipation[q] += h / 6.0 * g_acc[q];
  state.t += h;
  ++state.steps;
}

double Solver::energy(const Coefficients& u) const {
  const std::size_t m = lattice_.size();
  double e = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    e += lattice_.weight(i) * (std::norm(u[i]) + std::norm(u[m + i]) + std::norm(u[2 * m + i]));
  return e;
}

std::vector<double> Solver::shell_energies(const Coefficients& u) const {
  const std::size_t m = lattice_.size();
  std::vector<double> out(std::size_t(lattice_.max_shell() + 1), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    out[std::size_t(lattice_.shell(i))] +=
        lattice_.weight(i) * (std::norm(u[i]) + std::norm(u[m + i]) + std::norm(u[2 * m + i]));
  return out;
}

std::vector<double> Solver::perturbation_diagnostics(const Coefficients& u, const Coefficients& u0,
                                                     const std::vector<int>& qs) {
  const std::size_t m = lattice_.size();
  const int n = config_.n;
  const std::size_t rows = std::size_t(n) * n;
  const std::size_t stride = std::size_t(2 * fft_.nz_complex());
  std::vector<double>& sq = velocity_[0];
  Complex* spec = fft_.spectrum();
  std::vector<double> out;
  for (int q : qs) {
    std::fill(sq.begin(), sq.end(), 0.0);
    for (int c = 0; c < 3; ++c) {
      fft_.clear();
      bool any = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (lattice_.shell(i) != q) continue;
        const std::size_t idx = std::size_t(c) * m + i;
        const Complex w = u[idx] - u0[idx];
        if (w == Complex{}) continue;
        spec[fft_.spectral_index(lattice_.frequency(i))] = w;
        any = true;
      }
      if (!any) continue;
      fft_.to_real();
      const double* f = fft_.real_data();
      for (std::size_t p = 0; p < sq.size(); ++p) sq[p] += f[p] * f[p];
    }
    double peak = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t l = 0; l < std::size_t(n); ++l) peak = std::max(peak, sq[r * stride + l]);
    out.push_back(std::pow(dyadic(q), 1.0 - 2.0 * config_.alpha) * std::sqrt(peak));
  }
  return out;
}

RunResult run(const SparseSpectralField& initial, const std::vector<int>& qs, const SolverConfig& config,
              const std::function<void(const DiagnosticsRecord&)>& on_record) {
  Solver solver(config);
  SolverState state = solver.make_state(initial);
  const Coefficients u0 = state.u;
  const std::size_t shells = std::size_t(solver.lattice().max_shell() + 1);
  auto shell_value = [shells](const std::vector<double>& v, int q) {
    return (q >= 0 && std::size_t(q) < shells) ? v[std::size_t(q)] : 0.0;
  };

  RunResult result;
  result.initial_energy = solver.energy(u0);
  const std::vector<double> initial_shells = solver.shell_energies(u0);
  result.summary.qs = qs;
  result.summary.max_inflation.assign(qs.size(), 0.0);
  result.summary.time_of_max.assign(qs.size(), 0.0);

  auto record = [&]() {
    DiagnosticsRecord r;
    r.t = state.t;
    r.energy = solver.energy(state.u);
    r.dissipation = state.dissipation;
    r.residual = (r.energy + 2.0 * config.nu * r.dissipation - result.initial_energy) / result.initial_energy;
    const auto se = solver.shell_energies(state.u);
    for (int q : qs) {
      r.shell_energy.push_back(shell_value(se, q));
      r.extended_energy.push_back(shell_value(se, q - 1) + shell_value(se, q) + shell_value(se, q + 1));
    }
    r.inflation = solver.perturbation_diagnostics(state.u, u0, qs);
    for (std::size_t j = 0; j < qs.size(); ++j)
      if (r.inflation[j] > result.summary.max_inflation[j]) {
        result.summary.max_inflation[j] = r.inflation[j];
        result.summary.time_of_max[j] = r.t;
      }
    result.max_abs_residual = std::max(result.max_abs_residual, std::abs(r.residual));
    if (on_record) on_record(r);
    result.records.push_back(std::move(r));
  };

  const long total = config.step_count();
  record();
  for (long s = 1; s <= total; ++s) {
    solver.step(state);
    result.max_cfl = std::max(result.max_cfl, solver.last_cfl());
    if (s == config.t_star_steps) {
      const double t_star = state.t;
      result.summary.t_star = t_star;
      const auto se = solver.shell_energies(state.u);
      for (int q : qs) {
        const double gain = shell_value(se, q) - shell_value(initial_shells, q) +
                            2.0 * config.nu * shell_value(state.shell_dissipation, q);
        result.summary.growth_coefficient.push_back(gain /
                                                    (std::pow(dyadic(q), 6.0 * config.alpha - 5.0) * t_star));
      }
    }
    if (s % config.diag_every == 0 || s == total) record();
  }
  result.steps = total;
  return result;
}

RunResult run(const Datum& datum, const SolverConfig& config,
              const std::function<void(const DiagnosticsRecord&)>& on_record) {
  return run(datum.field, datum.config.sequence.qs, config, on_record);
}

double ShellRateCheck::relative_error() const {
  const double scale = std::abs(predicted);
  return scale > 0.0 ? std::abs(extrapolated - predicted) / scale : std::abs(extrapolated);
}

std::vector<ShellRateCheck> shell_growth_check(const SparseSpectralField& initial, const std::vector<int>& qs,
                                               const SolverConfig& config, double h) {
  Solver solver(config);
  const SolverState start = solver.make_state(initial);
  const auto e0 = solver.shell_energies(start.u);

  SolverState a = start;
  solver.step(a, h);
  const auto e_h = solver.shell_energies(a.u);
  SolverState b = start;
  solver.step(b, 0.5 * h);
  const auto e_half = solver.shell_energies(b.u);

  std::vector<ShellRateCheck> out;
  for (int q : qs) {
    ShellRateCheck c;
    c.q = q;
    const std::size_t iq = std::size_t(q);
    c.rate_h = (e_h[iq] - e0[iq]) / h;
    c.rate_half = (e_half[iq] - e0[iq]) / (0.5 * h);
    c.extrapolated = 2.0 * c.rate_half - c.rate_h;
    const SparseSpectralField uq = lp_project(initial, q);
    c.dissipative = -2.0 * config.nu * homogeneous_sobolev_norm2(uq, config.alpha);
    c.transfer = config.nonlinear ? 2.0 * tri(initial, initial, uq) : 0.0;
    c.predicted = c.dissipative + c.transfer;
    out.push_back(c);
  }
  return out;
}

std::string diagnostics_csv_header(const std::vector<int>& qs) {
  std::string h = "t,energy,E,residual";
  for (int q : qs) h += ",shell_e_q" + std::to_string(q);
  for (int q : qs) h += ",shell_ext_e_q" + std::to_string(q);
  for (int q : qs) h += ",D_q" + std::to_string(q);
  return h;
}

std::string to_csv_row(const DiagnosticsRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.t << ',' << r.energy << ',' << r.dissipation << ',' << r.residual;
  for (double v : r.shell_energy) os << ',' << v;
  for (double v : r.extended_energy) os << ',' << v;
  for (double v : r.inflation) os << ',' << v;
  return os.str();
}

json to_json(const SolverConfig& c) {
  return json{{"n", c.n},
              {"nu", c.nu},
              {"alpha", c.alpha},
              {"dt", c.dt},
              {"t_end", c.t_end},
              {"diag_every", c.diag_every},
              {"nonlinear", c.nonlinear},
              {"cfl_limit", c.cfl_limit},
              {"cfl_policy", c.cfl_policy == CflPolicy::kAbort ? "abort" : "warn"},
              {"t_star_steps", c.t_star_steps},
              {"inflation_threshold", c.inflation_threshold}};
}

SolverConfig solver_config_from_json(const json& j, SolverConfig c) {
  if (!j.is_object()) throw ConfigError("solver configuration must be a JSON object");
  try {
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("nu")) c.nu = j.at("nu").get<double>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
    if (j.contains("diag_every")) c.diag_every = j.at("diag_every").get<int>();
    if (j.contains("nonlinear")) c.nonlinear = j.at("nonlinear").get<bool>();
    if (j.contains("cfl_limit")) c.cfl_limit = j.at("cfl_limit").get<double>();
    if (j.contains("cfl_policy")) {
      const auto p = j.at("cfl_policy").get<std::string>();
      if (p == "abort") c.cfl_policy = CflPolicy::kAbort;
      else if (p == "warn") c.cfl_policy = CflPolicy::kWarn;
      else throw ConfigError("cfl_policy must be \"abort\" or \"warn\"");
    }
    if (j.contains("t_star_steps")) c.t_star_steps = j.at("t_star_steps").get<int>();
    if (j.contains("inflation_threshold")) c.inflation_threshold = j.at("inflation_threshold").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad solver configuration: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const PerturbationSummary& s) {
  json j{{"qs", s.qs}, {"max_D", s.max_inflation}, {"time_of_max_D", s.time_of_max}};
  j["t_star"] = s.t_star ? json(*s.t_star) : json(nullptr);
  j["c1_hat"] = s.growth_coefficient;
  return j;
}

}  // namespace hyperns
