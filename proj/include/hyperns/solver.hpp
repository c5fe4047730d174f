#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hyperns/datum.hpp"
#include "hyperns/fft.hpp"
#include "hyperns/sparse_field.hpp"

namespace hyperns {

enum class CflPolicy { kWarn, kAbort };

struct SolverConfig {
  int n = 192;
  double nu = 1e-2;
  double alpha = 1.0;
  double dt = 2e-3;
  double t_end = 0.5;
  int diag_every = 10;
  bool nonlinear = true;
  double cfl_limit = 1.0;  // on max|u| * dt * n / 2
  CflPolicy cfl_policy = CflPolicy::kAbort;
  int t_star_steps = 20;
  double inflation_threshold = 0.5;

  /// Throws ConfigError on non-positive n, nu, dt, t_end or diag_every.
  void validate() const;
  long step_count() const;
};

/// Modes kept by the two-thirds rule on an n^3 grid: |k_x|, |k_y|, |k_z| <= K with
/// K the largest integer below n / 3, stored for k_z >= 0 only. The k_z = 0
/// plane holds both members of each conjugate pair.
class GalerkinLattice {
 public:
  explicit GalerkinLattice(int n);

  int n() const { return n_; }
  int band() const { return band_; }
  std::size_t size() const { return modes_.size(); }

  Frequency frequency(std::size_t i) const { return {modes_[i][0], modes_[i][1], modes_[i][2]}; }
  /// Multiplicity of the mode in full-lattice sums: 1 on k_z = 0, else 2.
  double weight(std::size_t i) const { return modes_[i][2] == 0 ? 1.0 : 2.0; }
  int shell(std::size_t i) const { return shells_[i]; }
  int max_shell() const { return max_shell_; }
  bool contains(Frequency k) const {
    return std::abs(k.x) <= band_ && std::abs(k.y) <= band_ && std::abs(k.z) <= band_;
  }
  /// Position of k (k_z >= 0, inside the band).
  std::size_t index(Frequency k) const {
    const std::size_t side = std::size_t(2 * band_ + 1);
    return (std::size_t(k.x + band_) * side + std::size_t(k.y + band_)) * std::size_t(band_ + 1) + std::size_t(k.z);
  }

 private:
  int n_ = 0;
  int band_ = 0;
  int max_shell_ = 0;
  std::vector<std::array<std::int16_t, 3>> modes_;
  std::vector<std::int8_t> shells_;
};

/// 3 * lattice.size() coefficients, component-major.
using Coefficients = std::vector<Complex>;

struct SolverState {
  double t = 0.0;
  long steps = 0;
  Coefficients u;
  double dissipation = 0.0;                // E(t) = int_0^t || |nabla|^alpha u ||_2^2 ds
  std::vector<double> shell_dissipation;   // the same integral per shell q
};

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double residual = 0.0;  // (|u|^2 + 2 nu E - |U|^2) / |U|^2
  std::vector<double> shell_energy;     // |u_{q_j}|^2
  std::vector<double> extended_energy;  // |u~_{q_j}|^2
  std::vector<double> inflation;        // D_j
};

struct PerturbationSummary {
  std::vector<int> qs;
  std::vector<double> max_inflation;
  std::vector<double> time_of_max;
  std::optional<double> t_star;
  std::vector<double> growth_coefficient;  // c1_hat(j); empty when the run ends before t*
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  PerturbationSummary summary;
  double initial_energy = 0.0;
  double max_cfl = 0.0;
  double max_abs_residual = 0.0;
  long steps = 0;
};

/// Integrating-factor RK4 (Lawson) for
///   d_t u + nu |nabla|^{2 alpha} u = -P(u . grad u)
/// on the two-thirds-dealiased lattice. E(t) and the per-shell dissipation
/// integrals are carried as extra RK4 components, so the energy balance
/// closes to the order of the scheme.
class Solver {
 public:
  explicit Solver(SolverConfig config);

  const SolverConfig& config() const { return config_; }
  const GalerkinLattice& lattice() const { return lattice_; }

  /// Throws ConfigError if U does not fit inside the dealiasing band or has a mean.
  SolverState make_state(const SparseSpectralField& u) const;
  SparseSpectralField to_sparse(const Coefficients& u) const;

  /// -P(u . grad u), dealiased. Throws InstabilityError on non-finite samples.
  /// max_speed, when given, receives max_x |u(x)|.
  void nonlinear_rhs(const Coefficients& u, Coefficients& out, double* max_speed = nullptr);

  /// One step of size h (config().dt when omitted).
  void step(SolverState& state, std::optional<double> h = std::nullopt);

  double energy(const Coefficients& u) const;
  /// |u_q|^2 for q = 0..lattice().max_shell().
  std::vector<double> shell_energies(const Coefficients& u) const;
  /// D_j = lambda_{q_j}^{1 - 2 alpha} |(u - u0)_{q_j}|_inf on the solver grid.
  std::vector<double> perturbation_diagnostics(const Coefficients& u, const Coefficients& u0,
                                               const std::vector<int>& qs);

  double last_cfl() const { return last_cfl_; }

 private:
  void dissipation_rates(const Coefficients& u, std::vector<double>& per_shell, double& total) const;
  void prepare_factors(double h);

  SolverConfig config_;
  GalerkinLattice lattice_;
  BandedFft3 fft_;
  std::vector<double> symbol_;  // |k|^{2 alpha}
  std::array<std::vector<double>, 3> velocity_;
  double factor_h_ = -1.0;
  std::vector<double> half_factor_, full_factor_;
  Coefficients stage_, slope_, accum_;
  double last_cfl_ = 0.0;
  bool cfl_warned_ = false;
};

/// Integrates from U and records diagnostics every diag_every steps and at the end.
RunResult run(const SparseSpectralField& initial, const std::vector<int>& qs, const SolverConfig& config,
              const std::function<void(const DiagnosticsRecord&)>& on_record = {});
RunResult run(const Datum& datum, const SolverConfig& config,
              const std::function<void(const DiagnosticsRecord&)>& on_record = {});

/// Finite-difference rate of |u_q|^2 at t = 0 from single steps of size h and h / 2,
/// its Richardson extrapolation, and the value predicted by the shell-energy identity
/// -2 nu || |nabla|^alpha U_q ||^2 + 2 tri(U, U, U_q).
struct ShellRateCheck {
  int q = 0;
  double rate_h = 0.0;
  double rate_half = 0.0;
  double extrapolated = 0.0;
  double dissipative = 0.0;
  double transfer = 0.0;   // 2 tri(U, U, U_q)
  double predicted = 0.0;
  double relative_error() const;
};
std::vector<ShellRateCheck> shell_growth_check(const SparseSpectralField& initial, const std::vector<int>& qs,
                                               const SolverConfig& config, double h);

std::string diagnostics_csv_header(const std::vector<int>& qs);
std::string to_csv_row(const DiagnosticsRecord& record);

json to_json(const SolverConfig& config);
/// Reads the keys present in j over the defaults in base. Throws ConfigError on bad values.
SolverConfig solver_config_from_json(const json& j, SolverConfig base = {});
json to_json(const PerturbationSummary& summary);

}  // namespace hyperns
