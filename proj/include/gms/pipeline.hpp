#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gms/geometry.hpp"
#include "gms/io.hpp"
#include "gms/solver.hpp"

namespace gms {

inline constexpr const char* kCodeVersion = "1.0.0";

/// One per-configuration quantity requested from an ensemble run.
///   e<idx>                  structural sum, e.g. e2, e22, e3-3-2
///   lambda-solver:RHO       solver lambda11, lambda12
///   lambda-series:RHO[:J]   cluster series, default J = 6
///   zeta1[:NMAX]            Torquato-Milton parameter, default n_max = 12
struct Quantity {
  enum class Kind { esum, lambda_solver, lambda_series, zeta1 };

  Kind kind = Kind::esum;
  std::optional<MultiIndex> index;
  double rho = 0.0;
  int order = kMaxClusterOrder;
  int n_max = kDefaultContrastTail;

  std::string name() const;
  /// Per-trial CSV columns produced by this quantity.
  std::vector<std::string> columns() const;
  /// Highest Eisenstein order needed given the solver degree.
  int kernel_order(int degree) const;
};

Quantity parse_quantity(const std::string& text);
/// Comma-separated list.
std::vector<Quantity> parse_quantities(const std::string& text);

struct Statistic {
  std::string name;
  double mean = 0.0;
  /// Sample standard deviation / sqrt(trials); empty for a single trial.
  std::optional<double> stderr_;
  int count = 0;
};

Statistic summarize(const std::string& name, const std::vector<double>& values);

struct RunOptions {
  SolverParams solver;
};

/// Means and standard errors over an RSA ensemble.
struct EnsembleStats {
  EnsembleDescriptor desc;
  std::vector<Quantity> quantities;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> columns;
  /// per_trial[t][c], trials ordered by index.
  std::vector<std::vector<double>> per_trial;
  std::vector<Statistic> stats;
  /// lambda-series quantities assembled from ensemble-averaged sums, by name.
  std::map<std::string, cdouble> series_from_mean_esums;

  const Statistic& stat(const std::string& column) const;

  /// Summary document without timestamps (byte-stable across reruns).
  io::Json to_json() const;
  /// "trial,seed,<columns>" rows.
  void write_trials_csv(std::ostream& out) const;
};

/// Generates desc.trials RSA configurations with seeds trial_seed(desc.seed, i),
/// evaluates every quantity on each and reduces in trial order. A failing
/// trial aborts the run; the error names the lowest failing trial index.
EnsembleStats run_ensemble(const EnsembleDescriptor& desc, const std::vector<Quantity>& quantities,
                           const RunOptions& options = {});

/// Run manifest: descriptor, quantities, per-trial seeds, code version,
/// timestamps and output paths.
io::Json make_manifest(const EnsembleStats& stats, const std::vector<std::string>& outputs,
                       const std::string& started, const std::string& finished);

/// Writes stats.json, trials.csv and manifest.json into `dir`.
void write_ensemble_outputs(const std::string& dir, const EnsembleStats& stats, const std::string& started,
                            const std::string& finished);

std::string utc_timestamp();

struct MethodRow {
  Method method;
  Statistic lambda11;
  Statistic lambda12;
  int order = 0;
  double diff_vs_solver = 0.0;
  double error_scale = 0.0;
};

struct CompareReport {
  double rho = 0.0;
  double nu = 0.0;
  int order = 0;
  int n_max = 0;
  double alpha = 1.0;
  std::vector<MethodRow> rows;

  const MethodRow& row(Method m) const;
  void write_csv(std::ostream& out) const;
};

/// lambda_e by cluster series, contrast series, solver, dilute and Pade
/// forms over the same ensemble, with differences against the solver.
CompareReport compare_methods(const EnsembleDescriptor& desc, double rho, int order, int n_max,
                              const RunOptions& options = {});

}  // namespace gms
