#include "gms/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <sstream>

#include "gms/errors.hpp"

namespace gms {

namespace {

std::string short_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("bad " + what + " '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("bad " + what + " '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

io::Json descriptor_json(const EnsembleDescriptor& d) {
  return io::Json{{"n", d.n},
                  {"nu", d.nu},
                  {"radius", radius_for(d.n, d.nu)},
                  {"trials", d.trials},
                  {"seed", d.seed},
                  {"cell", {{"omega1", d.omega1}, {"omega2", {d.omega2.real(), d.omega2.imag()}}}},
                  {"nu_guard", d.nu_guard},
                  {"max_attempts", d.max_attempts},
                  {"generator", "rsa"},
                  {"seed_rule", "master xor splitmix64(trial)"}};
}

io::Json stat_json(const Statistic& s) {
  io::Json j{{"mean", s.mean}, {"count", s.count}};
  j["stderr"] = s.stderr_ ? io::Json(*s.stderr_) : io::Json(nullptr);
  return j;
}

// Rethrows a per-trial failure with the trial index in the message.
[[noreturn]] void rethrow_for_trial(std::exception_ptr e, int trial) {
  const std::string prefix = "trial " + std::to_string(trial) + ": ";
  try {
    std::rethrow_exception(e);
  } catch (const GenerationFailure& g) {
    throw GenerationFailure(prefix + g.what(), g.placed(), g.attempts());
  } catch (const ConvergenceFailure& c) {
    throw ConvergenceFailure(prefix + c.what(), c.residuals());
  } catch (const Error& g) {
    throw DomainError(prefix + g.what());
  }
}

// Runs `body(trial)` for every trial concurrently; the lowest failing trial
// index is reported.
template <class Body>
void for_each_trial(int trials, Body&& body) {
  std::vector<std::exception_ptr> errors(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    try {
      body(t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (int t = 0; t < trials; ++t)
    if (errors[t]) rethrow_for_trial(errors[t], t);
}

DiskConfiguration trial_configuration(const EnsembleDescriptor& desc, const Cell& cell, std::uint64_t seed) {
  return rsa_generate(cell, desc.n, radius_for(desc.n, desc.nu), seed, desc.max_attempts);
}

}  // namespace

std::string Quantity::name() const {
  switch (kind) {
    case Kind::esum: {
      std::string s;
      const bool compact = std::all_of(index->entries().begin(), index->entries().end(), [](int m) { return m < 10; });
      for (int m : index->entries()) s += (compact || s.empty()) ? std::to_string(m) : "-" + std::to_string(m);
      return "e" + s;
    }
    case Kind::lambda_solver: return "lambda-solver:" + short_double(rho);
    case Kind::lambda_series: return "lambda-series:" + short_double(rho) + ":" + std::to_string(order);
    case Kind::zeta1: return "zeta1:" + std::to_string(n_max);
  }
  return "?";
}

std::vector<std::string> Quantity::columns() const {
  const std::string n = name();
  switch (kind) {
    case Kind::esum: return {n + ".re", n + ".im"};
    case Kind::lambda_solver:
    case Kind::lambda_series: return {n + ".l11", n + ".l12"};
    case Kind::zeta1: return {n, n + ".im"};
  }
  return {};
}

int Quantity::kernel_order(int degree) const {
  switch (kind) {
    case Kind::esum: return index->max_entry();
    case Kind::lambda_solver: return kernel_order_for(degree);
    case Kind::lambda_series: return order >= 2 ? std::max(2, order) : 2;
    case Kind::zeta1: return n_max;
  }
  return 2;
}

Quantity parse_quantity(const std::string& text) {
  Quantity q;
  const auto parts = split(text, ':');
  if (parts.empty()) throw DomainError("empty quantity");
  const std::string& head = parts[0];
  if (head == "lambda-solver") {
    if (parts.size() != 2) throw DomainError("lambda-solver needs ':RHO'");
    q.kind = Quantity::Kind::lambda_solver;
    q.rho = parse_double(parts[1], "rho");
  } else if (head == "lambda-series") {
    if (parts.size() < 2 || parts.size() > 3) throw DomainError("lambda-series needs ':RHO[:J]'");
    q.kind = Quantity::Kind::lambda_series;
    q.rho = parse_double(parts[1], "rho");
    if (parts.size() == 3) q.order = parse_int(parts[2], "order");
    required_indices(q.order);  // validates 1..6
  } else if (head == "zeta1") {
    if (parts.size() > 2) throw DomainError("zeta1 takes at most ':NMAX'");
    q.kind = Quantity::Kind::zeta1;
    if (parts.size() == 2) q.n_max = parse_int(parts[1], "n_max");
    if (q.n_max < 2) throw DomainError("zeta1 needs n_max >= 2");
  } else if (head.size() > 1 && head[0] == 'e' && parts.size() == 1) {
    q.kind = Quantity::Kind::esum;
    q.index = MultiIndex::parse(head.substr(1));
  } else {
    throw DomainError("unknown quantity '" + text + "'");
  }
  if (std::abs(q.rho) > 1.0) throw DomainError("contrast parameter must lie in [-1, 1]");
  return q;
}

std::vector<Quantity> parse_quantities(const std::string& text) {
  std::vector<Quantity> out;
  for (const auto& part : split(text, ','))
    if (!part.empty()) out.push_back(parse_quantity(part));
  if (out.empty()) throw DomainError("no quantities requested");
  return out;
}

Statistic summarize(const std::string& name, const std::vector<double>& values) {
  Statistic s;
  s.name = name;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (s.count - 1)) / std::sqrt(double(s.count));
  }
  return s;
}

const Statistic& EnsembleStats::stat(const std::string& column) const {
  for (const auto& s : stats)
    if (s.name == column) return s;
  throw DomainError("no statistic named '" + column + "'");
}

EnsembleStats run_ensemble(const EnsembleDescriptor& desc, const std::vector<Quantity>& quantities,
                           const RunOptions& options) {
  desc.validate();
  options.solver.validate();
  if (quantities.empty()) throw DomainError("no quantities requested");
  const Cell cell = desc.cell();

  EnsembleStats out;
  out.desc = desc;
  out.quantities = quantities;
  for (const auto& q : quantities)
    for (auto& c : q.columns()) out.columns.push_back(c);
  int order = 2;
  for (const auto& q : quantities) order = std::max(order, q.kernel_order(options.solver.degree));

  out.seeds.resize(desc.trials);
  for (int t = 0; t < desc.trials; ++t) out.seeds[t] = trial_seed(desc.seed, static_cast<std::uint64_t>(t));
  out.per_trial.assign(desc.trials, std::vector<double>(out.columns.size(), 0.0));
  std::vector<std::vector<EsumTable>> tables(quantities.size(), std::vector<EsumTable>());
  for (std::size_t i = 0; i < quantities.size(); ++i)
    if (quantities[i].kind == Quantity::Kind::lambda_series) tables[i].resize(desc.trials);

  for_each_trial(desc.trials, [&](int t) {
    const auto config = trial_configuration(desc, cell, out.seeds[t]);
    const KernelCache kernels(config, order, KernelCache::Build::serial);
    const double nu = config.concentration();
    auto& row = out.per_trial[t];
    std::size_t c = 0;
    for (std::size_t i = 0; i < quantities.size(); ++i) {
      const auto& q = quantities[i];
      switch (q.kind) {
        case Quantity::Kind::esum: {
          const cdouble e = esum_serial(kernels, *q.index);
          row[c++] = e.real();
          row[c++] = e.imag();
          break;
        }
        case Quantity::Kind::lambda_solver: {
          const auto r = solve_contrast(kernels, config.radius(), q.rho, options.solver);
          row[c++] = r.lambda11;
          row[c++] = r.lambda12;
          break;
        }
        case Quantity::Kind::lambda_series: {
          auto& table = tables[i][t];
          table = esum_table(kernels, required_indices(q.order));
          const auto r = lambda_cluster(q.rho, nu, cluster_coeffs(table, q.rho, q.order));
          row[c++] = r.lambda11;
          row[c++] = r.lambda12;
          break;
        }
        case Quantity::Kind::zeta1: {
          NnTable nn;
          for (int n = 2; n <= q.n_max; ++n) nn[n] = esum_nn(kernels, n);
          const cdouble z = zeta1_complex(nu, nn, q.n_max);
          row[c++] = z.real();
          row[c++] = z.imag();
          break;
        }
      }
    }
  });

  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    std::vector<double> column(desc.trials);
    for (int t = 0; t < desc.trials; ++t) column[t] = out.per_trial[t][c];
    out.stats.push_back(summarize(out.columns[c], column));
  }
  for (std::size_t i = 0; i < quantities.size(); ++i) {
    const auto& q = quantities[i];
    if (q.kind != Quantity::Kind::lambda_series) continue;
    EsumTable mean;
    for (const auto& idx : required_indices(q.order)) {
      cdouble sum = 0.0;
      for (int t = 0; t < desc.trials; ++t) sum += tables[i][t].at(idx);
      mean[idx] = sum / double(desc.trials);
    }
    const auto r = lambda_cluster(q.rho, desc.nu, cluster_coeffs(mean, q.rho, q.order, Provenance::ensemble));
    out.series_from_mean_esums[q.name()] = cdouble(r.lambda11, -r.lambda12);
  }
  return out;
}

io::Json EnsembleStats::to_json() const {
  io::Json j;
  j["descriptor"] = descriptor_json(desc);
  io::Json names = io::Json::array();
  for (const auto& q : quantities) names.push_back(q.name());
  j["quantities"] = std::move(names);
  io::Json st = io::Json::object();
  for (const auto& s : stats) st[s.name] = stat_json(s);
  j["statistics"] = std::move(st);

  const double nu = desc.nu;
  io::Json derived = io::Json::object();
  for (const auto& q : quantities) {
    const std::string n = q.name();
    io::Json d;
    switch (q.kind) {
      case Quantity::Kind::esum: {
        if (q.index->entries() == std::vector<int>{2}) {
          const auto& re = stat(n + ".re");
          d["relative_error_vs_pi"] = std::abs(re.mean - kPi) / kPi;
          d["pi_within_3_stderr"] = re.stderr_ ? io::Json(std::abs(re.mean - kPi) < 3.0 * *re.stderr_) : io::Json(nullptr);
        }
        break;
      }
      case Quantity::Kind::lambda_solver:
      case Quantity::Kind::lambda_series: {
        const auto& l11 = stat(n + ".l11");
        const auto& l12 = stat(n + ".l12");
        d["lambda_e"] = l11.mean;
        d["lambda_e_stderr"] = l11.stderr_ ? io::Json(*l11.stderr_) : io::Json(nullptr);
        d["lambda12_mean"] = l12.mean;
        d["isotropic"] = l12.stderr_ ? io::Json(std::abs(l12.mean) < 3.0 * *l12.stderr_) : io::Json(nullptr);
        if (auto it = series_from_mean_esums.find(n); it != series_from_mean_esums.end()) {
          d["from_mean_esums"] = {{"lambda11", it->second.real()}, {"lambda12", -it->second.imag()}};
          d["reduction_difference"] = it->second.real() - l11.mean;
        }
        break;
      }
      case Quantity::Kind::zeta1: {
        const auto& re = stat(n);
        const auto& im = stat(n + ".im");
        d["zeta1"] = re.mean;
        d["zeta1_stderr"] = re.stderr_ ? io::Json(*re.stderr_) : io::Json(nullptr);
        d["a13"] = re.mean * nu * (1.0 - nu);
        d["imag_within_noise"] = im.stderr_ ? io::Json(std::abs(im.mean) < 3.0 * *im.stderr_ + 1e-14) : io::Json(nullptr);
        break;
      }
    }
    if (!d.is_null()) derived[n] = std::move(d);
  }
  j["derived"] = std::move(derived);
  return j;
}

void EnsembleStats::write_trials_csv(std::ostream& out) const {
  out << "trial,seed";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (std::size_t t = 0; t < per_trial.size(); ++t) {
    out << t << ',' << seeds[t];
    for (double v : per_trial[t]) out << ',' << io::format_double(v);
    out << '\n';
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

io::Json make_manifest(const EnsembleStats& stats, const std::vector<std::string>& outputs, const std::string& started,
                       const std::string& finished) {
  io::Json j;
  j["code_version"] = kCodeVersion;
  j["descriptor"] = descriptor_json(stats.desc);
  io::Json names = io::Json::array();
  for (const auto& q : stats.quantities) names.push_back(q.name());
  j["quantities"] = std::move(names);
  j["trial_seeds"] = stats.seeds;
  j["outputs"] = outputs;
  j["started"] = started;
  j["finished"] = finished;
  return j;
}

void write_ensemble_outputs(const std::string& dir, const EnsembleStats& stats, const std::string& started,
                            const std::string& finished) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  const std::string stats_path = (base / "stats.json").string();
  const std::string trials_path = (base / "trials.csv").string();
  const std::string manifest_path = (base / "manifest.json").string();
  io::write_file(stats_path, io::dump(stats.to_json()) + "\n");
  std::ostringstream csv;
  stats.write_trials_csv(csv);
  io::write_file(trials_path, csv.str());
  io::write_file(manifest_path,
                 io::dump(make_manifest(stats, {stats_path, trials_path, manifest_path}, started, finished)) + "\n");
}

const MethodRow& CompareReport::row(Method m) const {
  for (const auto& r : rows)
    if (r.method == m) return r;
  throw DomainError("method missing from report");
}

void CompareReport::write_csv(std::ostream& out) const {
  out << "method,rho,nu,order,lambda11,lambda11_stderr,lambda12,diff_vs_solver,error_scale\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << io::format_double(rho) << ',' << io::format_double(nu) << ',' << r.order
        << ',' << io::format_double(r.lambda11.mean) << ','
        << (r.lambda11.stderr_ ? io::format_double(*r.lambda11.stderr_) : std::string()) << ','
        << io::format_double(r.lambda12.mean) << ',' << io::format_double(r.diff_vs_solver) << ','
        << io::format_double(r.error_scale) << '\n';
  }
}

CompareReport compare_methods(const EnsembleDescriptor& desc, double rho, int order, int n_max,
                              const RunOptions& options) {
  desc.validate();
  options.solver.validate();
  required_indices(order);
  if (n_max < 2) throw DomainError("n_max must be >= 2");
  if (std::abs(rho) > 1.0) throw DomainError("contrast parameter must lie in [-1, 1]");
  const Cell cell = desc.cell();
  const double radius = radius_for(desc.n, desc.nu);
  const double nu = desc.nu;
  const double alpha = shape_factor(cell, radius, rho, options.solver.degree);
  const int kernel_order = std::max({kernel_order_for(options.solver.degree), n_max, order});

  constexpr int kMethods = 5;
  const Method methods[kMethods] = {Method::cluster_series, Method::contrast_series, Method::solver, Method::dilute,
                                    Method::pade};
  // values[method][trial] = lambda11 - i lambda12
  std::vector<std::vector<cdouble>> values(kMethods, std::vector<cdouble>(desc.trials));
  const cdouble dilute = lambda_dilute(nu, rho, alpha).lambda11;
  const cdouble pade = std::abs(1.0 - rho * nu * alpha) < 1e-12 ? cdouble(std::nan("")) : cdouble(lambda_pade(nu, rho, alpha).lambda11);

  for_each_trial(desc.trials, [&](int t) {
    const auto config = trial_configuration(desc, cell, trial_seed(desc.seed, static_cast<std::uint64_t>(t)));
    const KernelCache kernels(config, kernel_order, KernelCache::Build::serial);
    const auto table = esum_table(kernels, required_indices(order));
    const auto cluster = lambda_cluster(rho, nu, cluster_coeffs(table, rho, order));
    values[0][t] = cdouble(cluster.lambda11, -cluster.lambda12);
    NnTable nn;
    for (int n = 2; n <= n_max; ++n) nn[n] = esum_nn(kernels, n);
    const auto contrast = lambda_contrast(nu, nn, rho, n_max, esum(kernels, MultiIndex{2}));
    values[1][t] = cdouble(contrast.lambda11, -contrast.lambda12);
    values[2][t] = solve_contrast(kernels, radius, rho, options.solver).lambda();
    values[3][t] = dilute;
    values[4][t] = pade;
  });

  CompareReport report;
  report.rho = rho;
  report.nu = nu;
  report.order = order;
  report.n_max = n_max;
  report.alpha = alpha;
  for (int m = 0; m < kMethods; ++m) {
    std::vector<double> l11(desc.trials), l12(desc.trials);
    for (int t = 0; t < desc.trials; ++t) {
      l11[t] = values[m][t].real();
      l12[t] = -values[m][t].imag();
    }
    MethodRow row;
    row.method = methods[m];
    row.lambda11 = summarize("lambda11", l11);
    row.lambda12 = summarize("lambda12", l12);
    switch (row.method) {
      case Method::cluster_series:
        row.order = order;
        row.error_scale = std::pow(nu, order + 1);
        break;
      case Method::contrast_series:
        row.order = n_max;
        row.error_scale = std::pow(rho, 4);
        break;
      case Method::dilute:
      case Method::pade: row.error_scale = nu * nu; break;
      case Method::solver: row.error_scale = options.solver.tolerance; break;
    }
    report.rows.push_back(row);
  }
  const double solver_mean = report.row(Method::solver).lambda11.mean;
  for (auto& r : report.rows) r.diff_vs_solver = r.lambda11.mean - solver_mean;
  return report;
}

}  // namespace gms
