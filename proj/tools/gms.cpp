#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gms/errors.hpp"
#include "gms/pipeline.hpp"

namespace {

using namespace gms;

struct CellArg {
  std::string text = "1,0,1";

  void apply(EnsembleDescriptor& d) const {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        v.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw DomainError("bad --cell '" + text + "'");
      }
    }
    if (v.size() != 3) throw DomainError("--cell takes w1,w2re,w2im");
    d.omega1 = v[0];
    d.omega2 = cdouble(v[1], v[2]);
  }
};

void add_ensemble_options(CLI::App* cmd, EnsembleDescriptor& d, CellArg& cell) {
  cmd->add_option("--n", d.n, "Disks per cell")->capture_default_str();
  cmd->add_option("--nu", d.nu, "Concentration")->capture_default_str();
  cmd->add_option("--trials", d.trials, "Number of configurations")->capture_default_str();
  cmd->add_option("--seed", d.seed, "Master seed")->capture_default_str();
  cmd->add_option("--cell", cell.text, "Periods w1,w2re,w2im (rescaled to unit area)")->capture_default_str();
  cmd->add_option("--nu-guard", d.nu_guard, "Largest concentration accepted for RSA")->capture_default_str();
  cmd->add_option("--max-attempts", d.max_attempts, "RSA candidate budget per trial")->capture_default_str();
}

void add_solver_options(CLI::App* cmd, SolverParams& p) {
  cmd->add_option("--degree", p.degree, "Taylor degree L")->capture_default_str();
  cmd->add_option("--tol", p.tolerance, "Residual tolerance")->capture_default_str();
  cmd->add_option("--max-iter", p.max_iterations, "Iteration cap")->capture_default_str();
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective conductivity of periodic disk composites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kCodeVersion));

  EnsembleDescriptor desc;
  CellArg cell;
  std::string out_path;
  std::string config_path;
  std::vector<std::string> indices;
  double rho = 1.0;
  int order = kMaxClusterOrder;
  int n_max = kDefaultContrastTail;
  std::string method = "solver";
  std::string quantities = "e2";
  SolverParams solver;
  std::optional<double> alpha;
  std::optional<int> contrast_order;

  auto* gen = app.add_subcommand("gen", "Generate RSA configurations");
  add_ensemble_options(gen, desc, cell);
  gen->add_option("--out", out_path, "Output directory")->required();

  auto* es = app.add_subcommand("esum", "Structural sums of one configuration (CSV)");
  es->add_option("--config", config_path, "Configuration JSON")->required()->check(CLI::ExistingFile);
  es->add_option("--index", indices, "Multi-index such as 3-3-2 (repeatable)")->required();

  auto* co = app.add_subcommand("coeffs", "Cluster coefficients A_1..A_J (CSV)");
  co->add_option("--config", config_path, "Configuration JSON")->required()->check(CLI::ExistingFile);
  co->add_option("--rho", rho, "Contrast parameter")->capture_default_str();
  co->add_option("--order", order, "Series order J")->capture_default_str();

  auto* la = app.add_subcommand("lambda", "Effective conductivity of one configuration (JSON)");
  la->add_option("--config", config_path, "Configuration JSON")->required()->check(CLI::ExistingFile);
  la->add_option("--rho", rho, "Contrast parameter")->capture_default_str();
  la->add_option("--method", method, "cluster|contrast|solver|dilute|pade")->capture_default_str();
  la->add_option("--order", order, "Cluster series order J")->capture_default_str();
  la->add_option("--nmax", n_max, "Contrast series tail order")->capture_default_str();
  la->add_option("--alpha", alpha, "Shape factor for dilute/pade (default: one-disk solve)");
  la->add_option("--contrast-order", contrast_order, "Solver: stop after exactly P iterations");
  la->add_option("--dump", solver.dump_path, "Solver: append every iterate to this JSON-lines file");
  add_solver_options(la, solver);

  auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble averages");
  add_ensemble_options(mc, desc, cell);
  mc->add_option("--quantities", quantities,
                 "Comma list of e<idx>, lambda-solver:RHO, lambda-series:RHO[:J], zeta1[:NMAX]")
      ->capture_default_str();
  mc->add_option("--out", out_path, "Output directory")->required();
  add_solver_options(mc, solver);

  auto* cmp = app.add_subcommand("compare", "Compare lambda_e across methods (CSV)");
  add_ensemble_options(cmp, desc, cell);
  cmp->add_option("--rho", rho, "Contrast parameter")->capture_default_str();
  cmp->add_option("--order", order, "Cluster series order J")->capture_default_str();
  cmp->add_option("--nmax", n_max, "Contrast series tail order")->capture_default_str();
  cmp->add_option("--out", out_path, "Write CSV here instead of stdout");
  add_solver_options(cmp, solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      cell.apply(desc);
      desc.validate();
      const std::string started = utc_timestamp();
      std::filesystem::create_directories(out_path);
      const Cell c = desc.cell();
      const double radius = radius_for(desc.n, desc.nu);
      std::vector<std::string> files(desc.trials);
      std::vector<std::uint64_t> seeds(desc.trials);
      for (int t = 0; t < desc.trials; ++t) {
        seeds[t] = trial_seed(desc.seed, static_cast<std::uint64_t>(t));
        char name[32];
        std::snprintf(name, sizeof name, "config_%05d.json", t);
        files[t] = (std::filesystem::path(out_path) / name).string();
        DiskConfiguration config = [&] {
          try {
            return rsa_generate(c, desc.n, radius, seeds[t], desc.max_attempts);
          } catch (const GenerationFailure& g) {
            throw GenerationFailure("trial " + std::to_string(t) + ": " + g.what(), g.placed(), g.attempts());
          }
        }();
        write_configuration(files[t], config, ConfigMeta{seeds[t], "rsa", config.concentration()});
      }
      io::Json m;
      m["code_version"] = kCodeVersion;
      m["descriptor"] = {{"n", desc.n},
                         {"nu", desc.nu},
                         {"radius", radius},
                         {"trials", desc.trials},
                         {"seed", desc.seed},
                         {"cell", {{"omega1", c.omega1()}, {"omega2", {c.omega2().real(), c.omega2().imag()}}}},
                         {"nu_guard", desc.nu_guard},
                         {"max_attempts", desc.max_attempts},
                         {"generator", "rsa"}};
      m["trial_seeds"] = seeds;
      m["outputs"] = files;
      m["started"] = started;
      m["finished"] = utc_timestamp();
      io::write_file((std::filesystem::path(out_path) / "manifest.json").string(), io::dump(m) + "\n");
    } else if (*es) {
      const auto config = read_configuration(config_path);
      std::vector<MultiIndex> parsed;
      int max_order = 2;
      for (const auto& s : indices) {
        parsed.push_back(MultiIndex::parse(s));
        max_order = std::max(max_order, parsed.back().max_entry());
      }
      const KernelCache kernels(config, max_order);
      std::vector<MultiIndexSum> rows;
      for (const auto& idx : parsed) rows.push_back({idx, esum(kernels, idx)});
      write_esum_csv(std::cout, stem(config_path), rows);
    } else if (*co) {
      const auto config = read_configuration(config_path);
      const KernelCache kernels(config, std::max(2, order));
      const auto coeffs = cluster_coeffs(esum_table(kernels, required_indices(order)), rho, order);
      std::cout << "n,re,im\n";
      for (int n = 1; n <= coeffs.order; ++n)
        std::cout << n << ',' << io::format_double(coeffs[n].real()) << ',' << io::format_double(coeffs[n].imag())
                  << '\n';
    } else if (*la) {
      const auto config = read_configuration(config_path);
      const Method m = parse_method(method);
      const double nu = config.concentration();
      io::Json extra = io::Json::object();
      EffectiveResult r;
      switch (m) {
        case Method::cluster_series: {
          const KernelCache kernels(config, std::max(2, order));
          r = lambda_cluster(rho, nu, cluster_coeffs(esum_table(kernels, required_indices(order)), rho, order));
          break;
        }
        case Method::contrast_series: {
          if (n_max < 2) throw DomainError("--nmax must be >= 2");
          const KernelCache kernels(config, n_max);
          NnTable nn;
          for (int n = 2; n <= n_max; ++n) nn[n] = esum_nn(kernels, n);
          r = lambda_contrast(nu, nn, rho, n_max, esum(kernels, MultiIndex{2}));
          break;
        }
        case Method::solver: {
          if (contrast_order) {
            solver.mode = SolverParams::Mode::contrast_order;
            solver.order = *contrast_order;
          }
          const auto s = solve_contrast(config, rho, solver);
          r = s.effective();
          extra["iterations"] = s.iterations;
          extra["residual"] = s.residual;
          extra["degree"] = solver.degree;
          break;
        }
        case Method::dilute:
        case Method::pade: {
          const double a = alpha ? *alpha : shape_factor(config.cell(), config.radius(), rho, solver.degree);
          r = m == Method::dilute ? lambda_dilute(nu, rho, a) : lambda_pade(nu, rho, a);
          extra["alpha"] = a;
          break;
        }
      }
      io::Json j;
      j["lambda11"] = r.lambda11;
      j["lambda12"] = r.lambda12;
      j["lambda_e"] = r.lambda_e;
      j["method"] = to_string(r.method);
      j["order"] = r.order;
      j["tail_magnitude"] = r.tail_magnitude;
      j["rho"] = rho;
      j["nu"] = nu;
      for (auto& [k, v] : extra.items()) j[k] = v;
      std::cout << io::dump(j) << '\n';
    } else if (*mc) {
      cell.apply(desc);
      const auto qs = parse_quantities(quantities);
      const std::string started = utc_timestamp();
      const auto stats = run_ensemble(desc, qs, RunOptions{solver});
      write_ensemble_outputs(out_path, stats, started, utc_timestamp());
      std::cout << io::dump(stats.to_json()) << '\n';
    } else if (*cmp) {
      cell.apply(desc);
      const auto report = compare_methods(desc, rho, order, n_max, RunOptions{solver});
      if (out_path.empty()) {
        report.write_csv(std::cout);
      } else {
        std::ostringstream s;
        report.write_csv(s);
        io::write_file(out_path, s.str());
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
