#include "gms/solver.hpp"

#include <cmath>
#include <fstream>

#include "gms/errors.hpp"
#include "gms/io.hpp"

namespace gms {

TaylorField::TaylorField(int disks, int degree)
    : n_(disks), degree_(degree), c_(static_cast<std::size_t>(disks) * (degree + 1), 0.0) {
  if (disks < 1) throw DomainError("Taylor field needs at least one disk");
  if (degree < 0) throw DomainError("Taylor degree must be >= 0");
}

TaylorField TaylorField::constant(int disks, int degree, cdouble value) {
  TaylorField f(disks, degree);
  for (int k = 0; k < disks; ++k) f(k, 0) = value;
  return f;
}

cdouble TaylorField::evaluate(int k, cdouble t) const {
  cdouble acc = 0.0;
  for (int l = degree_; l >= 0; --l) acc = acc * t + (*this)(k, l);
  return acc;
}

double TaylorField::scaled_norm(double radius) const {
  double best = 0.0;
  for (int k = 0; k < n_; ++k) {
    double rl = 1.0;
    for (int l = 0; l <= degree_; ++l) {
      best = std::max(best, std::abs((*this)(k, l)) * rl);
      rl *= radius;
    }
  }
  return best;
}

TaylorField& TaylorField::operator+=(const TaylorField& o) {
  if (o.n_ != n_ || o.degree_ != degree_) throw DomainError("Taylor field shape mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TaylorField& TaylorField::operator-=(const TaylorField& o) {
  if (o.n_ != n_ || o.degree_ != degree_) throw DomainError("Taylor field shape mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

TaylorField& TaylorField::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

TaylorField operator+(TaylorField a, const TaylorField& b) { return a += b; }
TaylorField operator-(TaylorField a, const TaylorField& b) { return a -= b; }
TaylorField operator*(double s, TaylorField a) { return a *= s; }

namespace {

// C(n, k) for n, k <= size.
std::vector<std::vector<double>> binomials(int size) {
  std::vector<std::vector<double>> b(size + 1, std::vector<double>(size + 1, 0.0));
  for (int n = 0; n <= size; ++n) {
    b[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) b[n][k] = b[n - 1][k - 1] + (k <= n - 1 ? b[n - 1][k] : 0.0);
  }
  return b;
}

template <bool Parallel>
TaylorField apply_w_impl(const KernelCache& kernels, double radius, const TaylorField& field, double* dropped) {
  const int n = kernels.size();
  const int degree = field.degree();
  if (field.disks() != n) throw DomainError("field and kernels disagree on the number of disks");
  kernels.require(2 * degree + 2);
  // Degree L + 1 of the output is only formed for the truncation diagnostic.
  const int out_degree = (dropped && kernels.max_order() >= 2 * degree + 3) ? degree + 1 : degree;
  const auto binom = binomials(2 * degree + 2);

  // g_{m,l} = conj(c_{m,l}) r^(2l+2)
  std::vector<cdouble> g(static_cast<std::size_t>(n) * (degree + 1));
  for (int m = 0; m < n; ++m) {
    double r2l2 = radius * radius;
    for (int l = 0; l <= degree; ++l) {
      g[static_cast<std::size_t>(m) * (degree + 1) + l] = std::conj(field(m, l)) * r2l2;
      r2l2 *= radius * radius;
    }
  }

  TaylorField out(n, degree);
  std::vector<double> top(n, 0.0);
#pragma omp parallel for schedule(static) if (Parallel && n >= 8)
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j <= out_degree; ++j) {
      cdouble acc = 0.0;
      for (int l = 0; l <= degree; ++l) {
        const auto row = kernels.matrix(l + j + 2).subspan(static_cast<std::size_t>(k) * n, n);
        cdouble s = 0.0;
        for (int m = 0; m < n; ++m) s += row[m] * g[static_cast<std::size_t>(m) * (degree + 1) + l];
        acc += binom[l + j + 1][j] * s;
      }
      if (j % 2 == 1) acc = -acc;
      if (j <= degree)
        out(k, j) = acc;
      else
        top[k] = std::abs(acc) * std::pow(radius, j);
    }
  }
  if (dropped) {
    *dropped = 0.0;
    for (double t : top) *dropped = std::max(*dropped, t);
  }
  return out;
}

void dump_iterate(std::ofstream& out, int iteration, double residual, const TaylorField& f) {
  io::Json j;
  j["iteration"] = iteration;
  j["residual"] = residual;
  io::Json disks = io::Json::array();
  for (int k = 0; k < f.disks(); ++k) {
    io::Json coeffs = io::Json::array();
    for (int l = 0; l <= f.degree(); ++l) coeffs.push_back({f(k, l).real(), f(k, l).imag()});
    disks.push_back(std::move(coeffs));
  }
  j["coefficients"] = std::move(disks);
  out << io::dump(j, -1) << '\n';
}

}  // namespace

TaylorField apply_w(const KernelCache& kernels, double radius, const TaylorField& field, double* dropped) {
  return apply_w_impl<true>(kernels, radius, field, dropped);
}

TaylorField apply_w_serial(const KernelCache& kernels, double radius, const TaylorField& field, double* dropped) {
  return apply_w_impl<false>(kernels, radius, field, dropped);
}

TaylorField apply_w(const DiskConfiguration& config, const TaylorField& field, double* dropped) {
  const KernelCache kernels(config, kernel_order_for(field.degree()));
  return apply_w(kernels, config.radius(), field, dropped);
}

void SolverParams::validate() const {
  if (degree < 0) throw DomainError("Taylor degree must be >= 0");
  if (mode == Mode::tolerance && !(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (mode == Mode::contrast_order && order < 0) throw DomainError("contrast order must be >= 0");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
}

EffectiveResult SolveResult::effective() const {
  return make_result(lambda(), Method::solver, iterations, dropped);
}

cdouble lambda_from_field(const TaylorField& field, double rho, double nu) {
  cdouble mean = 0.0;
  for (int k = 0; k < field.disks(); ++k) mean += field(k, 0);
  mean /= double(field.disks());
  return 1.0 + 2.0 * rho * nu * mean;
}

SolveResult solve_contrast(const KernelCache& kernels, double radius, double rho, const SolverParams& params) {
  params.validate();
  if (!(std::abs(rho) <= 1.0)) throw DomainError("contrast parameter must lie in [-1, 1]");
  const int n = kernels.size();
  const double nu = n * kPi * radius * radius;
  const TaylorField one = TaylorField::constant(n, params.degree);

  std::ofstream dump;
  if (!params.dump_path.empty()) {
    dump.open(params.dump_path, std::ios::app);
    if (!dump) throw DomainError("cannot open dump file " + params.dump_path);
  }

  SolveResult result{one, 1.0, 0.0, 0, 0.0, false, {}, 0.0};
  TaylorField psi = one;
  const bool fixed = params.mode == SolverParams::Mode::contrast_order;
  const int limit = fixed ? params.order : params.max_iterations;
  for (int p = 1; p <= limit; ++p) {
    double dropped = 0.0;
    TaylorField next = rho * apply_w(kernels, radius, psi, &dropped);
    next += one;
    const double residual = (next - psi).scaled_norm(radius);
    psi = std::move(next);
    result.iterations = p;
    result.residual = residual;
    result.dropped = dropped;
    result.residual_history.push_back(residual);
    if (dump.is_open()) dump_iterate(dump, p, residual, psi);
    if (!std::isfinite(residual) || residual > 1e12)
      throw ConvergenceFailure("successive approximations diverged at iteration " + std::to_string(p),
                               result.residual_history);
    if (!fixed && residual <= params.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (fixed) result.converged = true;
  if (!result.converged)
    throw ConvergenceFailure("no convergence within " + std::to_string(limit) + " iterations (residual " +
                                 io::format_double(result.residual) + ")",
                             result.residual_history);

  const cdouble lambda = lambda_from_field(psi, rho, nu);
  result.lambda11 = lambda.real();
  result.lambda12 = -lambda.imag();
  result.field = std::move(psi);
  return result;
}

SolveResult solve_contrast(const DiskConfiguration& config, double rho, const SolverParams& params) {
  params.validate();
  const KernelCache kernels(config, kernel_order_for(params.degree));
  return solve_contrast(kernels, config.radius(), rho, params);
}

std::vector<TaylorField> cluster_terms_exact(const KernelCache& kernels, double rho, int degree, int upto) {
  if (upto < 0 || upto > 3) throw DomainError("exact cluster terms are available up to psi^(3)");
  const int n = kernels.size();
  kernels.require(degree + 3);
  const auto binom = binomials(degree + 3);
  // Coefficient j at a_m of sum_k v_k E_p(z - a_k): (-1)^j C(p+j-1, j) sum_k E_{p+j}(a_m - a_k) v_k.
  const auto expand = [&](int p, const std::vector<cdouble>& v, double scale) {
    TaylorField f(n, degree);
    for (int m = 0; m < n; ++m)
      for (int j = 0; j <= degree; ++j) {
        cdouble s = 0.0;
        for (int k = 0; k < n; ++k) s += kernels(p + j, m, k) * v[k];
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        f(m, j) = scale * sign * binom[p + j - 1][j] * s;
      }
    return f;
  };

  std::vector<TaylorField> terms;
  terms.push_back(TaylorField::constant(n, degree));
  if (upto >= 1) terms.push_back(expand(2, std::vector<cdouble>(n, 1.0), rho));
  if (upto >= 2) {
    // v_k = sum_{k1} conj(E_2(a_k - a_k1))
    std::vector<cdouble> v(n, 0.0);
    for (int k = 0; k < n; ++k)
      for (int k1 = 0; k1 < n; ++k1) v[k] += std::conj(kernels(2, k, k1));
    terms.push_back(expand(2, v, rho * rho));
  }
  if (upto >= 3) {
    // First chain: v_{k2} = sum_{k,k1} E_2(a_k - a_k1) conj(E_2(a_k1 - a_k2)).
    std::vector<cdouble> w(n, 0.0), v(n, 0.0);
    for (int k1 = 0; k1 < n; ++k1)
      for (int k = 0; k < n; ++k) w[k1] += kernels(2, k, k1);
    for (int k2 = 0; k2 < n; ++k2)
      for (int k1 = 0; k1 < n; ++k1) v[k2] += w[k1] * std::conj(kernels(2, k1, k2));
    TaylorField t = expand(2, v, rho * rho * rho);
    // Second: -2 sum_{k,k1} conj(E_3(a_k - a_k1)) E_3(z - a_k).
    std::vector<cdouble> u(n, 0.0);
    for (int k = 0; k < n; ++k)
      for (int k1 = 0; k1 < n; ++k1) u[k] += std::conj(kernels(3, k, k1));
    t -= expand(3, u, 2.0 * rho * rho);
    terms.push_back(std::move(t));
  }
  return terms;
}

double shape_factor(const Cell& cell, double radius, double rho, int degree) {
  const auto single = DiskConfiguration::make(cell, {cdouble(0.0)}, radius);
  SolverParams params;
  params.degree = degree;
  const SolveResult r = solve_contrast(single, rho, params);
  return r.field(0, 0).real();
}

}  // namespace gms
