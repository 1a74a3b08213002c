#include "gms/series.hpp"

#include <cmath>

#include "gms/errors.hpp"

namespace gms {

std::string to_string(Method m) {
  switch (m) {
    case Method::cluster_series: return "cluster";
    case Method::contrast_series: return "contrast";
    case Method::solver: return "solver";
    case Method::dilute: return "dilute";
    case Method::pade: return "pade";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "cluster") return Method::cluster_series;
  if (name == "contrast") return Method::contrast_series;
  if (name == "solver") return Method::solver;
  if (name == "dilute") return Method::dilute;
  if (name == "pade") return Method::pade;
  throw DomainError("unknown method '" + name + "'");
}

EffectiveResult make_result(cdouble lambda, Method method, int order, double tail) {
  EffectiveResult r;
  r.lambda11 = lambda.real();
  r.lambda12 = -lambda.imag();
  r.lambda_e = r.lambda11;
  r.method = method;
  r.order = order;
  r.tail_magnitude = tail;
  return r;
}

namespace {

cdouble get(const EsumTable& t, const MultiIndex& idx) {
  auto it = t.find(idx);
  if (it == t.end()) throw DependencyError("structural sum e_" + idx.str() + " is missing");
  return it->second;
}

}  // namespace

ClusterCoefficients cluster_coeffs(const EsumTable& e, double rho, int order, Provenance provenance) {
  if (order < 1 || order > kMaxClusterOrder)
    throw DomainError("cluster order must lie in 1..6, got " + std::to_string(order));
  for (const auto& idx : required_indices(order)) get(e, idx);

  const auto E = [&](std::initializer_list<int> m) { return get(e, MultiIndex(m)); };
  const double r = rho, r2 = r * r, r3 = r2 * r, r4 = r3 * r, r5 = r4 * r, r6 = r5 * r;
  const double pi = kPi;

  ClusterCoefficients c;
  c.order = order;
  c.rho = rho;
  c.provenance = provenance;
  c.values.push_back(r / pi * E({2}));
  if (order >= 2) c.values.push_back(r2 / (pi * pi) * E({2, 2}));
  if (order >= 3) c.values.push_back((-2.0 * r2 * E({3, 3}) + r3 * E({2, 2, 2})) / std::pow(pi, 3));
  if (order >= 4)
    c.values.push_back((3.0 * r2 * E({4, 4}) - 2.0 * r3 * (E({3, 3, 2}) + E({2, 3, 3})) + r4 * E({2, 2, 2, 2})) /
                       std::pow(pi, 4));
  if (order >= 5)
    c.values.push_back((-4.0 * r2 * E({5, 5}) + r3 * (3.0 * E({4, 4, 2}) + 6.0 * E({3, 4, 3}) + 3.0 * E({2, 4, 4})) -
                        2.0 * r4 * (E({3, 3, 2, 2}) + E({2, 3, 3, 2}) + E({2, 2, 3, 3})) + r5 * E({2, 2, 2, 2, 2})) /
                       std::pow(pi, 5));
  if (order >= 6)
    c.values.push_back(
        (5.0 * r2 * E({6, 6}) -
         4.0 * r3 * (E({2, 5, 5}) + 3.0 * E({3, 5, 4}) + 3.0 * E({4, 5, 3}) + E({5, 5, 2})) +
         r4 * (3.0 * E({2, 2, 4, 4}) + 6.0 * E({2, 3, 4, 3}) + 4.0 * E({3, 3, 3, 3}) + 3.0 * E({2, 4, 4, 2}) +
               6.0 * E({3, 4, 3, 2}) + 3.0 * E({4, 4, 2, 2})) -
         2.0 * r5 * (E({2, 2, 2, 3, 3}) + E({2, 2, 3, 3, 2}) + E({2, 3, 3, 2, 2}) + E({3, 3, 2, 2, 2})) +
         r6 * E({2, 2, 2, 2, 2, 2})) /
        std::pow(pi, 6));
  return c;
}

EffectiveResult lambda_cluster(double rho, double nu, const ClusterCoefficients& coeffs) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  // Horner in nu.
  cdouble poly = 0.0;
  for (int n = coeffs.order; n >= 1; --n) poly = (poly + coeffs[n]) * nu;
  const cdouble lambda = 1.0 + 2.0 * rho * nu * (1.0 + poly);
  return make_result(lambda, Method::cluster_series, coeffs.order);
}

cdouble contrast_tail(double nu, const NnTable& e_nn, int n_max, double* last_term) {
  if (n_max < 2) throw DomainError("contrast tail needs n_max >= 2");
  cdouble sum = 0.0;
  double last = 0.0;
  for (int n = 2; n <= n_max; ++n) {
    auto it = e_nn.find(n);
    if (it == e_nn.end()) throw DependencyError("e_" + std::to_string(n) + std::to_string(n) + " is missing");
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const cdouble term = sign * (n - 1) * it->second * std::pow(nu, n - 2) / std::pow(kPi, n);
    sum += term;
    last = std::abs(term);
  }
  if (last_term) *last_term = last;
  return sum;
}

EffectiveResult lambda_contrast(double nu, const NnTable& e_nn, double rho, int n_max, std::optional<cdouble> e2) {
  double last = 0.0;
  const cdouble tail = contrast_tail(nu, e_nn, n_max, &last);
  const cdouble second = e2 ? *e2 / kPi : cdouble(1.0);
  const double rn = rho * nu;
  const cdouble lambda = 1.0 + 2.0 * rn + 2.0 * rn * rn * second + 2.0 * rn * rn * rn * tail;
  return make_result(lambda, Method::contrast_series, n_max, 2.0 * std::abs(rn * rn * rn) * last);
}

cdouble zeta1_complex(double nu, const NnTable& e_nn, int n_max) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  return nu * nu / (1.0 - nu) * (contrast_tail(nu, e_nn, n_max) - 1.0);
}

double zeta1(double nu, const NnTable& e_nn, int n_max) { return zeta1_complex(nu, e_nn, n_max).real(); }

double a13(double nu, const NnTable& e_nn, int n_max) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  return (nu * nu * nu * (contrast_tail(nu, e_nn, n_max) - 1.0)).real();
}

EffectiveResult lambda_dilute(double nu, double rho, double alpha) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  return make_result(1.0 + 2.0 * rho * nu * alpha, Method::dilute);
}

EffectiveResult lambda_pade(double nu, double rho, double alpha) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  const double x = rho * nu * alpha;
  if (std::abs(1.0 - x) < 1e-12) throw PoleError("Pade form has a pole at rho nu alpha = 1");
  return make_result((1.0 + x) / (1.0 - x), Method::pade);
}

}  // namespace gms
