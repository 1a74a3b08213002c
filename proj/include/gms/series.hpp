#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gms/esums.hpp"

namespace gms {

enum class Provenance { per_config, ensemble };

/// A_1..A_J of the cluster expansion for one contrast value.
struct ClusterCoefficients {
  int order = 0;
  double rho = 0.0;
  std::vector<cdouble> values;  // values[n - 1] = A_n
  Provenance provenance = Provenance::per_config;

  cdouble operator[](int n) const { return values.at(n - 1); }
};

enum class Method { cluster_series, contrast_series, solver, dilute, pade };

std::string to_string(Method m);
Method parse_method(const std::string& name);

/// Effective conductivity of one configuration (or an ensemble reading).
struct EffectiveResult {
  double lambda11 = 1.0;
  double lambda12 = 0.0;
  /// Isotropic reading, lambda11.
  double lambda_e = 1.0;
  Method method = Method::cluster_series;
  /// Series order J (cluster) or n_max (contrast); 0 otherwise.
  int order = 0;
  /// Magnitude of the last retained term of a truncated tail, if any.
  double tail_magnitude = 0.0;
};

EffectiveResult make_result(cdouble lambda, Method method, int order = 0, double tail = 0.0);

/// Highest cluster order with printed closed-form coefficients.
inline constexpr int kMaxClusterOrder = 6;

/// A_1..A_J from structural sums. Throws DependencyError naming the first
/// missing index and DomainError unless 1 <= J <= 6.
ClusterCoefficients cluster_coeffs(const EsumTable& esums, double rho, int order,
                                   Provenance provenance = Provenance::per_config);

/// lambda11 - i lambda12 = 1 + 2 rho nu (1 + A_1 nu + ... + A_J nu^J).
EffectiveResult lambda_cluster(double rho, double nu, const ClusterCoefficients& coeffs);

/// e_nn (or ensemble averages) indexed by n; missing orders are an error.
using NnTable = std::map<int, cdouble>;

inline constexpr int kDefaultContrastTail = 12;

/// Third-order contrast expansion. With `e2` the per-configuration form
/// 1 + 2 rho nu + 2 rho^2 nu^2 e_2 / pi + 2 rho^3 nu^3 T; without it the
/// isotropic ensemble form where e_2 = pi. T is the sum over n = 2..n_max
/// of (-1)^n (n - 1) e_nn nu^(n-2) / pi^n.
EffectiveResult lambda_contrast(double nu, const NnTable& e_nn, double rho, int n_max,
                                std::optional<cdouble> e2 = std::nullopt);

/// sum_{n=2}^{n_max} (-1)^n (n - 1) e_nn nu^(n-2) / pi^n, and |last term|.
cdouble contrast_tail(double nu, const NnTable& e_nn, int n_max, double* last_term = nullptr);

/// Torquato-Milton parameter nu^2 / (1 - nu) [T - 1] (complex; the real
/// part is the parameter, the imaginary part is a noise diagnostic).
cdouble zeta1_complex(double nu, const NnTable& e_nn, int n_max);
double zeta1(double nu, const NnTable& e_nn, int n_max);

/// nu^3 [T - 1], real part.
double a13(double nu, const NnTable& e_nn, int n_max);

/// 1 + 2 rho nu alpha
EffectiveResult lambda_dilute(double nu, double rho, double alpha);
/// (1 + rho nu alpha) / (1 - rho nu alpha); PoleError when rho nu alpha == 1.
EffectiveResult lambda_pade(double nu, double rho, double alpha);

}  // namespace gms
