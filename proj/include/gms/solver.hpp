#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gms/kernels.hpp"
#include "gms/series.hpp"

namespace gms {

/// Truncated Taylor expansions psi_k(z) = sum_{l=0}^{L} c_{k,l} (z - a_k)^l,
/// one per disk.
class TaylorField {
 public:
  TaylorField(int disks, int degree);
  /// c_{k,0} = value, all other coefficients zero.
  static TaylorField constant(int disks, int degree, cdouble value = 1.0);

  int disks() const { return n_; }
  int degree() const { return degree_; }

  cdouble& operator()(int k, int l) { return c_[static_cast<std::size_t>(k) * (degree_ + 1) + l]; }
  cdouble operator()(int k, int l) const { return c_[static_cast<std::size_t>(k) * (degree_ + 1) + l]; }
  std::span<const cdouble> disk(int k) const {
    return {c_.data() + static_cast<std::size_t>(k) * (degree_ + 1), static_cast<std::size_t>(degree_ + 1)};
  }

  /// psi_k(a_k + t)
  cdouble evaluate(int k, cdouble t) const;

  /// max_{k,l} |c_{k,l}| r^l, the coefficient norm on disks of radius r.
  double scaled_norm(double radius) const;

  TaylorField& operator+=(const TaylorField& o);
  TaylorField& operator-=(const TaylorField& o);
  TaylorField& operator*=(double s);

 private:
  int n_;
  int degree_;
  std::vector<cdouble> c_;
};

TaylorField operator+(TaylorField a, const TaylorField& b);
TaylorField operator-(TaylorField a, const TaylorField& b);
TaylorField operator*(double s, TaylorField a);

/// Kernel order needed by apply_w on degree-L fields (L + 2 + L, plus one
/// for the truncation diagnostic).
inline int kernel_order_for(int degree) { return 2 * degree + 3; }

/// Lattice-summed operator of the functional equations. A monomial
/// c (z - a_m)^l of disk m maps to conj(c) r^(2l+2) E_{l+2}(z - a_m) (the
/// regularized E for m = k), re-expanded around every a_k up to degree L:
/// coefficient j is (-1)^j C(l+j+1, j) E_{l+2+j}(a_k - a_m).
/// `dropped`, when given, receives max_k |c_{k,L+1}| r^(L+1) of the output.
/// Throws ResourceError when the cache lacks order 2L + 2.
TaylorField apply_w(const KernelCache& kernels, double radius, const TaylorField& field, double* dropped = nullptr);
TaylorField apply_w_serial(const KernelCache& kernels, double radius, const TaylorField& field,
                           double* dropped = nullptr);
TaylorField apply_w(const DiskConfiguration& config, const TaylorField& field, double* dropped = nullptr);

/// Default Taylor degree 2 J + 2 for series order J = 6.
inline constexpr int kDefaultDegree = 14;

struct SolverParams {
  enum class Mode { contrast_order, tolerance };

  int degree = kDefaultDegree;
  Mode mode = Mode::tolerance;
  /// Number of iterations in contrast-order mode (truncation at rho^P).
  int order = 6;
  double tolerance = 1e-12;
  int max_iterations = 2000;
  /// When non-empty, every iterate is appended to this file as a JSON line.
  std::string dump_path;

  void validate() const;
};

struct SolveResult {
  TaylorField field;
  double lambda11 = 1.0;
  double lambda12 = 0.0;
  int iterations = 0;
  /// Final scaled max-norm change between iterates.
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  /// Truncation diagnostic of the last operator application.
  double dropped = 0.0;

  cdouble lambda() const { return {lambda11, -lambda12}; }
  EffectiveResult effective() const;
};

/// Successive approximations psi <- rho W(psi) + 1 from psi = 1, then
/// lambda11 - i lambda12 = 1 + 2 rho nu mean_k psi_k(a_k). In tolerance mode
/// throws ConvergenceFailure (carrying the residual history) when the
/// iteration stalls or diverges.
SolveResult solve_contrast(const KernelCache& kernels, double radius, double rho, const SolverParams& params = {});
SolveResult solve_contrast(const DiskConfiguration& config, double rho, const SolverParams& params = {});

/// 1 + 2 rho nu mean_k psi_k(a_k)
cdouble lambda_from_field(const TaylorField& field, double rho, double nu);

/// psi^(0)..psi^(upto) of the expansion in r^2, written out directly from
/// the E_2/E_3 chains with the regularized diagonal; upto <= 3.
std::vector<TaylorField> cluster_terms_exact(const KernelCache& kernels, double rho, int degree, int upto = 3);

/// Shape factor alpha = psi_1(a_1) of the one-disk cell problem of radius r.
double shape_factor(const Cell& cell, double radius, double rho = 1.0, int degree = kDefaultDegree);

}  // namespace gms
