#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gms {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default highest cached lattice-sum order, 2 * (J_max + 2) with J_max = 6.
inline constexpr int kDefaultSumOrder = 16;

/// Accepted range of Im(omega2) / omega1.
inline constexpr double kMinAspect = 0.2;
inline constexpr double kMaxAspect = 5.0;

/// Fundamental periodicity cell of unit area. omega1 lies on the positive
/// real axis and Im(omega2) > 0. Immutable once built; the lattice sums
/// S_2..S_max are filled at construction.
class Cell {
 public:
  /// Rescales (omega1, omega2) so that omega1 * Im(omega2) == 1.
  /// Throws InvalidCell for omega1 <= 0, Im(omega2) <= 0 or an aspect ratio
  /// outside [kMinAspect, kMaxAspect].
  static Cell make(double omega1, cdouble omega2, int max_sum_order = kDefaultSumOrder);

  static Cell square() { return make(1.0, {0.0, 1.0}); }
  /// omega2 = exp(i pi / 3) omega1, rescaled to unit area.
  static Cell hexagonal();

  double omega1() const { return omega1_; }
  cdouble omega2() const { return omega2_; }
  /// omega2 / omega1
  cdouble tau() const { return omega2_ / omega1_; }
  double area() const { return omega1_ * omega2_.imag(); }
  int max_sum_order() const { return static_cast<int>(sums_.size()) - 1; }

  /// S_n. Odd n gives exactly 0. Orders above the cache are computed on demand.
  cdouble lattice_sum(int n) const;

 private:
  Cell(double omega1, cdouble omega2, int max_sum_order);

  double omega1_;
  cdouble omega2_;
  std::vector<cdouble> sums_;  // sums_[n] = S_n, n <= max order
};

inline Cell make_cell(double omega1, cdouble omega2) { return Cell::make(omega1, omega2); }

/// S_n of the cell; throws DomainError for n < 2.
cdouble lattice_sum(const Cell& cell, int n);

/// Lattice sums S_n for n = 2..n_max following the classical recurrence for
/// even n >= 8, seeded by directly summed S_4 and S_6. Index n of the result
/// holds S_n (entries 0 and 1 are zero).
std::vector<cdouble> lattice_sums_recurrence(const Cell& cell, int n_max);

/// S_n by direct row summation in the Eisenstein order, for any n >= 2.
cdouble lattice_sum_direct(const Cell& cell, int n);

/// Distance below which eisenstein() refuses to evaluate.
inline constexpr double kSingularRadius = 1e-9;

/// E_n(z) = sum over lattice points P of (z + P)^-n in the Eisenstein order.
/// E_1 is quasi-periodic; E_n for n >= 2 is doubly periodic.
/// Throws NearSingularity when z is within kSingularRadius of the lattice.
cdouble eisenstein(const Cell& cell, int n, cdouble z);

/// E_n(z) - z^-n evaluated without cancellation; equals S_n at z = 0.
/// z should be taken near the zero-centred cell.
cdouble eisenstein_regularized(const Cell& cell, int n, cdouble z);

/// E_2..E_{n_max} at one point in a single pass: out[n - 2] = E_n(z).
/// With `regularized` the origin term z^-n is omitted, giving the
/// regularized values (z must then be the representative near 0).
void eisenstein_orders(const Cell& cell, cdouble z, int n_max, bool regularized,
                       std::span<cdouble> out);

}  // namespace gms
