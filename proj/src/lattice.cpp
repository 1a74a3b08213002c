#include "gms/lattice.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "gms/errors.hpp"

namespace gms {

namespace {

constexpr cdouble kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * kPi;

// Rows m2 with |Im(w + m2 tau)| below this are summed directly along m1;
// the others through the nome expansion of the cotangent derivatives.
constexpr double kNearRowHeight = 1.5;
// Direct terms |m1 - round(Re w)| <= kDirectTerms; the rest via Hurwitz tails.
constexpr int kDirectTerms = 8;
constexpr int kTailTerms = 48;
// ln of the absolute cut-off for nome-series terms (w-units).
constexpr double kLogCutoff = -46.0;
constexpr int kMaxOrder = 160;

// H(s) = sum_{m > kDirectTerms} m^-s for s = 0..kMaxOrder + kTailTerms.
const std::vector<double>& hurwitz_tails() {
  static const std::vector<double> table = [] {
    constexpr int kSize = kMaxOrder + kTailTerms + 2;
    constexpr int kCut = 100;
    std::vector<double> h(kSize, 0.0);
    for (int s = 2; s < kSize; ++s) {
      double sum = 0.0;
      // Smallest terms first.
      for (int m = kCut - 1; m > kDirectTerms; --m) sum += std::pow(double(m), -s);
      const double b = kCut;
      const double fb = std::pow(b, -s);
      double em = b * fb / (s - 1) + 0.5 * fb;
      em += s * fb / b / 12.0;
      em -= double(s) * (s + 1) * (s + 2) * fb / (b * b * b) / 720.0;
      em += double(s) * (s + 1) * (s + 2) * (s + 3) * (s + 4) * fb / std::pow(b, 5) / 30240.0;
      h[s] = sum + em;
    }
    return h;
  }();
  return table;
}

struct RowPrefactors {
  // ln((2 pi)^n / (n-1)!) and (-+2 pi i)^n / (n-1)! for n = 1..kMaxOrder.
  std::array<double, kMaxOrder + 1> log_scale{};
  std::array<cdouble, kMaxOrder + 1> upper{};
  std::array<cdouble, kMaxOrder + 1> lower{};
};

const RowPrefactors& row_prefactors() {
  static const RowPrefactors p = [] {
    RowPrefactors r;
    for (int n = 1; n <= kMaxOrder; ++n) {
      const double log_mag = n * std::log(kTwoPi) - std::lgamma(double(n));
      r.log_scale[n] = log_mag;
      const double mag = std::exp(log_mag);
      // (-i)^n and i^n
      const cdouble mi = std::pow(-kI, n);
      const cdouble pi = std::pow(kI, n);
      r.upper[n] = mag * mi;
      r.lower[n] = mag * pi;
    }
    return r;
  }();
  return p;
}

// Adds sum_{m1} (w + m1)^-n for n = 2..n_max into acc[n], for a row with
// |Im w| small. With `skip` the term m1 = skip_m1 is omitted.
void add_near_row(cdouble w, int n_max, bool skip, long long skip_m1, std::span<cdouble> acc) {
  const double shift = std::round(w.real());
  const cdouble wr = w - shift;
  const long long base = static_cast<long long>(shift);

  // Direct part: m = m1 + base in [-kDirectTerms, kDirectTerms].
  bool skipped_direct = false;
  for (int m = -kDirectTerms; m <= kDirectTerms; ++m) {
    if (skip && m == skip_m1 + base) {
      skipped_direct = true;
      continue;
    }
    const cdouble t = 1.0 / (wr + double(m));
    cdouble p = t * t;
    for (int n = 2; n <= n_max; ++n) {
      acc[n] += p;
      p *= t;
    }
  }

  // Tail: sum_{m > M} (m + wr)^-n + (-1)^n (m - wr)^-n
  //     = sum_{j, n+j even} 2 (-1)^j C(n+j-1, j) wr^j H(n+j).
  const auto& h = hurwitz_tails();
  std::array<cdouble, kTailTerms + 1> wp;
  wp[0] = 1.0;
  for (int j = 1; j <= kTailTerms; ++j) wp[j] = wp[j - 1] * wr;
  for (int n = 2; n <= n_max; ++n) {
    cdouble tail = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= kTailTerms; ++j) {
      if (j > 0) binom *= double(n + j - 1) / j;
      if ((n + j) % 2 != 0) continue;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      tail += (2.0 * sign * binom * h[n + j]) * wp[j];
    }
    acc[n] += tail;
  }

  if (skip && !skipped_direct) {
    // The omitted term fell into the tail; remove it explicitly.
    const cdouble t = 1.0 / (w + double(skip_m1));
    cdouble p = t * t;
    for (int n = 2; n <= n_max; ++n) {
      acc[n] -= p;
      p *= t;
    }
  }
}

// Adds the nome-series value of a far row (|Im w| >= kNearRowHeight) for
// n = n_min..n_max, without the constant -+ i pi of the n = 1 cotangent.
// Returns false once the row is below the cut-off for every order.
bool add_far_row(cdouble w, int n_min, int n_max, std::span<cdouble> acc) {
  const auto& pre = row_prefactors();
  const bool upper = w.imag() > 0.0;
  const cdouble q = upper ? std::exp(kTwoPi * kI * w) : std::exp(-kTwoPi * kI * w);
  const double log_q = -kTwoPi * std::abs(w.imag());

  double best = -1e300;
  for (int n = n_min; n <= n_max; ++n) best = std::max(best, pre.log_scale[n]);
  if (log_q + best < kLogCutoff) return false;

  std::array<cdouble, kMaxOrder + 1> series{};
  cdouble qk = 1.0;
  for (int k = 1;; ++k) {
    qk *= q;
    double kp = 1.0;  // k^(n-1)
    for (int n = 1; n < n_min; ++n) kp *= k;
    for (int n = n_min; n <= n_max; ++n) {
      series[n] += kp * qk;
      kp *= k;
    }
    const double past_peak = double(n_max - 1) / -log_q;
    if (k >= 2 && k > past_peak) {
      double worst = -1e300;
      const double lk = std::log(double(k));
      for (int n = n_min; n <= n_max; ++n)
        worst = std::max(worst, pre.log_scale[n] + (n - 1) * lk + k * log_q);
      if (worst < kLogCutoff) break;
    }
  }
  for (int n = n_min; n <= n_max; ++n) acc[n] += (upper ? pre.upper[n] : pre.lower[n]) * series[n];
  return true;
}

// Eisenstein-ordered sums over the unit lattice {m1 + m2 tau}:
// acc[n] = sum_{m2} sum_{m1} (w + m1 + m2 tau)^-n, n = n_min..n_max, with
// n_min in {1, 2}. With `exclude_origin` the m1 = m2 = 0 term is omitted.
void unit_lattice(cdouble tau, cdouble w, int n_min, int n_max, bool exclude_origin,
                  std::span<cdouble> acc) {
  if (n_max > kMaxOrder) throw DomainError("Eisenstein order above " + std::to_string(kMaxOrder));
  for (auto& a : acc) a = 0.0;
  const double ty = tau.imag();
  const double wy = w.imag();
  // Near rows are m_lo..m_hi (possibly empty, then m_lo == m_hi + 1).
  const long long m_hi = static_cast<long long>(std::ceil((kNearRowHeight - wy) / ty)) - 1;
  const long long m_lo = static_cast<long long>(std::floor((-kNearRowHeight - wy) / ty)) + 1;

  for (long long m2 = m_lo; m2 <= m_hi; ++m2) {
    const cdouble wr = w + double(m2) * tau;
    const bool skip = exclude_origin && m2 == 0;
    if (n_max >= 2) add_near_row(wr, n_max, skip, 0, acc);
    if (n_min == 1) {
      const double shift = std::round(wr.real());
      const cdouble x = kPi * (wr - shift);
      acc[1] += kPi * std::cos(x) / std::sin(x);
      if (skip) acc[1] -= 1.0 / w;
    }
  }
  for (long long m2 = m_hi + 1;; ++m2)
    if (!add_far_row(w + double(m2) * tau, n_min, n_max, acc)) break;
  for (long long m2 = m_lo - 1;; --m2)
    if (!add_far_row(w + double(m2) * tau, n_min, n_max, acc)) break;

  // Symmetric limit of the far-row constants -i pi sgn(Im) for n = 1.
  if (n_min == 1) acc[1] += kI * kPi * double(m_lo + m_hi);
}

// Distance from z to the nearest lattice point.
double lattice_distance(const Cell& cell, cdouble z) {
  const cdouble w2 = cell.omega2();
  const double t = z.imag() / w2.imag();
  const double s = (z.real() - t * w2.real()) / cell.omega1();
  const double sr = s - std::floor(s + 0.5);
  const double tr = t - std::floor(t + 0.5);
  const cdouble base = sr * cell.omega1() + tr * w2;
  double best = std::abs(base);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) best = std::min(best, std::abs(base + double(a) * cell.omega1() + double(b) * w2));
  return best;
}

cdouble scale_power(double omega1, int n) { return std::pow(omega1, -n); }

}  // namespace

Cell::Cell(double omega1, cdouble omega2, int max_sum_order) : omega1_(omega1), omega2_(omega2) {
  sums_ = lattice_sums_recurrence(*this, std::max(max_sum_order, 6));
}

Cell Cell::make(double omega1, cdouble omega2, int max_sum_order) {
  if (!(omega1 > 0.0) || !std::isfinite(omega1))
    throw InvalidCell("omega1 must be positive, got " + std::to_string(omega1));
  if (!(omega2.imag() > 0.0) || !std::isfinite(omega2.real()) || !std::isfinite(omega2.imag()))
    throw InvalidCell("Im(omega2) must be positive");
  const double aspect = omega2.imag() / omega1;
  if (aspect < kMinAspect || aspect > kMaxAspect)
    throw InvalidCell("cell aspect Im(omega2)/omega1 = " + std::to_string(aspect) +
                      " outside [0.2, 5]");
  const double area = omega1 * omega2.imag();
  // Already-normalized input is kept bit-for-bit so files round-trip.
  if (std::abs(area - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon())
    return Cell(omega1, omega2, max_sum_order);
  const double s = 1.0 / std::sqrt(area);
  return Cell(omega1 * s, omega2 * s, max_sum_order);
}

Cell Cell::hexagonal() { return make(1.0, std::polar(1.0, kPi / 3.0)); }

cdouble Cell::lattice_sum(int n) const {
  if (n < 2) throw DomainError("lattice sum order must be >= 2, got " + std::to_string(n));
  if (n % 2 != 0) return 0.0;
  if (n < static_cast<int>(sums_.size())) return sums_[n];
  return lattice_sums_recurrence(*this, n)[n];
}

cdouble lattice_sum(const Cell& cell, int n) { return cell.lattice_sum(n); }

cdouble lattice_sum_direct(const Cell& cell, int n) {
  if (n < 2) throw DomainError("lattice sum order must be >= 2, got " + std::to_string(n));
  if (n % 2 != 0) return 0.0;
  std::vector<cdouble> acc(n + 1);
  unit_lattice(cell.tau(), 0.0, 2, n, true, acc);
  return acc[n] * scale_power(cell.omega1(), n);
}

std::vector<cdouble> lattice_sums_recurrence(const Cell& cell, int n_max) {
  std::vector<cdouble> s(std::max(n_max, 6) + 1, 0.0);
  std::vector<cdouble> acc(7);
  unit_lattice(cell.tau(), 0.0, 2, 6, true, acc);
  for (int n = 2; n <= 6; n += 2) s[n] = acc[n] * scale_power(cell.omega1(), n);

  // Laurent coefficients of wp: c_k = (2k - 1) S_2k and, for k >= 4,
  // c_k = 3 / ((2k + 1)(k - 3)) sum_{m=2}^{k-2} c_m c_{k-m}.
  const int k_max = n_max / 2;
  std::vector<cdouble> c(std::max(k_max, 3) + 1, 0.0);
  c[2] = 3.0 * s[4];
  c[3] = 5.0 * s[6];
  for (int k = 4; k <= k_max; ++k) {
    cdouble sum = 0.0;
    for (int m = 2; m <= k - 2; ++m) sum += c[m] * c[k - m];
    c[k] = 3.0 / double((2 * k + 1) * (k - 3)) * sum;
    s[2 * k] = c[k] / double(2 * k - 1);
  }
  s.resize(n_max + 1);
  return s;
}

cdouble eisenstein(const Cell& cell, int n, cdouble z) {
  if (n < 1) throw DomainError("Eisenstein order must be >= 1");
  if (lattice_distance(cell, z) < kSingularRadius)
    throw NearSingularity("E_" + std::to_string(n) + " evaluated within 1e-9 of a lattice point");
  std::vector<cdouble> acc(n + 1);
  const int n_min = n == 1 ? 1 : 2;
  unit_lattice(cell.tau(), z / cell.omega1(), n_min, n, false, acc);
  return acc[n] * scale_power(cell.omega1(), n);
}

cdouble eisenstein_regularized(const Cell& cell, int n, cdouble z) {
  if (n < 2) throw DomainError("regularized Eisenstein order must be >= 2");
  std::vector<cdouble> acc(n + 1);
  unit_lattice(cell.tau(), z / cell.omega1(), 2, n, true, acc);
  return acc[n] * scale_power(cell.omega1(), n);
}

void eisenstein_orders(const Cell& cell, cdouble z, int n_max, bool regularized,
                       std::span<cdouble> out) {
  if (n_max < 2) throw DomainError("n_max must be >= 2");
  if (static_cast<int>(out.size()) < n_max - 1) throw DomainError("output span too small");
  if (!regularized && lattice_distance(cell, z) < kSingularRadius)
    throw NearSingularity("E_n evaluated within 1e-9 of a lattice point");
  std::array<cdouble, kMaxOrder + 1> acc;
  unit_lattice(cell.tau(), z / cell.omega1(), 2, n_max, regularized,
               std::span<cdouble>(acc.data(), n_max + 1));
  const double inv = 1.0 / cell.omega1();
  double scale = inv;
  for (int n = 2; n <= n_max; ++n) {
    scale *= inv;
    out[n - 2] = acc[n] * scale;
  }
}

}  // namespace gms
