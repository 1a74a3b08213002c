#pragma once

// Slow reference implementations used only by the tests.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "gms/geometry.hpp"

namespace oracle {

using gms::cdouble;

// Neville extrapolation to h = 0 of values f(h_i).
inline cdouble extrapolate(const std::vector<double>& h, std::vector<cdouble> f) {
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = n - 1; i >= m; --i) {
      f[i] = (h[i - m] * f[i] - h[i] * f[i - 1]) / (h[i - m] - h[i]);
      if (i == m) break;
    }
  return f[n - 1];
}

// sum_{|m1| <= M} (x + m1 w1)^-n, skipping m1 = 0 when `skip_zero`.
inline cdouble row_sum(cdouble x, double w1, int n, int M, bool skip_zero) {
  cdouble s = 0.0;
  for (int m1 = M; m1 >= 1; --m1) {
    s += std::pow(x + double(m1) * w1, -n);
    s += std::pow(x - double(m1) * w1, -n);
  }
  if (!skip_zero) s += std::pow(x, -n);
  return s;
}

// Eisenstein-ordered brute force: inner m1 truncated at M, 2M, ... and
// extrapolated in 1/M; outer m2 summed until the rows are negligible.
// `exclude_origin` drops the (0, 0) translate (regularized value).
inline cdouble eisenstein_brute(const gms::Cell& cell, int n, cdouble z, bool exclude_origin = false, int base = 200,
                                int levels = 6) {
  const double w1 = cell.omega1();
  const cdouble w2 = cell.omega2();
  const int M2 = static_cast<int>(std::ceil(7.0 * w1 / w2.imag())) + 2;
  std::vector<double> h;
  std::vector<cdouble> f;
  for (int lv = 0; lv < levels; ++lv) {
    const int M = base << lv;
    cdouble total = 0.0;
    for (int m2 = M2; m2 >= -M2; --m2) total += row_sum(z + double(m2) * w2, w1, n, M, exclude_origin && m2 == 0);
    h.push_back(1.0 / M);
    f.push_back(total);
  }
  return extrapolate(h, f);
}

// Absolutely convergent sum over the square |m1|, |m2| <= M without the
// origin, extrapolated in 1/M.
inline cdouble lattice_sum_square_truncation(const gms::Cell& cell, int n, int base = 50, int levels = 5) {
  std::vector<double> h;
  std::vector<cdouble> f;
  for (int lv = 0; lv < levels; ++lv) {
    const int M = base << lv;
    cdouble s = 0.0;
    for (int m2 = -M; m2 <= M; ++m2)
      for (int m1 = -M; m1 <= M; ++m1)
        if (m1 != 0 || m2 != 0) s += std::pow(double(m1) * cell.omega1() + double(m2) * cell.omega2(), -n);
    h.push_back(1.0 / M);
    f.push_back(s);
  }
  return extrapolate(h, f);
}

// E_n(a_j - a_k) from the brute force, diagonal replaced by S_n.
inline std::vector<cdouble> kernel_brute(const gms::DiskConfiguration& c, int n) {
  const int N = c.size();
  std::vector<cdouble> K(static_cast<std::size_t>(N) * N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      const cdouble d = j == k ? cdouble(0.0) : gms::minimal_image(c.cell(), c.centers()[j] - c.centers()[k]);
      K[static_cast<std::size_t>(j) * N + k] = eisenstein_brute(c.cell(), n, d, j == k);
    }
  return K;
}

// The (q+1)-fold nested sum of the structural sum definition, with kernels
// supplied per entry. Factor j (1-based) is conjugated iff j is even.
inline cdouble esum_nested(const std::vector<std::vector<cdouble>>& kernels, const std::vector<int>& m, int N) {
  const int q = static_cast<int>(m.size());
  std::vector<int> k(q + 1, 0);
  cdouble total = 0.0;
  while (true) {
    cdouble prod = 1.0;
    for (int j = 0; j < q; ++j) {
      cdouble e = kernels[j][static_cast<std::size_t>(k[j]) * N + k[j + 1]];
      if ((j + 1) % 2 == 0) e = std::conj(e);
      prod *= e;
    }
    total += prod;
    int p = q;
    while (p >= 0 && ++k[p] == N) k[p--] = 0;
    if (p < 0) break;
  }
  double weight = 1.0;
  for (int v : m) weight += 0.5 * v;
  return total / std::pow(double(N), weight);
}

}  // namespace oracle
