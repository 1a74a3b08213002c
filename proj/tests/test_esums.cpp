#include <doctest.h>

#include <sstream>

#include "gms/errors.hpp"
#include "gms/esums.hpp"
#include "oracles.hpp"

using namespace gms;

namespace {

double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

DiskConfiguration rsa(int n, double nu, std::uint64_t seed, cdouble omega2 = {0.0, 1.0}) {
  return rsa_generate(Cell::make(1.0, omega2), n, radius_for(n, nu), seed);
}

}  // namespace

TEST_CASE("multi-index") {
  const auto m = MultiIndex::parse("3-3-2");
  CHECK(m == MultiIndex{3, 3, 2});
  CHECK(MultiIndex::parse("332") == m);
  CHECK(MultiIndex::parse("10-2").entries() == std::vector<int>{10, 2});
  CHECK(m.weight() == 5.0);
  CHECK(m.str() == "3-3-2");
  CHECK(m.max_entry() == 3);
  CHECK_THROWS_AS(MultiIndex({1, 2}), DomainError);
  CHECK_THROWS_AS(MultiIndex::parse("3--2"), DomainError);
  CHECK_THROWS_AS(MultiIndex::parse(""), DomainError);
}

TEST_CASE("required indices") {
  CHECK(required_indices(1) == std::vector<MultiIndex>{{2}});
  CHECK(required_indices(3) == std::vector<MultiIndex>{{2}, {2, 2}, {3, 3}, {2, 2, 2}});
  const auto six = required_indices(6);
  CHECK(std::find(six.begin(), six.end(), MultiIndex{3, 3, 3, 3}) != six.end());
  CHECK(std::find(six.begin(), six.end(), MultiIndex{2, 2, 2, 2, 2, 2}) != six.end());
  CHECK(six.size() == 1 + 1 + 2 + 4 + 8 + 16);
  CHECK_THROWS_AS(required_indices(0), DomainError);
  CHECK_THROWS_AS(required_indices(7), DomainError);
}

TEST_CASE("kernel cache against brute-force Eisenstein sums") {
  const auto c = rsa(4, 0.3, 17, {0.2, 1.1});
  const KernelCache K(c, 4);
  for (int n = 2; n <= 4; ++n) {
    const auto ref = oracle::kernel_brute(c, n);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) CHECK(rel(K(n, j, k), ref[j * 4 + k]) < 1e-11);
  }
  const KernelCache serial(c, 4, KernelCache::Build::serial);
  for (int n = 2; n <= 4; ++n)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) CHECK(serial(n, j, k) == K(n, j, k));
  CHECK_THROWS_AS(K.require(5), ResourceError);
}

TEST_CASE("single-disk square array collapses to lattice sums") {
  const auto one = regular_array(Cell::square(), ArrayKind::square, 1, 0.2);
  CHECK(std::abs(esum(one, MultiIndex{2}) - kPi) < 1e-13);
  CHECK(std::abs(esum(one, MultiIndex{2, 2}) - kPi * kPi) < 1e-12);
  CHECK(std::abs(esum_nn(one, 2) - kPi * kPi) < 1e-12);
  CHECK(std::abs(esum_nn(one, 3)) < 1e-15);
}

TEST_CASE("fast chain equals the nested definition for N <= 4, q <= 3") {
  for (int N = 1; N <= 4; ++N) {
    const auto c = rsa(N, 0.25, 100 + N, {0.15, 0.95});
    const KernelCache K(c, 4);
    std::vector<std::vector<cdouble>> brute(5);
    for (int n = 2; n <= 4; ++n) brute[n] = oracle::kernel_brute(c, n);
    const std::vector<std::vector<int>> indices = {{2}, {3}, {4}, {2, 2}, {3, 3}, {2, 4}, {4, 3}, {2, 2, 2},
                                                   {3, 3, 2}, {2, 3, 3}, {4, 2, 3}, {3, 4, 3}};
    for (const auto& m : indices) {
      std::vector<std::vector<cdouble>> same, independent;
      for (int v : m) {
        const auto mat = K.matrix(v);
        same.emplace_back(mat.begin(), mat.end());
        independent.push_back(brute[v]);
      }
      const cdouble fast = esum(K, MultiIndex(m));
      const cdouble ref = oracle::esum_nested(same, m, N);
      const cdouble ref_brute = oracle::esum_nested(independent, m, N);
      INFO("N = " << N << " index " << MultiIndex(m).str());
      // Odd-order sums can vanish by symmetry; measure against the size of the terms.
      const double scale = std::max({std::abs(ref), 1e-3 * std::abs(esum(K, MultiIndex{m[0], m[0]})), 1e-14});
      CHECK(std::abs(fast - ref) <= 1e-12 * scale);
      CHECK(std::abs(fast - ref_brute) <= 1e-10 * scale + 1e-14);
      CHECK(esum_serial(K, MultiIndex(m)) == fast);
    }
  }
}

TEST_CASE("esum_nn identity on 64-disk configurations") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto c = rsa(64, 0.3, seed);
    const KernelCache K(c, 6);
    for (int n = 2; n <= 6; ++n) CHECK(rel(esum(K, MultiIndex{n, n}), esum_nn(K, n)) < 1e-10);
  }
}

TEST_CASE("refinement invariance of the square array") {
  const Cell sq = Cell::square();
  const cdouble e1 = esum(regular_array(sq, ArrayKind::square, 1, 0.2), MultiIndex{2});
  const cdouble e4 = esum(regular_array(sq, ArrayKind::square, 4, 0.2), MultiIndex{2});
  CHECK(std::abs(e1 - e4) < 1e-9);
}

TEST_CASE("odd index vanishes on a centrosymmetric pair") {
  const auto c = DiskConfiguration::make(make_cell(1.0, {0.3, 1.2}), {cdouble(0.13, 0.21), cdouble(-0.13, -0.21)}, 0.05);
  CHECK(std::abs(esum(c, MultiIndex{3})) < 1e-13);
}

TEST_CASE("structural sums do not depend on the radius") {
  const auto c = rsa(16, 0.2, 8);
  const auto smaller = c.with_radius(c.radius() * 0.5);
  for (const auto& idx : required_indices(4)) CHECK(esum(c, idx) == esum(smaller, idx));
}

TEST_CASE("CSV output") {
  std::ostringstream out;
  write_esum_csv(out, "cfg", {{MultiIndex{3, 3, 2}, cdouble(0.1, -2.0)}});
  CHECK(out.str() == "config_id,index,re,im\ncfg,3-3-2,0.10000000000000001,-2\n");
}
