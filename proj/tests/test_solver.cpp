#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gms/errors.hpp"
#include "gms/solver.hpp"
#include "graded.hpp"

using namespace gms;

namespace {

DiskConfiguration sample(int n, double nu, std::uint64_t seed) {
  return rsa_generate(make_cell(1.0, {0.15, 0.9}), n, radius_for(n, nu), seed);
}

}  // namespace

TEST_CASE("Taylor fields") {
  TaylorField f(2, 3);
  f(1, 0) = 1.0;
  f(1, 2) = cdouble(0.0, 2.0);
  CHECK(f.evaluate(1, 0.5) == cdouble(1.0, 0.5));
  CHECK(f.scaled_norm(0.5) == doctest::Approx(1.0));
  CHECK(f.scaled_norm(1.0) == doctest::Approx(2.0));
  const auto g = 2.0 * f - f;
  CHECK(g(1, 2) == f(1, 2));
  CHECK_THROWS_AS(f += TaylorField(2, 4), DomainError);
  const auto one = TaylorField::constant(3, 4);
  CHECK(one(2, 0) == 1.0);
  CHECK(one(2, 1) == 0.0);
}

TEST_CASE("apply_w basics") {
  const auto c = sample(6, 0.2, 3);
  const int L = 6;
  const KernelCache K(c, kernel_order_for(L));
  const double r = c.radius();
  const auto zero = apply_w(K, r, TaylorField(6, L));
  CHECK(zero.scaled_norm(1.0) == 0.0);

  const auto w1 = apply_w(K, r, TaylorField::constant(6, L));
  for (int k = 0; k < 6; ++k) {
    cdouble s = lattice_sum(c.cell(), 2);
    for (int m = 0; m < 6; ++m)
      if (m != k) s += eisenstein(c.cell(), 2, minimal_image(c.cell(), c.centers()[k] - c.centers()[m]));
    CHECK(std::abs(w1(k, 0) - r * r * s) < 1e-12 * std::abs(r * r * s));
  }
  const auto exact = cluster_terms_exact(K, 1.0, L, 1);
  CHECK(graded::rel_diff((1.0 / (r * r)) * w1, exact[1]) < 1e-13);

  const auto serial = apply_w_serial(K, r, w1);
  const auto parallel = apply_w(K, r, w1);
  for (int k = 0; k < 6; ++k)
    for (int l = 0; l <= L; ++l) CHECK(serial(k, l) == parallel(k, l));

  const KernelCache small(c, 2 * L + 1);
  CHECK_THROWS_AS(apply_w(small, r, w1), ResourceError);
  CHECK_THROWS_AS(apply_w(K, r, TaylorField(5, L)), DomainError);

  const auto one = regular_array(Cell::square(), ArrayKind::square, 1, 0.1);
  const auto w = apply_w(one, TaylorField::constant(1, 4));
  CHECK(std::abs(w(0, 0) - one.radius() * one.radius() * kPi) < 1e-15);
}

TEST_CASE("graded iterates reproduce the exact low-order terms") {
  for (int N : {1, 3, 5, 8}) {
    const auto c = sample(N, 0.3, 50 + N);
    const int L = 8;
    const KernelCache K(c, 2 * L + 3);
    const double rho = 0.7;
    const auto W = graded::powers(K, L, 3, 3);
    const auto exact = cluster_terms_exact(K, rho, L, 3);
    INFO("N = " << N);
    CHECK(graded::rel_diff(rho * graded::bucket(W[1], 1, N, L), exact[1]) < 1e-10);
    CHECK(graded::rel_diff(rho * rho * graded::bucket(W[2], 2, N, L), exact[2]) < 1e-10);
    const auto third = rho * rho * rho * graded::bucket(W[3], 3, N, L) + rho * rho * graded::bucket(W[2], 3, N, L);
    CHECK(graded::rel_diff(third, exact[3]) < 1e-10);
  }
}

TEST_CASE("contrast-order iterates are the partial sums of the operator series") {
  const auto c = sample(8, 0.3, 21);
  const int L = 6;
  const KernelCache K(c, kernel_order_for(L));
  const double r = c.radius(), rho = -0.8;
  SolverParams p;
  p.degree = L;
  p.mode = SolverParams::Mode::contrast_order;
  p.order = 3;
  const auto solved = solve_contrast(K, r, rho, p);
  CHECK(solved.iterations == 3);
  const auto W = graded::powers(K, L, 3, 3 * (L + 1));
  TaylorField sum(8, L);
  for (int k = 0; k <= 3; ++k)
    for (const auto& [s, f] : W[k]) sum += (std::pow(rho, k) * std::pow(r, 2 * s)) * f;
  CHECK(graded::rel_diff(solved.field, sum) < 1e-12);
}

TEST_CASE("cluster coefficients follow from the graded operator") {
  const auto c = sample(8, 0.3, 77);
  const int L = 8, N = 8;
  const KernelCache K(c, 2 * L + 3);
  const auto W = graded::powers(K, L, 6, 6);
  for (double rho : {1.0, 0.6, -0.9}) {
    const auto A = cluster_coeffs(esum_table(K, required_indices(6)), rho, 6);
    for (int s = 1; s <= 6; ++s) {
      cdouble a = 0.0;
      for (int p = 1; p <= s; ++p) {
        const auto f = graded::bucket(W[p], s, N, L);
        cdouble mean = 0.0;
        for (int k = 0; k < N; ++k) mean += f(k, 0);
        a += std::pow(rho, p) * mean / double(N);
      }
      a /= std::pow(N * kPi, s);
      INFO("rho = " << rho << " A_" << s);
      CHECK(std::abs(a - A[s]) < 1e-10 * std::max(1.0, std::abs(A[s])));
    }
  }
}

TEST_CASE("solve_contrast") {
  const auto c = sample(8, 0.2, 5);
  SUBCASE("rho = 0") {
    const auto r = solve_contrast(c, 0.0);
    CHECK(r.lambda11 == 1.0);
    CHECK(r.lambda12 == 0.0);
    CHECK(r.iterations == 1);
  }
  SUBCASE("first order") {
    SolverParams p;
    p.mode = SolverParams::Mode::contrast_order;
    p.order = 1;
    const double rho = 0.4, nu = c.concentration();
    const auto r = solve_contrast(c, rho, p);
    const cdouble e2 = esum(c, MultiIndex{2});
    const cdouble expect = 1.0 + 2.0 * rho * nu + 2.0 * rho * rho * nu * (nu / kPi) * e2;
    CHECK(std::abs(r.lambda() - expect) < 1e-14);
  }
  SUBCASE("convergence and refinement on the square array") {
    const auto one = regular_array(Cell::square(), ArrayKind::square, 1, 0.1);
    const auto r = solve_contrast(one, 1.0);
    CHECK(r.converged);
    CHECK(r.residual <= 1e-12);
    SolverParams p;
    p.degree = kDefaultDegree + 4;
    CHECK(std::abs(solve_contrast(one, 1.0, p).lambda11 - r.lambda11) < 1e-9);
  }
  SUBCASE("failure carries the residual history") {
    SolverParams p;
    p.max_iterations = 3;
    p.tolerance = 1e-300;
    try {
      solve_contrast(c, 1.0, p);
      FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
      CHECK(e.residuals().size() == 3);
      CHECK(e.exit_code() == 3);
    }
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(solve_contrast(c, 1.5), DomainError);
    SolverParams p;
    p.tolerance = 0.0;
    CHECK_THROWS_AS(solve_contrast(c, 0.5, p), DomainError);
  }
  SUBCASE("iterate dump") {
    const std::string path = (std::filesystem::temp_directory_path() / "gms_solver_dump.jsonl").string();
    std::remove(path.c_str());
    SolverParams p;
    p.degree = 3;
    p.dump_path = path;
    const auto r = solve_contrast(c, 0.5, p);
    std::ifstream in(path);
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    std::remove(path.c_str());
    CHECK(lines == r.iterations);
  }
}

TEST_CASE("mirror-symmetric configurations give lambda12 = 0") {
  const auto c = DiskConfiguration::make(Cell::square(), {cdouble(0.1, 0.2), cdouble(0.1, -0.2), 0.3, -0.25}, 0.08);
  CHECK(std::abs(solve_contrast(c, 1.0).lambda12) < 1e-10);
  CHECK(std::abs(solve_contrast(c, -1.0).lambda12) < 1e-10);
}

TEST_CASE("truncation stability at nu = 0.3") {
  // RSA configuration with minimal gap about 0.24 r.
  const auto c = rsa_generate(Cell::square(), 16, radius_for(16, 0.3), 125);
  REQUIRE(c.min_gap() >= 0.2 * c.radius());
  SolverParams p;
  p.degree = 18;
  const double base = solve_contrast(c, 1.0, p).lambda11;
  p.degree += 4;
  CHECK(std::abs(solve_contrast(c, 1.0, p).lambda11 - base) < 1e-8);
}

TEST_CASE("shape factor") {
  const Cell sq = Cell::square();
  CHECK(std::abs(shape_factor(sq, radius_for(1, 1e-6)) - 1.0) < 1e-5);
  // Disk of a 64-disk composite at nu = 0.1.
  const double r = radius_for(64, 0.1);
  const double a = shape_factor(sq, r);
  CHECK(std::abs(a - 1.0) < 0.05);
  CHECK(std::abs(a - shape_factor(sq, r, 0.5)) < 0.1 * 0.1);
  // For one disk per cell the dilute form with this alpha is the solver value.
  const auto one = regular_array(sq, ArrayKind::square, 1, 0.2);
  const double alpha = shape_factor(sq, one.radius(), 0.8);
  CHECK(std::abs(lambda_dilute(0.2, 0.8, alpha).lambda11 - solve_contrast(one, 0.8).lambda11) < 1e-14);
}
