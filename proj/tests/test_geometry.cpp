#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "gms/errors.hpp"
#include "gms/geometry.hpp"

using namespace gms;

TEST_CASE("periodic_reduce") {
  const Cell sq = Cell::square();
  CHECK(periodic_reduce(sq, 0.3) == cdouble(0.3));
  CHECK(std::abs(periodic_reduce(sq, 1.3) - cdouble(0.3)) < 1e-15);
  CHECK(std::abs(periodic_reduce(sq, {0.6, 0.7}) - cdouble(-0.4, -0.3)) < 1e-15);
  const Cell c = make_cell(1.0, {0.4, 0.9});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const cdouble z(u(rng), u(rng));
    const cdouble r = periodic_reduce(c, z);
    CHECK(periodic_reduce(c, r) == r);
    CHECK(periodic_distance(c, z, r) < 1e-12);
  }
}

TEST_CASE("periodic_distance") {
  const Cell sq = Cell::square();
  CHECK(periodic_distance(sq, {0.0, 0.45}, {0.0, -0.45}) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(periodic_distance(sq, {0.1, 0.1}, {0.1, 0.1}) == 0.0);
  CHECK(periodic_distance(sq, -0.45, 0.45) == doctest::Approx(0.1).epsilon(1e-12));

  const Cell c = make_cell(1.0, {-0.3, 1.2});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const cdouble a(u(rng), u(rng)), b(u(rng), u(rng)), d(u(rng), u(rng));
    const double ab = periodic_distance(c, a, b);
    CHECK(ab == doctest::Approx(periodic_distance(c, b, a)).epsilon(1e-14));
    CHECK(ab <= periodic_distance(c, a, d) + periodic_distance(c, d, b) + 1e-12);
  }
}

TEST_CASE("configuration validation") {
  const Cell sq = Cell::square();
  CHECK_THROWS_AS(DiskConfiguration::make(sq, {0.0, 0.1}, 0.1), DomainError);
  CHECK_THROWS_AS(DiskConfiguration::make(sq, {0.0}, 0.6), DomainError);
  CHECK_THROWS_AS(DiskConfiguration::make(sq, {}, 0.1), DomainError);
  const auto c = DiskConfiguration::make(sq, {0.0, 0.5}, 0.2);
  CHECK(c.concentration() == doctest::Approx(2.0 * kPi * 0.04));
  CHECK(c.min_gap() == doctest::Approx(0.1));
}

TEST_CASE("RSA generation") {
  const Cell sq = Cell::square();
  SUBCASE("single disk") {
    const auto c = rsa_generate(sq, 1, 0.2, 9);
    CHECK(c.size() == 1);
  }
  SUBCASE("64 disks at nu = 0.3") {
    EnsembleDescriptor d;
    d.n = 64;
    d.nu = 0.3;
    d.seed = 42;
    const auto c = rsa_generate(d);
    REQUIRE(c.size() == 64);
    CHECK(c.concentration() == doctest::Approx(0.3).epsilon(1e-14));
    for (int j = 0; j < 64; ++j)
      for (int k = j + 1; k < 64; ++k)
        CHECK(periodic_distance(sq, c.centers()[j], c.centers()[k]) >= 2.0 * c.radius() - 1e-12);
    const auto again = rsa_generate(d);
    CHECK(again.centers() == c.centers());
  }
  SUBCASE("dense pair succeeds or fails cleanly") {
    try {
      const auto c = rsa_generate(sq, 2, radius_for(2, 0.5), 5, 100000);
      CHECK(c.min_gap() >= -1e-12);
    } catch (const GenerationFailure& e) {
      CHECK(e.placed() < 2);
      CHECK(e.exit_code() == 3);
    }
  }
  SUBCASE("budget exhaustion") {
    CHECK_THROWS_AS(rsa_generate(sq, 64, radius_for(64, 0.5), 1, 2000), GenerationFailure);
  }
  SUBCASE("guard") {
    EnsembleDescriptor d;
    d.nu = 0.55;
    CHECK_THROWS_AS(d.validate(), DomainError);
    d.nu = 0.3;
    d.trials = 0;
    CHECK_THROWS_AS(d.validate(), DomainError);
  }
}

TEST_CASE("single-disk uniformity") {
  const Cell sq = Cell::square();
  std::vector<int> bins(100, 0);
  for (int i = 0; i < 1000; ++i) {
    const cdouble z = rsa_generate(sq, 1, 0.01, trial_seed(2024, i)).centers()[0];
    const int bx = std::min(9, int((z.real() + 0.5) * 10));
    const int by = std::min(9, int((z.imag() + 0.5) * 10));
    ++bins[by * 10 + bx];
  }
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - 10.0) * (b - 10.0) / 10.0;
  // 99 degrees of freedom, p = 0.001
  CHECK(chi2 < 148.23);
}

TEST_CASE("seed splitting") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(trial_seed(7, 0) == (7 ^ splitmix64(0)));
  CHECK(trial_seed(7, 1) != trial_seed(7, 2));
}

TEST_CASE("regular arrays") {
  const Cell sq = Cell::square();
  const auto one = regular_array(sq, ArrayKind::square, 1, 0.2);
  CHECK(one.centers()[0] == cdouble(0.0));
  CHECK(one.radius() == doctest::Approx(std::sqrt(0.2 / kPi)));
  const auto four = regular_array(sq, ArrayKind::square, 4, 0.2);
  for (const auto& z : four.centers()) {
    CHECK(std::abs(std::abs(z.real()) - 0.25) < 1e-15);
    CHECK(std::abs(std::abs(z.imag()) - 0.25) < 1e-15);
  }
  CHECK_NOTHROW(regular_array(Cell::hexagonal(), ArrayKind::hexagonal, 1, 0.5));
  CHECK_THROWS_AS(regular_array(sq, ArrayKind::square, 3, 0.2), DomainError);
  CHECK_THROWS_AS(regular_array(sq, ArrayKind::hexagonal, 1, 0.2), DomainError);
}

TEST_CASE("configuration files round-trip") {
  EnsembleDescriptor d;
  d.n = 16;
  d.nu = 0.25;
  d.seed = 77;
  d.omega2 = {0.2, 1.3};
  const auto c = rsa_generate(d);
  const std::string path = (std::filesystem::temp_directory_path() / "gms_geometry_roundtrip.json").string();
  write_configuration(path, c, ConfigMeta{77, "rsa", c.concentration()});
  ConfigMeta meta;
  const auto back = read_configuration(path, &meta);
  std::remove(path.c_str());
  CHECK(back.centers() == c.centers());
  CHECK(back.radius() == c.radius());
  CHECK(back.cell().omega1() == c.cell().omega1());
  CHECK(back.cell().omega2() == c.cell().omega2());
  CHECK(meta.seed == 77);
  CHECK(meta.generator == "rsa");
  CHECK_THROWS_AS(configuration_from_json("{\"cell\": 1}"), DomainError);
}
