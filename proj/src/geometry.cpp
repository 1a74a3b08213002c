#include "gms/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gms/errors.hpp"
#include "gms/io.hpp"

namespace gms {

namespace {

// Parallelogram coordinates (s, t) with z = s omega1 + t omega2.
void to_cell_coords(const Cell& cell, cdouble z, double& s, double& t) {
  const cdouble w2 = cell.omega2();
  t = z.imag() / w2.imag();
  s = (z.real() - t * w2.real()) / cell.omega1();
}

double wrap_half(double x) {
  double r = x - std::floor(x + 0.5);
  // Guard the upper edge against rounding.
  if (r >= 0.5) r -= 1.0;
  return r;
}

// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

cdouble periodic_reduce(const Cell& cell, cdouble z) {
  double s, t;
  to_cell_coords(cell, z, s, t);
  const double sr = wrap_half(s);
  const double tr = wrap_half(t);
  if (sr == s && tr == t) return z;
  return sr * cell.omega1() + tr * cell.omega2();
}

cdouble minimal_image(const Cell& cell, cdouble z) {
  const cdouble base = periodic_reduce(cell, z);
  cdouble best = base;
  double best_norm = std::abs(base);
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      if (a == 0 && b == 0) continue;
      const cdouble c = base + double(a) * cell.omega1() + double(b) * cell.omega2();
      const double nc = std::abs(c);
      if (nc < best_norm) {
        best = c;
        best_norm = nc;
      }
    }
  }
  return best;
}

double periodic_distance(const Cell& cell, cdouble z1, cdouble z2) {
  return std::abs(minimal_image(cell, z1 - z2));
}

double radius_for(int n, double nu) {
  if (n < 1) throw DomainError("N must be >= 1");
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("concentration must lie in (0, 1)");
  return std::sqrt(nu / (n * kPi));
}

DiskConfiguration DiskConfiguration::make(Cell cell, std::vector<cdouble> centers, double radius) {
  if (centers.empty()) throw DomainError("configuration needs at least one disk");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be positive");
  const double nu = double(centers.size()) * kPi * radius * radius;
  if (!(nu < 1.0)) throw DomainError("concentration " + std::to_string(nu) + " is not below 1");
  for (auto& c : centers) c = periodic_reduce(cell, c);
  for (std::size_t j = 0; j < centers.size(); ++j)
    for (std::size_t k = j + 1; k < centers.size(); ++k)
      if (periodic_distance(cell, centers[j], centers[k]) < 2.0 * radius - kOverlapTolerance)
        throw DomainError("disks " + std::to_string(j) + " and " + std::to_string(k) + " overlap");
  return DiskConfiguration(std::move(cell), std::move(centers), radius);
}

double DiskConfiguration::concentration() const { return size() * kPi * radius_ * radius_; }

DiskConfiguration DiskConfiguration::with_radius(double radius) const {
  return make(cell_, centers_, radius);
}

double DiskConfiguration::min_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < size(); ++j)
    for (int k = j + 1; k < size(); ++k)
      best = std::min(best, periodic_distance(cell_, centers_[j], centers_[k]));
  return best - 2.0 * radius_;
}

void EnsembleDescriptor::validate() const {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (n < 1) throw DomainError("N must be >= 1");
  if (!(nu > 0.0)) throw DomainError("concentration must be positive");
  if (nu > nu_guard)
    throw DomainError("concentration " + std::to_string(nu) + " exceeds the RSA guard " +
                      std::to_string(nu_guard));
  if (max_attempts < 1) throw DomainError("attempt budget must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DiskConfiguration rsa_generate(const Cell& cell, int n, double radius, std::uint64_t seed,
                               long long max_attempts) {
  if (n < 1) throw DomainError("N must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<cdouble> centers;
  centers.reserve(n);
  const double min_dist = 2.0 * radius;
  long long attempts = 0;
  while (static_cast<int>(centers.size()) < n) {
    if (attempts >= max_attempts)
      throw GenerationFailure("RSA placed " + std::to_string(centers.size()) + " of " +
                                  std::to_string(n) + " disks in " + std::to_string(attempts) +
                                  " attempts",
                              static_cast<int>(centers.size()), attempts);
    ++attempts;
    const double s = unit_uniform(rng) - 0.5;
    const double t = unit_uniform(rng) - 0.5;
    const cdouble z = s * cell.omega1() + t * cell.omega2();
    bool ok = true;
    for (const auto& c : centers) {
      if (periodic_distance(cell, z, c) < min_dist) {
        ok = false;
        break;
      }
    }
    if (ok) centers.push_back(z);
  }
  return DiskConfiguration::make(cell, std::move(centers), radius);
}

DiskConfiguration rsa_generate(const EnsembleDescriptor& desc) {
  desc.validate();
  return rsa_generate(desc.cell(), desc.n, radius_for(desc.n, desc.nu), desc.seed, desc.max_attempts);
}

ArrayKind parse_array_kind(const std::string& name) {
  if (name == "square") return ArrayKind::square;
  if (name == "hexagonal" || name == "hex") return ArrayKind::hexagonal;
  throw DomainError("unknown array kind '" + name + "'");
}

DiskConfiguration regular_array(const Cell& cell, ArrayKind kind, int n, double nu) {
  const int m = static_cast<int>(std::lround(std::sqrt(double(std::max(n, 0)))));
  if (n < 1 || m * m != n) throw DomainError("regular arrays need N = m^2, got " + std::to_string(n));
  const cdouble ratio = cell.tau();
  const cdouble want = kind == ArrayKind::square ? cdouble(0.0, 1.0) : std::polar(1.0, kPi / 3.0);
  if (std::abs(ratio - want) > 1e-12)
    throw DomainError(kind == ArrayKind::square ? "square array needs the square cell"
                                                : "hexagonal array needs the hexagonal cell");
  std::vector<cdouble> centers;
  centers.reserve(n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      centers.push_back(((i + 0.5) / m - 0.5) * cell.omega1() + ((j + 0.5) / m - 0.5) * cell.omega2());
  return DiskConfiguration::make(cell, std::move(centers), radius_for(n, nu));
}

std::string configuration_to_json(const DiskConfiguration& config, const ConfigMeta& meta) {
  io::Json j;
  j["cell"] = {{"omega1", config.cell().omega1()},
               {"omega2", {config.cell().omega2().real(), config.cell().omega2().imag()}}};
  j["radius"] = config.radius();
  io::Json centers = io::Json::array();
  for (const auto& c : config.centers()) centers.push_back({c.real(), c.imag()});
  j["centers"] = std::move(centers);
  j["meta"] = {{"seed", meta.seed}, {"generator", meta.generator}, {"nu", meta.nu}};
  return io::dump(j) + "\n";
}

DiskConfiguration configuration_from_json(const std::string& text, ConfigMeta* meta) {
  io::Json j;
  try {
    j = io::Json::parse(text);
    const double omega1 = j.at("cell").at("omega1").get<double>();
    const auto& w2 = j.at("cell").at("omega2");
    const cdouble omega2(w2.at(0).get<double>(), w2.at(1).get<double>());
    std::vector<cdouble> centers;
    for (const auto& c : j.at("centers")) centers.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    const double radius = j.at("radius").get<double>();
    if (meta) {
      *meta = ConfigMeta{};
      if (j.contains("meta")) {
        const auto& m = j["meta"];
        if (m.contains("seed")) meta->seed = m["seed"].get<std::uint64_t>();
        if (m.contains("generator")) meta->generator = m["generator"].get<std::string>();
        if (m.contains("nu")) meta->nu = m["nu"].get<double>();
      }
    }
    return DiskConfiguration::make(Cell::make(omega1, omega2), std::move(centers), radius);
  } catch (const io::Json::exception& e) {
    throw DomainError(std::string("malformed configuration: ") + e.what());
  }
}

void write_configuration(const std::string& path, const DiskConfiguration& config, const ConfigMeta& meta) {
  io::write_file(path, configuration_to_json(config, meta));
}

DiskConfiguration read_configuration(const std::string& path, ConfigMeta* meta) {
  return configuration_from_json(io::read_file(path), meta);
}

}  // namespace gms
