#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gms/lattice.hpp"

namespace gms {

/// Representative of z in the fundamental parallelogram
/// {s omega1 + t omega2 : s, t in [-1/2, 1/2)}.
cdouble periodic_reduce(const Cell& cell, cdouble z);

/// Minimal-norm translate of z over the 9 lattice neighbours of its reduced
/// representative.
cdouble minimal_image(const Cell& cell, cdouble z);

/// |minimal_image(z1 - z2)|
double periodic_distance(const Cell& cell, cdouble z1, cdouble z2);

/// Pairwise overlap tolerance used by every validity check.
inline constexpr double kOverlapTolerance = 1e-12;

/// N equal disks of radius r in a unit-area cell. Centers are stored in
/// reduced coordinates. Invariants (checked by make): pairwise periodic
/// distance >= 2r - 1e-12 and 0 < nu < 1.
class DiskConfiguration {
 public:
  static DiskConfiguration make(Cell cell, std::vector<cdouble> centers, double radius);

  const Cell& cell() const { return cell_; }
  const std::vector<cdouble>& centers() const { return centers_; }
  int size() const { return static_cast<int>(centers_.size()); }
  double radius() const { return radius_; }
  /// nu = N pi r^2 (the cell has unit area)
  double concentration() const;

  /// Same centers and cell, different radius (validated).
  DiskConfiguration with_radius(double radius) const;

  /// Smallest pairwise periodic distance minus 2r; +inf for N = 1.
  double min_gap() const;

 private:
  DiskConfiguration(Cell cell, std::vector<cdouble> centers, double radius)
      : cell_(std::move(cell)), centers_(std::move(centers)), radius_(radius) {}

  Cell cell_;
  std::vector<cdouble> centers_;
  double radius_;
};

/// Radius giving concentration nu with n disks.
double radius_for(int n, double nu);

inline constexpr double kDefaultNuGuard = 0.5;
inline constexpr long long kDefaultAttempts = 1'000'000;

/// Description of a Monte Carlo ensemble of RSA configurations.
struct EnsembleDescriptor {
  int n = 64;
  double nu = 0.3;
  int trials = 1500;
  std::uint64_t seed = 0;
  double omega1 = 1.0;
  cdouble omega2{0.0, 1.0};
  double nu_guard = kDefaultNuGuard;
  long long max_attempts = kDefaultAttempts;

  /// Throws DomainError when trials < 1, n < 1 or nu is outside (0, nu_guard].
  void validate() const;
  Cell cell() const { return Cell::make(omega1, omega2); }
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of trial i: master XOR splitmix64(i).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) { return master ^ splitmix64(i); }

/// Random sequential addition: uniform candidates in the cell, accepted when
/// no closer than 2r (periodically) to every accepted center. Deterministic
/// in `seed`. Throws GenerationFailure after `max_attempts` candidates.
DiskConfiguration rsa_generate(const Cell& cell, int n, double radius, std::uint64_t seed,
                               long long max_attempts = kDefaultAttempts);

/// RSA with the descriptor's own seed.
DiskConfiguration rsa_generate(const EnsembleDescriptor& desc);

enum class ArrayKind { square, hexagonal };

ArrayKind parse_array_kind(const std::string& name);

/// N = m^2 disks on the refined sublattice of the cell; N = 1 puts the disk
/// at 0. Square kind needs the square cell, hexagonal kind the hexagonal one.
DiskConfiguration regular_array(const Cell& cell, ArrayKind kind, int n, double nu);

/// Configuration file metadata.
struct ConfigMeta {
  std::uint64_t seed = 0;
  std::string generator = "rsa";
  double nu = 0.0;
};

/// JSON schema: { cell: {omega1, omega2: [re, im]}, radius,
///                centers: [[re, im], ...], meta: {seed, generator, nu} }
std::string configuration_to_json(const DiskConfiguration& config, const ConfigMeta& meta);
DiskConfiguration configuration_from_json(const std::string& text, ConfigMeta* meta = nullptr);

void write_configuration(const std::string& path, const DiskConfiguration& config, const ConfigMeta& meta);
DiskConfiguration read_configuration(const std::string& path, ConfigMeta* meta = nullptr);

}  // namespace gms
