#pragma once

#include <span>
#include <vector>

#include "gms/geometry.hpp"

namespace gms {

/// Kernel matrices K_n[j][k] = E_n(a_j - a_k) for n = 2..n_max, with the
/// diagonal regularized to S_n. Built once per configuration and read-only
/// afterwards.
class KernelCache {
 public:
  enum class Build { serial, parallel };

  KernelCache(const DiskConfiguration& config, int n_max, Build build = Build::parallel);

  int size() const { return n_; }
  int max_order() const { return n_max_; }
  const Cell& cell() const { return cell_; }

  cdouble operator()(int order, int j, int k) const {
    return data_[(static_cast<std::size_t>(order - 2) * n_ + j) * n_ + k];
  }
  /// Row-major N x N block of order n.
  std::span<const cdouble> matrix(int order) const {
    return {data_.data() + static_cast<std::size_t>(order - 2) * n_ * n_,
            static_cast<std::size_t>(n_) * n_};
  }

  /// Throws ResourceError when `order` exceeds the cache.
  void require(int order) const;

 private:
  Cell cell_;
  int n_;
  int n_max_;
  std::vector<cdouble> data_;
};

}  // namespace gms
