#include "gms/kernels.hpp"

#include <string>

#include "gms/errors.hpp"

namespace gms {

namespace {

// Fills the (j, k) and (k, j) entries of every order from one evaluation,
// using E_n(-z) = (-1)^n E_n(z).
void fill_pair(const DiskConfiguration& config, int n, int n_max, int j, int k, std::vector<cdouble>& buf,
               std::vector<cdouble>& data) {
  const auto& a = config.centers();
  const cdouble d = minimal_image(config.cell(), a[j] - a[k]);
  eisenstein_orders(config.cell(), d, n_max, false, buf);
  for (int order = 2; order <= n_max; ++order) {
    const std::size_t base = static_cast<std::size_t>(order - 2) * n * n;
    const cdouble v = buf[order - 2];
    data[base + static_cast<std::size_t>(j) * n + k] = v;
    data[base + static_cast<std::size_t>(k) * n + j] = (order % 2 == 0) ? v : -v;
  }
}

}  // namespace

KernelCache::KernelCache(const DiskConfiguration& config, int n_max, Build build)
    : cell_(config.cell()), n_(config.size()), n_max_(n_max) {
  if (n_max < 2) throw DomainError("kernel cache needs n_max >= 2");
  data_.assign(static_cast<std::size_t>(n_max - 1) * n_ * n_, 0.0);
  for (int order = 2; order <= n_max; ++order) {
    const cdouble s = cell_.lattice_sum(order);
    const std::size_t base = static_cast<std::size_t>(order - 2) * n_ * n_;
    for (int j = 0; j < n_; ++j) data_[base + static_cast<std::size_t>(j) * n_ + j] = s;
  }

  const int n = n_;
  if (build == Build::serial) {
    std::vector<cdouble> buf(n_max - 1);
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) fill_pair(config, n, n_max, j, k, buf, data_);
    return;
  }
  // Row j owns the pairs (j, k > j); the entries written are disjoint.
#pragma omp parallel if (n > 8)
  {
    std::vector<cdouble> buf(n_max - 1);
#pragma omp for schedule(dynamic, 1)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) fill_pair(config, n, n_max, j, k, buf, data_);
  }
}

void KernelCache::require(int order) const {
  if (order > n_max_)
    throw ResourceError("Eisenstein order " + std::to_string(order) + " exceeds the kernel cache (n_max = " +
                        std::to_string(n_max_) + ")");
}

}  // namespace gms
