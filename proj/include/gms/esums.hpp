#pragma once

#include <compare>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gms/kernels.hpp"

namespace gms {

/// Multi-index (m_1, ..., m_q) of a structural sum, every entry >= 2.
class MultiIndex {
 public:
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}
  explicit MultiIndex(std::vector<int> entries);

  /// "3-3-2" (also accepts "332" when every entry is a single digit).
  static MultiIndex parse(const std::string& text);

  const std::vector<int>& entries() const { return entries_; }
  int length() const { return static_cast<int>(entries_.size()); }
  int max_entry() const;
  /// 1 + (m_1 + ... + m_q) / 2, the power of N in the normalization.
  double weight() const;
  /// Hyphen-joined entries.
  std::string str() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
};

struct MultiIndexSum {
  MultiIndex index;
  cdouble value;
};

using EsumTable = std::map<MultiIndex, cdouble>;

/// e_{m1...mq} by the chained matrix-vector algorithm, O(q N^2). Factor j
/// (1-based) of the chain is conjugated iff j is even.
cdouble esum(const KernelCache& kernels, const MultiIndex& index);
cdouble esum_serial(const KernelCache& kernels, const MultiIndex& index);
/// Builds the kernel cache for the index and evaluates it.
cdouble esum(const DiskConfiguration& config, const MultiIndex& index);

/// e_nn = (-1)^n / N^(n+1) * sum_m |sum_k E_n(a_m - a_k)|^2.
cdouble esum_nn(const KernelCache& kernels, int n);
cdouble esum_nn(const DiskConfiguration& config, int n);

/// Every multi-index occurring in A_1..A_max_order of the cluster
/// coefficients, first occurrence order, de-duplicated. 1 <= max_order <= 6.
std::vector<MultiIndex> required_indices(int max_order);

/// Evaluates many indices against one cache.
EsumTable esum_table(const KernelCache& kernels, const std::vector<MultiIndex>& indices);

/// CSV rows "config_id,index,re,im" (header included when requested).
void write_esum_csv(std::ostream& out, const std::string& config_id, const std::vector<MultiIndexSum>& rows,
                    bool header = true);

}  // namespace gms
