#include "gms/esums.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gms/errors.hpp"
#include "gms/io.hpp"

namespace gms {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("multi-index must have at least one entry");
  for (int m : entries_)
    if (m < 2) throw DomainError("multi-index entries must be >= 2, got " + std::to_string(m));
}

MultiIndex MultiIndex::parse(const std::string& text) {
  std::vector<int> entries;
  if (text.find('-') != std::string::npos) {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '-')) {
      if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit))
        throw DomainError("bad multi-index '" + text + "'");
      entries.push_back(std::stoi(part));
    }
  } else {
    if (text.empty() || !std::all_of(text.begin(), text.end(), ::isdigit))
      throw DomainError("bad multi-index '" + text + "'");
    for (char c : text) entries.push_back(c - '0');
  }
  return MultiIndex(std::move(entries));
}

int MultiIndex::max_entry() const { return *std::max_element(entries_.begin(), entries_.end()); }

double MultiIndex::weight() const {
  return 1.0 + 0.5 * std::accumulate(entries_.begin(), entries_.end(), 0);
}

std::string MultiIndex::str() const {
  std::string s;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(entries_[i]);
  }
  return s;
}

namespace {

template <bool Parallel>
cdouble chain(const KernelCache& kernels, const MultiIndex& index) {
  kernels.require(index.max_entry());
  const int n = kernels.size();
  const auto& m = index.entries();
  std::vector<cdouble> u(n, 1.0), next(n);
  // Right to left: u <- F_j u with F_j = K_{m_j}, conjugated for even j.
  for (int j = index.length(); j >= 1; --j) {
    const auto mat = kernels.matrix(m[j - 1]);
    const bool conj = (j % 2 == 0);
#pragma omp parallel for schedule(static) if (Parallel && n >= 64)
    for (int row = 0; row < n; ++row) {
      const cdouble* r = mat.data() + static_cast<std::size_t>(row) * n;
      cdouble acc = 0.0;
      if (conj)
        for (int col = 0; col < n; ++col) acc += std::conj(r[col]) * u[col];
      else
        for (int col = 0; col < n; ++col) acc += r[col] * u[col];
      next[row] = acc;
    }
    std::swap(u, next);
  }
  cdouble total = 0.0;
  for (const auto& v : u) total += v;
  return total / std::pow(double(n), index.weight());
}

}  // namespace

cdouble esum(const KernelCache& kernels, const MultiIndex& index) { return chain<true>(kernels, index); }

cdouble esum_serial(const KernelCache& kernels, const MultiIndex& index) { return chain<false>(kernels, index); }

cdouble esum(const DiskConfiguration& config, const MultiIndex& index) {
  return esum(KernelCache(config, index.max_entry()), index);
}

cdouble esum_nn(const KernelCache& kernels, int n) {
  if (n < 2) throw DomainError("e_nn needs n >= 2");
  kernels.require(n);
  const int size = kernels.size();
  const auto mat = kernels.matrix(n);
  double total = 0.0;
  for (int m = 0; m < size; ++m) {
    cdouble row = 0.0;
    for (int k = 0; k < size; ++k) row += mat[static_cast<std::size_t>(m) * size + k];
    total += std::norm(row);
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * total / std::pow(double(size), n + 1);
}

cdouble esum_nn(const DiskConfiguration& config, int n) {
  if (n < 2) throw DomainError("e_nn needs n >= 2");
  return esum_nn(KernelCache(config, n), n);
}

std::vector<MultiIndex> required_indices(int max_order) {
  if (max_order < 1 || max_order > 6)
    throw DomainError("cluster coefficient order must lie in 1..6, got " + std::to_string(max_order));
  // Index sets of A_1..A_6, in the order the terms appear.
  static const std::vector<std::vector<MultiIndex>> by_order = {
      {{2}},
      {{2, 2}},
      {{3, 3}, {2, 2, 2}},
      {{4, 4}, {3, 3, 2}, {2, 3, 3}, {2, 2, 2, 2}},
      {{5, 5}, {4, 4, 2}, {3, 4, 3}, {2, 4, 4}, {3, 3, 2, 2}, {2, 3, 3, 2}, {2, 2, 3, 3}, {2, 2, 2, 2, 2}},
      {{6, 6},
       {2, 5, 5},
       {3, 5, 4},
       {4, 5, 3},
       {5, 5, 2},
       {2, 2, 4, 4},
       {2, 3, 4, 3},
       {3, 3, 3, 3},
       {2, 4, 4, 2},
       {3, 4, 3, 2},
       {4, 4, 2, 2},
       {2, 2, 2, 3, 3},
       {2, 2, 3, 3, 2},
       {2, 3, 3, 2, 2},
       {3, 3, 2, 2, 2},
       {2, 2, 2, 2, 2, 2}},
  };
  std::vector<MultiIndex> out;
  for (int order = 0; order < max_order; ++order)
    for (const auto& idx : by_order[order])
      if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  return out;
}

EsumTable esum_table(const KernelCache& kernels, const std::vector<MultiIndex>& indices) {
  EsumTable table;
  for (const auto& idx : indices) table.emplace(idx, esum(kernels, idx));
  return table;
}

void write_esum_csv(std::ostream& out, const std::string& config_id, const std::vector<MultiIndexSum>& rows,
                    bool header) {
  if (header) out << "config_id,index,re,im\n";
  for (const auto& r : rows)
    out << config_id << ',' << r.index.str() << ',' << io::format_double(r.value.real()) << ','
        << io::format_double(r.value.imag()) << '\n';
}

}  // namespace gms
