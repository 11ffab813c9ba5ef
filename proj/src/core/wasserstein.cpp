#include "core/wasserstein.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mcr {

namespace detail {
thread_local uint64_t w1_merge_steps = 0;
}

namespace {

#ifndef NDEBUG
bool is_ascending(std::span<const double> v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}
#endif

// Sweeps the merged breakpoints of the two quantile functions. `b_at(j)` must
// yield the j-th smallest value of the second multiset. Breakpoints are kept
// as exact integers on the grid of 1/(na*nb), so segment widths carry no
// rounding and mirror-symmetric instances evaluate bit-identically (the
// argmin tie rule relies on that).
template <class BAt>
double w1_merge(std::span<const double> a, size_t nb, BAt b_at) {
  const size_t na = a.size();
  double cost = 0.0;
  uint64_t u = 0;
  size_t i = 0, j = 0;
  while (i < na && j < nb) {
    ++detail::w1_merge_steps;
    const uint64_t ua = static_cast<uint64_t>(i + 1) * nb;
    const uint64_t ub = static_cast<uint64_t>(j + 1) * na;
    const uint64_t next = ua < ub ? ua : ub;
    cost += static_cast<double>(next - u) * std::abs(a[i] - b_at(j));
    u = next;
    if (ua <= ub) ++i;
    if (ub <= ua) ++j;
  }
  return cost / (static_cast<double>(na) * static_cast<double>(nb));
}

}  // namespace

double aggregate(std::span<const double> w, Norm norm) {
  switch (norm) {
    case Norm::L1: {
      double s = 0.0;
      for (double v : w) s += v;
      return s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (double v : w) s += v * v;
      return std::sqrt(s);
    }
    case Norm::LInf: {
      double s = 0.0;
      for (double v : w) s = std::max(s, v);
      return s;
    }
  }
  return 0.0;
}

double Objective::operator()(std::span<const double> w) const {
  if (!scale.empty() && scale.size() != w.size())
    throw std::invalid_argument("objective: scale dimension mismatch");
  if (scale.empty()) return aggregate(w, norm);
  switch (norm) {
    case Norm::L1: {
      double s = 0.0;
      for (size_t j = 0; j < w.size(); ++j) s += w[j] / scale[j];
      return s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (size_t j = 0; j < w.size(); ++j) {
        const double v = w[j] / scale[j];
        s += v * v;
      }
      return std::sqrt(s);
    }
    case Norm::LInf: {
      double s = 0.0;
      for (size_t j = 0; j < w.size(); ++j) s = std::max(s, w[j] / scale[j]);
      return s;
    }
  }
  return 0.0;
}

double w1_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("w1_sorted: empty input");
  assert(is_ascending(a) && "w1_sorted: first input not ascending");
  assert(is_ascending(b) && "w1_sorted: second input not ascending");
  return w1_merge(a, b.size(), [&](size_t j) { return b[j]; });
}

WassersteinVector wass_vector(const SamplePool& pool, const SelectionState& state) {
  if (state.picked_count() == 0)
    throw std::invalid_argument("wass_vector: picked set is empty");
  WassersteinVector out;
  out.w.resize(pool.dims());
  for (size_t j = 0; j < pool.dims(); ++j) {
    out.w[j] = w1_sorted(pool.sorted(j), state.picked_sorted(j));
    out.manhattan += out.w[j];
  }
  return out;
}

double eval_candidate(const SamplePool& pool, const SelectionState& state,
                      uint32_t candidate, const Objective& objective) {
  if (candidate >= pool.size())
    throw std::invalid_argument("eval_candidate: index out of range");
  if (state.is_picked(candidate))
    throw std::invalid_argument("eval_candidate: sample " + std::to_string(candidate) +
                                " already picked");
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  for (size_t j = 0; j < pool.dims(); ++j) {
    const auto b = state.picked_sorted(j);
    const double x = pool.at(candidate, j);
    // Virtual insertion of x into b: no copy, position by binary search.
    const size_t pos = std::lower_bound(b.begin(), b.end(), x) - b.begin();
    const double wj = w1_merge(pool.sorted(j), b.size() + 1, [&](size_t k) {
      return k < pos ? b[k] : (k == pos ? x : b[k - 1]);
    });
    const double v = objective.apply(wj, j);
    l1 += v;
    l2 += v * v;
    linf = std::max(linf, v);
  }
  switch (objective.norm) {
    case Norm::L1: return l1;
    case Norm::L2: return std::sqrt(l2);
    case Norm::LInf: return linf;
  }
  return l1;
}

double eval_batch(const SamplePool& pool, const SelectionState& state,
                  std::span<const uint32_t> batch, EvalScratch& scratch,
                  const Objective& objective) {
  if (batch.empty()) throw std::invalid_argument("eval_batch: empty batch");
  for (uint32_t i : batch) {
    if (i >= pool.size()) throw std::invalid_argument("eval_batch: index out of range");
    if (state.is_picked(i))
      throw std::invalid_argument("eval_batch: sample " + std::to_string(i) +
                                  " already picked");
  }
  if (batch.size() > 1) {
    auto& seen = scratch.merged;  // reuse as a sorted duplicate check
    seen.assign(batch.begin(), batch.end());
    std::sort(seen.begin(), seen.end());
    for (size_t i = 1; i < seen.size(); ++i)
      if (seen[i] == seen[i - 1])
        throw std::invalid_argument("eval_batch: duplicate index in batch");
  }

  double l1 = 0.0, l2 = 0.0, linf = 0.0;
  for (size_t j = 0; j < pool.dims(); ++j) {
    auto& bv = scratch.batch_values;
    bv.clear();
    for (uint32_t i : batch) bv.push_back(pool.at(i, j));
    std::sort(bv.begin(), bv.end());
    const auto picked = state.picked_sorted(j);
    auto& merged = scratch.merged;
    merged.resize(picked.size() + bv.size());
    std::merge(picked.begin(), picked.end(), bv.begin(), bv.end(), merged.begin());
    const double wj = w1_sorted(pool.sorted(j), merged);
    const double v = objective.apply(wj, j);
    l1 += v;
    l2 += v * v;
    linf = std::max(linf, v);
  }
  switch (objective.norm) {
    case Norm::L1: return l1;
    case Norm::L2: return std::sqrt(l2);
    case Norm::LInf: return linf;
  }
  return l1;
}

double prefix_manhattan(const SamplePool& pool, std::span<const uint32_t> order,
                        size_t m, std::vector<double>* w_out) {
  if (m == 0 || m > order.size())
    throw std::invalid_argument("prefix_manhattan: m out of range");
  double total = 0.0;
  if (w_out) w_out->assign(pool.dims(), 0.0);
  std::vector<double> prefix(m);
  for (size_t j = 0; j < pool.dims(); ++j) {
    for (size_t i = 0; i < m; ++i) prefix[i] = pool.at(order[i], j);
    std::sort(prefix.begin(), prefix.end());
    const double wj = w1_sorted(pool.sorted(j), prefix);
    if (w_out) (*w_out)[j] = wj;
    total += wj;
  }
  return total;
}

}  // namespace mcr
