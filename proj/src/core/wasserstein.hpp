#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/sample_pool.hpp"

namespace mcr {

/// Per-dimension W1 distances between two empirical distributions and their
/// Manhattan sum ||W||_1.
struct WassersteinVector {
  std::vector<double> w;
  double manhattan = 0.0;
};

enum class Norm { L1, L2, LInf };

double aggregate(std::span<const double> w, Norm norm);

/// Selection objective: norm over optionally per-dimension scaled distances.
/// The default (L1, no scaling) is the paper's Manhattan aggregation; the norm
/// and scale are pluggable so alternatives can be compared.
struct Objective {
  Norm norm = Norm::L1;
  std::vector<double> scale;  // per-dimension divisor; empty = unscaled

  double operator()(std::span<const double> w) const;
  double apply(double wj, size_t j) const {
    return scale.empty() ? wj : wj / scale[j];
  }
};

// Exact W1 between the uniform-weight empirical measures of two non-empty
// ascending multisets (quantile-function integral via a linear merge of the
// breakpoints {i/m} and {j/n}). O(m+n), symmetric, handles m != n natively.
double w1_sorted(std::span<const double> a, std::span<const double> b);

// W vector between the full pool and the picked set; requires |picked| >= 1.
WassersteinVector wass_vector(const SamplePool& pool, const SelectionState& state);

// Reusable buffers for batch evaluation; one per worker thread.
struct EvalScratch {
  std::vector<double> batch_values;
  std::vector<double> merged;
};

// Objective value of the state with `candidate` hypothetically inserted.
// State unchanged; no allocation; O(d*(n + log n)) per call.
double eval_candidate(const SamplePool& pool, const SelectionState& state,
                      uint32_t candidate, const Objective& objective = {});

// Objective value of the state with the whole batch hypothetically inserted.
// Batch must be non-empty, duplicate-free and disjoint from the picked set.
double eval_batch(const SamplePool& pool, const SelectionState& state,
                  std::span<const uint32_t> batch, EvalScratch& scratch,
                  const Objective& objective = {});

// ||W||_1 between the first m entries of `order` and the full pool. Used for
// checkpoint sampling; recomputes from scratch (exact for any m).
double prefix_manhattan(const SamplePool& pool, std::span<const uint32_t> order,
                        size_t m, std::vector<double>* w_out = nullptr);

namespace detail {
// Probe for the complexity guard in tests: merge-loop iterations executed by
// w1 evaluations on this thread.
extern thread_local uint64_t w1_merge_steps;
}  // namespace detail

}  // namespace mcr
