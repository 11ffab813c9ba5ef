#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/report.hpp"
#include "core/rng.hpp"
#include "core/sample_pool.hpp"
#include "core/wasserstein.hpp"

namespace mcr {

struct TraceEvent {
  uint32_t iter = 0;
  std::vector<uint32_t> picked;  // 1 index for greedy/random, up to b for batch
  std::vector<double> w;         // per-dimension W1 after the pick
  double manhattan = 0.0;
  uint64_t cumulative = 0;  // |P| after the pick
  double elapsed_ms = 0.0;
};

/// Full record of one reordering run. Events cover every sample exactly once;
/// the last event always has manhattan == 0 (P == S).
struct SelectionTrace {
  std::string policy;  // "greedy" | "batch" | "random"
  size_t n = 0;
  size_t dims = 0;
  size_t batch_size = 0;  // batch policy only
  size_t num_draws = 0;   // batch policy only (k)
  bool exhaustive = false;
  uint64_t seed = 0;
  uint32_t replicate = 0;
  uint64_t eval_count = 0;  // candidate/batch evaluations performed
  uint64_t pool_fingerprint = 0;
  std::string rng_name;
  std::vector<TraceEvent> events;

  std::vector<uint32_t> order() const;  // flattened pick order, length n
  double total_elapsed_ms() const;
};

struct PolicyOptions {
  Objective objective;
  int threads = 1;
};

struct BatchConfig {
  size_t batch_size = 1;  // b
  size_t num_draws = 1;   // k, candidate batches per iteration
  uint64_t seed = 0;
  // Enumerate every remaining sample as its own candidate batch instead of
  // drawing randomly; only valid for batch_size == 1 (reduces to greedy).
  bool exhaustive = false;
};

// Algorithm: repeatedly pick the remaining sample minimizing the objective of
// Wass(S, P + s_i). Ties break to the smallest original index. The last
// remaining sample is appended without evaluation, so eval_count is exactly
// n(n+1)/2 - 1.
SelectionTrace greedy_reorder(const SamplePool& pool, const PolicyOptions& opts = {});

// Batch variant: each iteration draws k uniform without-replacement size-b
// subsets of R (fresh child stream per (seed, replicate, iteration)) and picks
// the batch minimizing Wass(S, P + b_i); ties break to the first-drawn batch.
// When |R| <= b the remainder is appended without evaluation.
SelectionTrace batch_reorder(const SamplePool& pool, const BatchConfig& cfg,
                             uint32_t replicate = 0, const PolicyOptions& opts = {});

// Uniform random permutation (Fisher-Yates over child stream (seed, replicate, 0)).
SelectionTrace random_reorder(const SamplePool& pool, uint64_t seed,
                              uint32_t replicate = 0);

void write_trace_jsonl(const SelectionTrace& trace, const std::string& path,
                       bool with_timings);
SelectionTrace read_trace_jsonl(const std::string& path);

/// Which policy a harness run should execute.
struct PolicySpec {
  std::string policy = "greedy";  // "greedy" | "batch" | "random"
  BatchConfig batch;
  uint64_t seed = 0;  // random policy seed (batch carries its own)
  Objective objective;
};

// Runs the policy once per replicate (child-seeded), samples ||W||_1 at the
// checkpoints, and aggregates mean/band. Greedy is deterministic, so it runs
// once and the curve is replicated. Replicates execute in parallel when
// threads > 1; the result is independent of the thread count.
PolicyCurve replicate_harness(const SamplePool& pool, const PolicySpec& spec,
                              size_t replicates, std::span<const size_t> checkpoints,
                              int threads = 1);

void validate_checkpoints(std::span<const size_t> checkpoints, size_t n);

}  // namespace mcr
