#include "core/selection.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace mcr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

TraceEvent make_event(uint32_t iter, std::vector<uint32_t> picked,
                      const SamplePool& pool, const SelectionState& state,
                      Clock::time_point t0) {
  TraceEvent ev;
  ev.iter = iter;
  ev.picked = std::move(picked);
  auto wv = wass_vector(pool, state);
  ev.w = std::move(wv.w);
  ev.manhattan = wv.manhattan;
  ev.cumulative = state.picked_count();
  ev.elapsed_ms = ms_since(t0);
  return ev;
}

}  // namespace

std::vector<uint32_t> SelectionTrace::order() const {
  std::vector<uint32_t> out;
  out.reserve(n);
  for (const auto& ev : events) out.insert(out.end(), ev.picked.begin(), ev.picked.end());
  return out;
}

double SelectionTrace::total_elapsed_ms() const {
  double t = 0.0;
  for (const auto& ev : events) t += ev.elapsed_ms;
  return t;
}

SelectionTrace greedy_reorder(const SamplePool& pool, const PolicyOptions& opts) {
  SelectionTrace tr;
  tr.policy = "greedy";
  tr.n = pool.size();
  tr.dims = pool.dims();
  tr.pool_fingerprint = pool.fingerprint();
  tr.rng_name = std::string(RandomStream::algorithm_name);

  SelectionState state(pool);
  std::vector<double> values;
  for (uint32_t iter = 0; state.picked_count() < pool.size(); ++iter) {
    const auto t0 = Clock::now();
    const auto rem = state.remaining();
    uint32_t chosen;
    if (rem.size() == 1) {
      chosen = rem[0];  // last sample needs no evaluation
    } else {
      values.assign(rem.size(), 0.0);
      parallel_for(rem.size(), opts.threads, [&](size_t i) {
        values[i] = eval_candidate(pool, state, rem[i], opts.objective);
      });
      tr.eval_count += rem.size();
      size_t best = 0;
      for (size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best]) best = i;  // ties keep the smallest index
      chosen = rem[best];
    }
    state.pick(chosen);
    tr.events.push_back(make_event(iter, {chosen}, pool, state, t0));
  }
  return tr;
}

SelectionTrace batch_reorder(const SamplePool& pool, const BatchConfig& cfg,
                             uint32_t replicate, const PolicyOptions& opts) {
  const size_t n = pool.size();
  if (cfg.batch_size < 1 || cfg.batch_size > n)
    throw std::invalid_argument("batch_reorder: requires 1 <= b <= n");
  if (cfg.num_draws < 1) throw std::invalid_argument("batch_reorder: requires k >= 1");
  if (cfg.exhaustive && cfg.batch_size != 1)
    throw std::invalid_argument("batch_reorder: exhaustive draws require b == 1");

  SelectionTrace tr;
  tr.policy = "batch";
  tr.n = n;
  tr.dims = pool.dims();
  tr.batch_size = cfg.batch_size;
  tr.num_draws = cfg.num_draws;
  tr.exhaustive = cfg.exhaustive;
  tr.seed = cfg.seed;
  tr.replicate = replicate;
  tr.pool_fingerprint = pool.fingerprint();
  tr.rng_name = std::string(RandomStream::algorithm_name);

  const RandomStream root(cfg.seed);
  SelectionState state(pool);
  std::vector<std::vector<uint32_t>> batches;
  std::vector<double> values;
  std::vector<uint32_t> scratch_idx;

  for (uint32_t iter = 0; state.picked_count() < n; ++iter) {
    const auto t0 = Clock::now();
    const auto rem = state.remaining();
    if (rem.size() <= cfg.batch_size) {
      // Remainder appended as one final batch, no evaluation needed.
      std::vector<uint32_t> final_batch(rem.begin(), rem.end());
      for (uint32_t i : final_batch) state.pick(i);
      tr.events.push_back(make_event(iter, std::move(final_batch), pool, state, t0));
      break;
    }

    batches.clear();
    if (cfg.exhaustive) {
      for (uint32_t i : rem) batches.push_back({i});
    } else {
      // All k batches drawn up front from the (seed, replicate, iter) stream,
      // so evaluation order/parallelism cannot perturb the run.
      RandomStream stream = root.child(replicate, iter);
      batches.reserve(cfg.num_draws);
      for (size_t k = 0; k < cfg.num_draws; ++k) {
        scratch_idx.assign(rem.begin(), rem.end());
        std::vector<uint32_t> batch(cfg.batch_size);
        for (size_t i = 0; i < cfg.batch_size; ++i) {
          const size_t pick = i + stream.next_below(scratch_idx.size() - i);
          std::swap(scratch_idx[i], scratch_idx[pick]);
          batch[i] = scratch_idx[i];
        }
        std::sort(batch.begin(), batch.end());
        batches.push_back(std::move(batch));
      }
    }

    values.assign(batches.size(), 0.0);
    parallel_for(batches.size(), opts.threads, [&](size_t i) {
      thread_local EvalScratch scratch;
      values[i] = eval_batch(pool, state, batches[i], scratch, opts.objective);
    });
    tr.eval_count += batches.size();

    size_t best = 0;
    for (size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[best]) best = i;  // ties keep the first-drawn batch
    for (uint32_t i : batches[best]) state.pick(i);
    tr.events.push_back(make_event(iter, std::move(batches[best]), pool, state, t0));
  }
  return tr;
}

SelectionTrace random_reorder(const SamplePool& pool, uint64_t seed, uint32_t replicate) {
  SelectionTrace tr;
  tr.policy = "random";
  tr.n = pool.size();
  tr.dims = pool.dims();
  tr.seed = seed;
  tr.replicate = replicate;
  tr.pool_fingerprint = pool.fingerprint();
  tr.rng_name = std::string(RandomStream::algorithm_name);

  std::vector<uint32_t> perm(pool.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<uint32_t>(i);
  RandomStream stream = RandomStream(seed).child(replicate, 0);
  for (size_t i = perm.size(); i > 1; --i) {
    const size_t j = stream.next_below(i);
    std::swap(perm[i - 1], perm[j]);
  }

  SelectionState state(pool);
  for (uint32_t iter = 0; iter < perm.size(); ++iter) {
    const auto t0 = Clock::now();
    state.pick(perm[iter]);
    tr.events.push_back(make_event(iter, {perm[iter]}, pool, state, t0));
  }
  return tr;
}

void validate_checkpoints(std::span<const size_t> checkpoints, size_t n) {
  if (checkpoints.empty()) throw std::invalid_argument("checkpoints: empty list");
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n)
      throw std::invalid_argument("checkpoints: value " + std::to_string(checkpoints[i]) +
                                  " outside [1, " + std::to_string(n) + "]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("checkpoints: must be strictly increasing");
  }
}

PolicyCurve replicate_harness(const SamplePool& pool, const PolicySpec& spec,
                              size_t replicates, std::span<const size_t> checkpoints,
                              int threads) {
  if (replicates < 1) throw std::invalid_argument("replicate_harness: requires R >= 1");
  validate_checkpoints(checkpoints, pool.size());

  PolicyCurve curve;
  curve.policy = spec.policy;
  curve.batch_size = spec.policy == "batch" ? spec.batch.batch_size : 0;
  curve.replicate_curves.resize(replicates);

  // When replicates run in parallel, each policy run stays single-threaded;
  // a single replicate gets the full thread budget.
  const bool parallel_reps = replicates > 1;
  const int inner_threads = parallel_reps ? 1 : threads;

  std::vector<double> wall(replicates, 0.0);
  auto run_one = [&](uint32_t rep) {
    SelectionTrace tr;
    if (spec.policy == "greedy") {
      PolicyOptions o{spec.objective, inner_threads};
      tr = greedy_reorder(pool, o);
    } else if (spec.policy == "batch") {
      PolicyOptions o{spec.objective, inner_threads};
      tr = batch_reorder(pool, spec.batch, rep, o);
    } else if (spec.policy == "random") {
      tr = random_reorder(pool, spec.seed, rep);
    } else {
      throw std::invalid_argument("replicate_harness: unknown policy '" + spec.policy + "'");
    }
    const auto order = tr.order();
    std::vector<double> row(checkpoints.size());
    for (size_t c = 0; c < checkpoints.size(); ++c)
      row[c] = prefix_manhattan(pool, order, checkpoints[c]);
    wall[rep] = tr.total_elapsed_ms();
    curve.replicate_curves[rep] = std::move(row);
  };

  if (spec.policy == "greedy") {
    run_one(0);  // deterministic: every replicate would repeat the same order
    for (size_t r = 1; r < replicates; ++r) {
      curve.replicate_curves[r] = curve.replicate_curves[0];
      wall[r] = wall[0];
    }
  } else {
    parallel_for(replicates, parallel_reps ? threads : 1,
                 [&](size_t r) { run_one(static_cast<uint32_t>(r)); });
  }
  for (double w : wall) curve.total_wall_ms += w;
  curve.finalize();
  return curve;
}

namespace {

nlohmann::ordered_json trace_meta_json(const SelectionTrace& tr) {
  nlohmann::ordered_json m;
  m["tool"] = "mcreorder";
  m["policy"] = tr.policy;
  m["n"] = tr.n;
  m["d"] = tr.dims;
  if (tr.policy == "batch") {
    m["b"] = tr.batch_size;
    m["k"] = tr.num_draws;
    m["exhaustive"] = tr.exhaustive;
  }
  if (tr.policy != "greedy") {
    m["seed"] = tr.seed;
    m["replicate"] = tr.replicate;
  }
  m["rng"] = tr.rng_name;
  m["eval_count"] = tr.eval_count;
  m["pool_fingerprint"] = to_hex(tr.pool_fingerprint);
  return m;
}

}  // namespace

void write_trace_jsonl(const SelectionTrace& trace, const std::string& path,
                       bool with_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace: " + path);
  nlohmann::ordered_json head;
  head["meta"] = trace_meta_json(trace);
  out << head.dump() << '\n';
  for (const auto& ev : trace.events) {
    nlohmann::ordered_json j;
    j["iter"] = ev.iter;
    j["picked"] = ev.picked;
    j["w"] = ev.w;
    j["manhattan"] = ev.manhattan;
    j["elapsed_ms"] = with_timings ? ev.elapsed_ms : 0.0;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

SelectionTrace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty trace file");
  SelectionTrace tr;
  try {
    const auto head = nlohmann::json::parse(line);
    const auto& m = head.at("meta");
    tr.policy = m.at("policy").get<std::string>();
    tr.n = m.at("n").get<size_t>();
    tr.dims = m.at("d").get<size_t>();
    tr.batch_size = m.value("b", size_t{0});
    tr.num_draws = m.value("k", size_t{0});
    tr.exhaustive = m.value("exhaustive", false);
    tr.seed = m.value("seed", uint64_t{0});
    tr.replicate = m.value("replicate", uint32_t{0});
    tr.eval_count = m.value("eval_count", uint64_t{0});
    tr.rng_name = m.value("rng", std::string{});
    tr.pool_fingerprint = std::stoull(m.at("pool_fingerprint").get<std::string>(), nullptr, 16);
    size_t total = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      TraceEvent ev;
      ev.iter = j.at("iter").get<uint32_t>();
      ev.picked = j.at("picked").get<std::vector<uint32_t>>();
      ev.w = j.at("w").get<std::vector<double>>();
      ev.manhattan = j.at("manhattan").get<double>();
      ev.elapsed_ms = j.value("elapsed_ms", 0.0);
      total += ev.picked.size();
      ev.cumulative = total;
      tr.events.push_back(std::move(ev));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad trace JSONL: " + e.what());
  }
  // The flattened picks must be a permutation of {0..n-1}.
  auto order = tr.order();
  if (order.size() != tr.n) throw IoError(path + ": trace does not cover the pool");
  std::vector<uint8_t> seen(tr.n, 0);
  for (uint32_t i : order) {
    if (i >= tr.n || seen[i]) throw IoError(path + ": trace is not a permutation");
    seen[i] = 1;
  }
  return tr;
}

}  // namespace mcr
