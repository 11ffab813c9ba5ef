#include "mcreorder.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/evaluation.hpp"
#include "core/parallel.hpp"
#include "core/priors.hpp"
#include "core/report.hpp"
#include "core/rng.hpp"
#include "core/sample_pool.hpp"
#include "core/selection.hpp"
#include "core/wasserstein.hpp"

struct mcr_pool {
  mcr::SamplePool impl;
};
struct mcr_trace {
  mcr::SelectionTrace impl;
  std::vector<uint32_t> order;  // cached flattened pick order
};
struct mcr_outputs {
  mcr::OutputTable impl;
};
struct mcr_report {
  mcr::ConvergenceReport impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps core exceptions onto the stable status codes.
template <class Fn>
mcr_status guarded(Fn&& fn) {
  try {
    fn();
    return MCR_OK;
  } catch (const mcr::BlowupError& e) {
    set_error(e.what());
    return MCR_ERR_SIMULATION;
  } catch (const mcr::ConsistencyError& e) {
    set_error(e.what());
    return MCR_ERR_CONSISTENCY;
  } catch (const mcr::IoError& e) {
    set_error(e.what());
    return MCR_ERR_IO;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return MCR_ERR_INVALID;
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return MCR_ERR_INVALID;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return MCR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return MCR_ERR_INTERNAL;
  }
}

mcr_status require(bool cond, const char* msg) {
  if (cond) return MCR_OK;
  set_error(msg);
  return MCR_ERR_INVALID;
}

mcr::Objective to_objective(const mcr_objective* o, size_t dims) {
  mcr::Objective obj;
  if (!o) return obj;
  switch (o->norm) {
    case 0: obj.norm = mcr::Norm::L1; break;
    case 1: obj.norm = mcr::Norm::L2; break;
    case 2: obj.norm = mcr::Norm::LInf; break;
    default: throw std::invalid_argument("objective: norm must be 0, 1 or 2");
  }
  if (o->scale) obj.scale.assign(o->scale, o->scale + dims);
  return obj;
}

std::string default_priors_string() {
  return mcr::priors_to_json(mcr::default_demo_priors()).dump();
}

mcr::PolicySpec policy_spec_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("policy"))
    throw std::invalid_argument("policy spec: expected {\"policy\": ...}");
  mcr::PolicySpec spec;
  spec.policy = j.at("policy").get<std::string>();
  if (spec.policy != "greedy" && spec.policy != "batch" && spec.policy != "random")
    throw std::invalid_argument("policy spec: unknown policy '" + spec.policy + "'");
  spec.seed = j.value("seed", uint64_t{0});
  if (spec.policy == "batch") {
    if (!j.contains("b") || !j.contains("k"))
      throw std::invalid_argument("policy spec: batch policy requires b and k");
    spec.batch.batch_size = j.at("b").get<size_t>();
    spec.batch.num_draws = j.at("k").get<size_t>();
    spec.batch.seed = spec.seed;
    spec.batch.exhaustive = j.value("exhaustive", false);
  }
  if (j.contains("norm")) {
    const auto s = j.at("norm").get<std::string>();
    if (s == "l1") spec.objective.norm = mcr::Norm::L1;
    else if (s == "l2") spec.objective.norm = mcr::Norm::L2;
    else if (s == "linf") spec.objective.norm = mcr::Norm::LInf;
    else throw std::invalid_argument("policy spec: unknown norm '" + s + "'");
  }
  if (j.contains("scale")) spec.objective.scale = j.at("scale").get<std::vector<double>>();
  return spec;
}

void check_trace_pool(const mcr::SelectionTrace& tr, uint64_t fingerprint,
                      size_t n) {
  if (tr.n != n)
    throw mcr::ConsistencyError("trace covers " + std::to_string(tr.n) +
                                " samples, pool has " + std::to_string(n));
  if (tr.pool_fingerprint != fingerprint)
    throw mcr::ConsistencyError("trace pool fingerprint " + mcr::to_hex(tr.pool_fingerprint) +
                                " does not match " + mcr::to_hex(fingerprint));
}

}  // namespace

extern "C" {

const char* mcr_version(void) { return "0.1.0"; }

const char* mcr_rng_name(void) {
  static const std::string name(mcr::RandomStream::algorithm_name);
  return name.c_str();
}

const char* mcr_last_error(void) { return g_last_error.c_str(); }

/* ---- pools ---- */

mcr_status mcr_pool_create(const double* data, size_t n, size_t d, mcr_pool** out) {
  if (auto st = require(data && out, "mcr_pool_create: null argument")) return st;
  return guarded([&] {
    std::vector<double> copy(data, data + n * d);
    *out = new mcr_pool{mcr::SamplePool(std::move(copy), n, d)};
  });
}

mcr_status mcr_pool_generate(const char* priors_json, size_t n, uint64_t seed,
                             mcr_pool** out) {
  if (auto st = require(out != nullptr, "mcr_pool_generate: null output")) return st;
  return guarded([&] {
    const std::string text =
        priors_json && *priors_json ? priors_json : default_priors_string();
    const auto priors = mcr::priors_from_json(nlohmann::json::parse(text));
    *out = new mcr_pool{mcr::generate_pool(priors, n, seed)};
  });
}

mcr_status mcr_pool_read_csv(const char* path, mcr_pool** out) {
  if (auto st = require(path && out, "mcr_pool_read_csv: null argument")) return st;
  return guarded([&] { *out = new mcr_pool{mcr::read_pool_csv(path)}; });
}

mcr_status mcr_pool_write_csv(const mcr_pool* pool, const char* path) {
  if (auto st = require(pool && path, "mcr_pool_write_csv: null argument")) return st;
  return guarded([&] { mcr::write_pool_csv(pool->impl, path); });
}

void mcr_pool_free(mcr_pool* pool) { delete pool; }

size_t mcr_pool_size(const mcr_pool* pool) { return pool ? pool->impl.size() : 0; }
size_t mcr_pool_dims(const mcr_pool* pool) { return pool ? pool->impl.dims() : 0; }

mcr_status mcr_pool_value(const mcr_pool* pool, size_t row, size_t col, double* out) {
  if (auto st = require(pool && out, "mcr_pool_value: null argument")) return st;
  if (auto st = require(row < pool->impl.size() && col < pool->impl.dims(),
                        "mcr_pool_value: index out of range"))
    return st;
  *out = pool->impl.at(row, col);
  return MCR_OK;
}

uint64_t mcr_pool_fingerprint(const mcr_pool* pool) {
  return pool ? pool->impl.fingerprint() : 0;
}

mcr_status mcr_pool_column_stddev(const mcr_pool* pool, size_t col, double* out) {
  if (auto st = require(pool && out, "mcr_pool_column_stddev: null argument")) return st;
  if (auto st = require(col < pool->impl.dims(), "mcr_pool_column_stddev: column out of range"))
    return st;
  *out = pool->impl.column_stddev(col);
  return MCR_OK;
}

const char* mcr_default_priors_json(void) {
  static const std::string text = default_priors_string();
  return text.c_str();
}

mcr_status mcr_validate_priors_json(const char* priors_json) {
  if (auto st = require(priors_json != nullptr, "mcr_validate_priors_json: null argument"))
    return st;
  return guarded([&] { mcr::priors_from_json(nlohmann::json::parse(priors_json)); });
}

mcr_status mcr_validate_model_json(const char* model_json) {
  if (auto st = require(model_json != nullptr, "mcr_validate_model_json: null argument"))
    return st;
  return guarded([&] { mcr::model_from_json(nlohmann::json::parse(model_json), 4); });
}

/* ---- metric ---- */

mcr_status mcr_w1_sorted(const double* a, size_t m, const double* b, size_t n,
                         double* out) {
  if (auto st = require(a && b && out, "mcr_w1_sorted: null argument")) return st;
  return guarded([&] { *out = mcr::w1_sorted({a, m}, {b, n}); });
}

mcr_status mcr_prefix_distance(const mcr_pool* pool, const uint32_t* order,
                               size_t order_len, size_t m, double* w_out,
                               double* manhattan_out) {
  if (auto st = require(pool && order && manhattan_out, "mcr_prefix_distance: null argument"))
    return st;
  return guarded([&] {
    std::vector<double> w;
    const double l1 =
        mcr::prefix_manhattan(pool->impl, {order, order_len}, m, w_out ? &w : nullptr);
    if (w_out) std::memcpy(w_out, w.data(), w.size() * sizeof(double));
    *manhattan_out = l1;
  });
}

/* ---- policies ---- */

mcr_status mcr_reorder_greedy(const mcr_pool* pool, const mcr_objective* objective,
                              int threads, mcr_trace** out) {
  if (auto st = require(pool && out, "mcr_reorder_greedy: null argument")) return st;
  return guarded([&] {
    mcr::PolicyOptions opts{to_objective(objective, pool->impl.dims()), threads};
    auto tr = mcr::greedy_reorder(pool->impl, opts);
    auto order = tr.order();
    *out = new mcr_trace{std::move(tr), std::move(order)};
  });
}

mcr_status mcr_reorder_batch(const mcr_pool* pool, size_t b, size_t k, uint64_t seed,
                             uint32_t replicate, int exhaustive,
                             const mcr_objective* objective, int threads,
                             mcr_trace** out) {
  if (auto st = require(pool && out, "mcr_reorder_batch: null argument")) return st;
  return guarded([&] {
    mcr::BatchConfig cfg{b, k, seed, exhaustive != 0};
    mcr::PolicyOptions opts{to_objective(objective, pool->impl.dims()), threads};
    auto tr = mcr::batch_reorder(pool->impl, cfg, replicate, opts);
    auto order = tr.order();
    *out = new mcr_trace{std::move(tr), std::move(order)};
  });
}

mcr_status mcr_reorder_random(const mcr_pool* pool, uint64_t seed, uint32_t replicate,
                              mcr_trace** out) {
  if (auto st = require(pool && out, "mcr_reorder_random: null argument")) return st;
  return guarded([&] {
    auto tr = mcr::random_reorder(pool->impl, seed, replicate);
    auto order = tr.order();
    *out = new mcr_trace{std::move(tr), std::move(order)};
  });
}

void mcr_trace_free(mcr_trace* trace) { delete trace; }

size_t mcr_trace_length(const mcr_trace* trace) { return trace ? trace->impl.n : 0; }
size_t mcr_trace_event_count(const mcr_trace* trace) {
  return trace ? trace->impl.events.size() : 0;
}
uint64_t mcr_trace_eval_count(const mcr_trace* trace) {
  return trace ? trace->impl.eval_count : 0;
}
const char* mcr_trace_policy(const mcr_trace* trace) {
  return trace ? trace->impl.policy.c_str() : "";
}
size_t mcr_trace_batch_size(const mcr_trace* trace) {
  return trace ? trace->impl.batch_size : 0;
}
uint64_t mcr_trace_pool_fingerprint(const mcr_trace* trace) {
  return trace ? trace->impl.pool_fingerprint : 0;
}

mcr_status mcr_trace_order(const mcr_trace* trace, uint32_t* out) {
  if (auto st = require(trace && out, "mcr_trace_order: null argument")) return st;
  std::memcpy(out, trace->order.data(), trace->order.size() * sizeof(uint32_t));
  return MCR_OK;
}

mcr_status mcr_trace_write_jsonl(const mcr_trace* trace, const char* path,
                                 int with_timings) {
  if (auto st = require(trace && path, "mcr_trace_write_jsonl: null argument")) return st;
  return guarded([&] { mcr::write_trace_jsonl(trace->impl, path, with_timings != 0); });
}

mcr_status mcr_trace_read_jsonl(const char* path, mcr_trace** out) {
  if (auto st = require(path && out, "mcr_trace_read_jsonl: null argument")) return st;
  return guarded([&] {
    auto tr = mcr::read_trace_jsonl(path);
    auto order = tr.order();
    *out = new mcr_trace{std::move(tr), std::move(order)};
  });
}

/* ---- propagation ---- */

mcr_status mcr_propagate(const mcr_pool* pool, const mcr_trace* order,
                         const char* model_json, size_t budget,
                         const mcr_outputs* resume, int threads, mcr_outputs** out) {
  if (auto st = require(pool && model_json && out, "mcr_propagate: null argument"))
    return st;
  return guarded([&] {
    std::vector<uint32_t> natural;
    std::span<const uint32_t> order_span;
    if (order) {
      check_trace_pool(order->impl, pool->impl.fingerprint(), pool->impl.size());
      order_span = order->order;
    } else {
      natural.resize(pool->impl.size());
      for (size_t i = 0; i < natural.size(); ++i) natural[i] = static_cast<uint32_t>(i);
      order_span = natural;
    }
    const auto model =
        mcr::model_from_json(nlohmann::json::parse(model_json), pool->impl.dims());
    *out = new mcr_outputs{mcr::propagate(pool->impl, order_span, model, budget,
                                          resume ? &resume->impl : nullptr, threads)};
  });
}

void mcr_outputs_free(mcr_outputs* outputs) { delete outputs; }

size_t mcr_outputs_rows(const mcr_outputs* o) { return o ? o->impl.n : 0; }
size_t mcr_outputs_cols(const mcr_outputs* o) { return o ? o->impl.q : 0; }
size_t mcr_outputs_evaluated(const mcr_outputs* o) { return o ? o->impl.evaluated() : 0; }
size_t mcr_outputs_failed(const mcr_outputs* o) { return o ? o->impl.failed() : 0; }

int mcr_outputs_status(const mcr_outputs* o, size_t row) {
  if (!o || row >= o->impl.n) return 0;
  return static_cast<int>(o->impl.status[row]);
}

const char* mcr_outputs_flags(const mcr_outputs* o, size_t row) {
  if (!o || row >= o->impl.n) return "";
  return o->impl.flags[row].c_str();
}

mcr_status mcr_outputs_value(const mcr_outputs* o, size_t row, size_t col, double* out) {
  if (auto st = require(o && out, "mcr_outputs_value: null argument")) return st;
  if (auto st = require(row < o->impl.n && col < o->impl.q,
                        "mcr_outputs_value: index out of range"))
    return st;
  *out = o->impl.at(row, col);
  return MCR_OK;
}

uint64_t mcr_outputs_pool_fingerprint(const mcr_outputs* o) {
  return o ? o->impl.pool_fingerprint : 0;
}

mcr_status mcr_outputs_write_csv(const mcr_outputs* o, const char* path) {
  if (auto st = require(o && path, "mcr_outputs_write_csv: null argument")) return st;
  return guarded([&] { mcr::write_qoi_csv(o->impl, path); });
}

mcr_status mcr_outputs_read_csv(const char* path, mcr_outputs** out) {
  if (auto st = require(path && out, "mcr_outputs_read_csv: null argument")) return st;
  return guarded([&] { *out = new mcr_outputs{mcr::read_qoi_csv(path)}; });
}

mcr_status mcr_outputs_prefix_distance(const mcr_outputs* o, const uint32_t* order,
                                       size_t order_len, size_t m,
                                       double* manhattan_out) {
  if (auto st = require(o && order && manhattan_out,
                        "mcr_outputs_prefix_distance: null argument"))
    return st;
  return guarded([&] {
    *manhattan_out = mcr::output_prefix_manhattan(o->impl, {order, order_len}, m);
  });
}

/* ---- reports ---- */

mcr_status mcr_report_create(const size_t* checkpoints, size_t n_checkpoints,
                             mcr_report** out) {
  if (auto st = require(checkpoints && out && n_checkpoints > 0,
                        "mcr_report_create: need at least one checkpoint"))
    return st;
  return guarded([&] {
    auto* r = new mcr_report;
    r->impl.checkpoints.assign(checkpoints, checkpoints + n_checkpoints);
    *out = r;
  });
}

void mcr_report_free(mcr_report* report) { delete report; }

mcr_status mcr_report_add_input_curve(mcr_report* report, const mcr_pool* pool,
                                      const char* name, size_t b,
                                      const mcr_trace* const* traces, size_t n_traces,
                                      int threads) {
  if (auto st = require(report && pool && name && traces && n_traces > 0,
                        "mcr_report_add_input_curve: null argument"))
    return st;
  return guarded([&] {
    mcr::validate_checkpoints(report->impl.checkpoints, pool->impl.size());
    mcr::PolicyCurve curve;
    curve.policy = name;
    curve.batch_size = b;
    curve.replicate_curves.resize(n_traces);
    for (size_t r = 0; r < n_traces; ++r)
      check_trace_pool(traces[r]->impl, pool->impl.fingerprint(), pool->impl.size());
    mcr::parallel_for(n_traces, threads, [&](size_t r) {
      const auto& order = traces[r]->order;
      std::vector<double> row(report->impl.checkpoints.size());
      for (size_t c = 0; c < row.size(); ++c)
        row[c] = mcr::prefix_manhattan(pool->impl, order, report->impl.checkpoints[c]);
      curve.replicate_curves[r] = std::move(row);
    });
    for (size_t r = 0; r < n_traces; ++r)
      curve.total_wall_ms += traces[r]->impl.total_elapsed_ms();
    curve.finalize();
    report->impl.curves.push_back(std::move(curve));
  });
}

mcr_status mcr_report_add_output_curve(mcr_report* report, const mcr_outputs* outputs,
                                       const char* name, size_t b,
                                       const mcr_trace* const* traces, size_t n_traces,
                                       int threads) {
  if (auto st = require(report && outputs && name && traces && n_traces > 0,
                        "mcr_report_add_output_curve: null argument"))
    return st;
  return guarded([&] {
    std::vector<std::vector<uint32_t>> orders(n_traces);
    for (size_t r = 0; r < n_traces; ++r) {
      if (outputs->impl.pool_fingerprint != 0)
        check_trace_pool(traces[r]->impl, outputs->impl.pool_fingerprint, outputs->impl.n);
      orders[r] = traces[r]->order;
    }
    auto curve = mcr::output_convergence_curve(outputs->impl, orders,
                                               report->impl.checkpoints, name, b, threads);
    for (size_t r = 0; r < n_traces; ++r)
      curve.total_wall_ms += traces[r]->impl.total_elapsed_ms();
    report->impl.curves.push_back(std::move(curve));
  });
}

mcr_status mcr_report_run_policy(mcr_report* report, const mcr_pool* pool,
                                 const char* policy_json, size_t replicates,
                                 int threads) {
  if (auto st = require(report && pool && policy_json,
                        "mcr_report_run_policy: null argument"))
    return st;
  return guarded([&] {
    const auto spec = policy_spec_from_json(policy_json);
    report->impl.curves.push_back(mcr::replicate_harness(
        pool->impl, spec, replicates, report->impl.checkpoints, threads));
  });
}

size_t mcr_report_curve_count(const mcr_report* report) {
  return report ? report->impl.curves.size() : 0;
}

const char* mcr_report_curve_name(const mcr_report* report, size_t curve) {
  if (!report || curve >= report->impl.curves.size()) return "";
  return report->impl.curves[curve].policy.c_str();
}

mcr_status mcr_report_curve_mean(const mcr_report* report, size_t curve,
                                 size_t checkpoint_index, double* out) {
  if (auto st = require(report && out, "mcr_report_curve_mean: null argument")) return st;
  if (auto st = require(curve < report->impl.curves.size() &&
                            checkpoint_index < report->impl.checkpoints.size(),
                        "mcr_report_curve_mean: index out of range"))
    return st;
  *out = report->impl.curves[curve].mean[checkpoint_index];
  return MCR_OK;
}

mcr_status mcr_report_write_json(const mcr_report* report, const char* path,
                                 const char* meta_json, int with_timings) {
  if (auto st = require(report && path, "mcr_report_write_json: null argument")) return st;
  return guarded([&] {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    if (meta_json && *meta_json) meta = nlohmann::ordered_json::parse(meta_json);
    mcr::write_report_json(report->impl, path, meta, with_timings != 0);
  });
}

mcr_status mcr_report_write_plot_csv(const mcr_report* report, const char* path) {
  if (auto st = require(report && path, "mcr_report_write_plot_csv: null argument"))
    return st;
  return guarded([&] { mcr::write_plot_csv(report->impl, path); });
}

}  // extern "C"
