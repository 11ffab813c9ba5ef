// mcreorder command-line front end: sample generation, reordering, simulation,
// convergence evaluation, and batch-size comparison. All numerical work goes
// through the public C API in mcreorder.h; this file only handles flags,
// config files, and process exit codes.
//
// Exit codes: 0 ok, 2 config error, 3 input/output failure, 4 simulation
// failure, 5 artifact consistency failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <mcreorder.h>

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using PoolHandle = Handle<mcr_pool, mcr_pool_free>;
using TraceHandle = Handle<mcr_trace, mcr_trace_free>;
using OutputsHandle = Handle<mcr_outputs, mcr_outputs_free>;
using ReportHandle = Handle<mcr_report, mcr_report_free>;

int fail(mcr_status st) {
  std::fprintf(stderr, "mcreorder: error: %s\n", mcr_last_error());
  return static_cast<int>(st);
}

int fail_config(const std::string& msg) {
  std::fprintf(stderr, "mcreorder: config error: %s\n", msg.c_str());
  return 2;
}

#define TRY(expr)                                      \
  do {                                                 \
    if (mcr_status st_ = (expr); st_ != MCR_OK) return fail(st_); \
  } while (0)

std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fp);
  return buf;
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json cfg;
  in >> cfg;
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
  return cfg;
}

// A value set on the command line wins over the config file, which wins over
// the built-in default.
template <class T>
T resolve(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key,
          const T& fallback) {
  if (opt && opt->count() > 0) return flag_value;
  if (cfg.contains(key)) return cfg.at(key).get<T>();
  return fallback;
}

std::vector<size_t> parse_checkpoints(const std::string& text) {
  std::vector<size_t> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    out.push_back(static_cast<size_t>(std::stoull(cur)));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::vector<size_t> default_checkpoints(size_t n, size_t b) {
  std::vector<size_t> cps;
  if (b > 0) {
    for (size_t m = b; m < n; m += b) cps.push_back(m);
  } else {
    for (size_t m = 1; m < n; ++m) cps.push_back(m);
  }
  cps.push_back(n);
  return cps;
}

struct Common {
  std::string config_path;
  int threads = 0;
  bool timings = false;
  bool check_config = false;
  json cfg;

  CLI::Option* threads_opt = nullptr;
  CLI::Option* timings_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its keys");
    threads_opt = cmd->add_option("--threads", threads,
                                  "worker threads (0 = all cores); results do not depend on it");
    timings_opt = cmd->add_flag("--timings", timings,
                                "record real wall-clock fields (reruns stop being byte-identical)");
    cmd->add_flag("--check-config", check_config,
                  "validate the effective config, print it, and exit");
  }

  // call after parse
  void finalize() {
    cfg = load_config_file(config_path);
    threads = resolve(threads_opt, threads, cfg, "threads", 0);
    timings = resolve<bool>(timings_opt, timings, cfg, "timings", false);
  }
};

ordered_json base_meta(const char* command, const ordered_json& effective) {
  ordered_json meta;
  meta["tool"] = "mcreorder";
  meta["version"] = mcr_version();
  meta["command"] = command;
  meta["rng"] = mcr_rng_name();
  meta["config"] = effective;
  return meta;
}

int emit_check_config(const ordered_json& effective) {
  std::printf("%s\n", effective.dump(2).c_str());
  std::printf("config ok\n");
  return 0;
}

mcr_status read_priors_file(const std::string& path, std::string& text) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "mcreorder: cannot open priors file: %s\n", path.c_str());
    return MCR_ERR_IO;
  }
  text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return MCR_OK;
}

/* -------------------------------- gen ---------------------------------- */

struct GenOpts {
  Common common;
  std::string priors_path;
  size_t n = 0;
  uint64_t seed = 0;
  std::string out;
  CLI::Option *n_opt = nullptr, *seed_opt = nullptr, *out_opt = nullptr,
              *priors_opt = nullptr;
};

int run_gen(GenOpts& o) {
  o.common.finalize();
  const json& cfg = o.common.cfg;
  const size_t n = resolve(o.n_opt, o.n, cfg, "n", size_t{0});
  const uint64_t seed = resolve(o.seed_opt, o.seed, cfg, "seed", uint64_t{0});
  std::string out = o.out;
  if (o.out_opt->count() == 0 && cfg.contains("output") && cfg["output"].contains("pool"))
    out = cfg["output"]["pool"].get<std::string>();

  std::string priors_text;
  if (o.priors_opt->count() > 0) {
    TRY(read_priors_file(o.priors_path, priors_text));
  } else if (cfg.contains("priors")) {
    priors_text = cfg.at("priors").dump();
  } else {
    priors_text = mcr_default_priors_json();
  }

  ordered_json effective;
  effective["priors"] = json::parse(priors_text, nullptr, false).is_discarded()
                            ? json(priors_text)
                            : json::parse(priors_text);
  effective["n"] = n;
  effective["seed"] = seed;
  effective["out"] = out;

  if (o.common.check_config) {
    if (mcr_validate_priors_json(priors_text.c_str()) != MCR_OK)
      return fail_config(mcr_last_error());
    if (n < 1) return fail_config("n must be >= 1");
    return emit_check_config(effective);
  }
  if (out.empty()) return fail_config("gen: missing -o/--out");

  PoolHandle pool;
  TRY(mcr_pool_generate(priors_text.c_str(), n, seed, pool.out()));
  TRY(mcr_pool_write_csv(pool.get(), out.c_str()));
  std::printf("pool %s: n=%zu d=%zu fingerprint=%s\n", out.c_str(),
              mcr_pool_size(pool.get()), mcr_pool_dims(pool.get()),
              fingerprint_hex(mcr_pool_fingerprint(pool.get())).c_str());
  return 0;
}

/* ------------------------------- reorder -------------------------------- */

struct ReorderOpts {
  Common common;
  std::string pool_path;
  std::string policy = "greedy";
  size_t b = 0, k = 0;
  uint64_t seed = 0;
  size_t replicates = 1;
  bool exhaustive = false;
  std::string norm = "l1";
  bool scale_by_std = false;
  std::string checkpoints_text;
  std::string out, report_path, plot_path;
  CLI::Option *policy_opt = nullptr, *b_opt = nullptr, *k_opt = nullptr,
              *seed_opt = nullptr, *reps_opt = nullptr, *exh_opt = nullptr,
              *norm_opt = nullptr, *scale_opt = nullptr, *cps_opt = nullptr;
};

int norm_code(const std::string& name, int& out) {
  if (name == "l1") out = 0;
  else if (name == "l2") out = 1;
  else if (name == "linf") out = 2;
  else return -1;
  return 0;
}

int run_reorder(ReorderOpts& o) {
  o.common.finalize();
  const json& cfg = o.common.cfg;
  const std::string policy = resolve(o.policy_opt, o.policy, cfg, "policy", std::string("greedy"));
  const size_t b = resolve(o.b_opt, o.b, cfg, "b", size_t{0});
  const size_t k = resolve(o.k_opt, o.k, cfg, "k", size_t{0});
  const uint64_t seed = resolve(o.seed_opt, o.seed, cfg, "seed", uint64_t{0});
  const size_t replicates = resolve(o.reps_opt, o.replicates, cfg, "replicates", size_t{1});
  const bool exhaustive = resolve<bool>(o.exh_opt, o.exhaustive, cfg, "exhaustive", false);
  const std::string norm = resolve(o.norm_opt, o.norm, cfg, "norm", std::string("l1"));
  const bool scale_by_std = resolve<bool>(o.scale_opt, o.scale_by_std, cfg, "scale_by_std", false);
  std::string cps_text = o.cps_opt->count() ? o.checkpoints_text
                         : cfg.contains("checkpoints") ? cfg["checkpoints"].dump()
                                                       : std::string{};

  ordered_json effective;
  effective["pool"] = o.pool_path;
  effective["policy"] = policy;
  if (policy == "batch") {
    effective["b"] = b;
    effective["k"] = k;
    effective["exhaustive"] = exhaustive;
  }
  effective["seed"] = seed;
  effective["replicates"] = replicates;
  effective["norm"] = norm;
  effective["scale_by_std"] = scale_by_std;
  effective["out"] = o.out;

  int norm_i = 0;
  if (policy != "greedy" && policy != "batch" && policy != "random")
    return fail_config("unknown policy '" + policy + "'");
  if (norm_code(norm, norm_i) != 0) return fail_config("unknown norm '" + norm + "'");
  if (policy == "batch" && (b < 1 || k < 1))
    return fail_config("batch policy requires --b >= 1 and --k >= 1");
  if (replicates < 1) return fail_config("replicates must be >= 1");
  if (o.common.check_config) return emit_check_config(effective);
  if (o.out.empty()) return fail_config("reorder: missing -o/--out");

  PoolHandle pool;
  TRY(mcr_pool_read_csv(o.pool_path.c_str(), pool.out()));
  const size_t n = mcr_pool_size(pool.get());
  const size_t d = mcr_pool_dims(pool.get());

  std::vector<double> scale;
  if (scale_by_std) {
    scale.resize(d);
    for (size_t j = 0; j < d; ++j) TRY(mcr_pool_column_stddev(pool.get(), j, &scale[j]));
  }
  mcr_objective objective{norm_i, scale.empty() ? nullptr : scale.data()};

  std::vector<TraceHandle> traces(replicates);
  for (size_t r = 0; r < replicates; ++r) {
    if (policy == "greedy") {
      TRY(mcr_reorder_greedy(pool.get(), &objective, o.common.threads, traces[r].out()));
    } else if (policy == "batch") {
      TRY(mcr_reorder_batch(pool.get(), b, k, seed, static_cast<uint32_t>(r),
                            exhaustive ? 1 : 0, &objective, o.common.threads,
                            traces[r].out()));
    } else {
      TRY(mcr_reorder_random(pool.get(), seed, static_cast<uint32_t>(r), traces[r].out()));
    }
  }

  TRY(mcr_trace_write_jsonl(traces[0].get(), o.out.c_str(), o.common.timings ? 1 : 0));
  std::printf("trace %s: policy=%s n=%zu evaluations=%" PRIu64 "\n", o.out.c_str(),
              policy.c_str(), n, mcr_trace_eval_count(traces[0].get()));

  const bool want_report = replicates > 1 || !o.report_path.empty();
  if (want_report) {
    std::vector<size_t> cps =
        cps_text.empty() ? default_checkpoints(n, policy == "batch" ? b : 0)
                         : parse_checkpoints(cps_text);
    ReportHandle report;
    TRY(mcr_report_create(cps.data(), cps.size(), report.out()));
    std::vector<const mcr_trace*> ptrs;
    for (auto& t : traces) ptrs.push_back(t.get());
    TRY(mcr_report_add_input_curve(report.get(), pool.get(), policy.c_str(),
                                   policy == "batch" ? b : 0, ptrs.data(), ptrs.size(),
                                   o.common.threads));
    const std::string report_path =
        o.report_path.empty() ? o.out + ".report.json" : o.report_path;
    ordered_json meta = base_meta("reorder", effective);
    meta["pool_fingerprint"] = fingerprint_hex(mcr_pool_fingerprint(pool.get()));
    TRY(mcr_report_write_json(report.get(), report_path.c_str(), meta.dump().c_str(),
                              o.common.timings ? 1 : 0));
    if (!o.plot_path.empty())
      TRY(mcr_report_write_plot_csv(report.get(), o.plot_path.c_str()));
    std::printf("report %s: %zu replicates, %zu checkpoints\n", report_path.c_str(),
                replicates, cps.size());
  }
  return 0;
}

/* ------------------------------- simulate ------------------------------- */

struct SimulateOpts {
  Common common;
  std::string pool_path, trace_path;
  std::string model;
  std::string params_path;
  uint64_t model_seed = 0;
  size_t budget = 0;
  bool resume = false;
  std::string out;
  std::string snapshot_dir;
  size_t snapshot_every = 0;
  CLI::Option *model_opt = nullptr, *mseed_opt = nullptr, *budget_opt = nullptr,
              *snap_opt = nullptr, *snap_every_opt = nullptr;
};

int run_simulate(SimulateOpts& o) {
  o.common.finalize();
  const json& cfg = o.common.cfg;

  json model_spec = json::object();
  if (cfg.contains("model")) model_spec = cfg.at("model");
  if (!o.params_path.empty()) {
    std::ifstream in(o.params_path);
    if (!in) {
      std::fprintf(stderr, "mcreorder: cannot open params file: %s\n", o.params_path.c_str());
      return 3;
    }
    json file_spec;
    try {
      in >> file_spec;
    } catch (const json::exception& e) {
      return fail_config(std::string("params file: ") + e.what());
    }
    for (auto& [key, value] : file_spec.items()) model_spec[key] = value;
  }
  if (o.model_opt->count() > 0) model_spec["name"] = o.model;
  if (!model_spec.contains("name")) model_spec["name"] = "identity";
  if (o.mseed_opt->count() > 0) model_spec["seed"] = o.model_seed;
  if (o.snap_opt->count() > 0) model_spec["snapshot_dir"] = o.snapshot_dir;
  if (o.snap_every_opt->count() > 0) model_spec["snapshot_every"] = o.snapshot_every;

  ordered_json effective;
  effective["pool"] = o.pool_path;
  effective["trace"] = o.trace_path;
  effective["model"] = model_spec;
  effective["budget"] = o.budget;
  effective["resume"] = o.resume;
  effective["out"] = o.out;

  if (o.common.check_config) {
    if (mcr_validate_model_json(model_spec.dump().c_str()) != MCR_OK)
      return fail_config(mcr_last_error());
    return emit_check_config(effective);
  }
  if (o.out.empty()) return fail_config("simulate: missing -o/--out");

  PoolHandle pool;
  TRY(mcr_pool_read_csv(o.pool_path.c_str(), pool.out()));
  const size_t n = mcr_pool_size(pool.get());

  TraceHandle trace;
  if (!o.trace_path.empty()) TRY(mcr_trace_read_jsonl(o.trace_path.c_str(), trace.out()));

  OutputsHandle resume;
  if (o.resume) {
    TRY(mcr_outputs_read_csv(o.out.c_str(), resume.out()));
    const uint64_t fp = mcr_outputs_pool_fingerprint(resume.get());
    if (fp != 0 && fp != mcr_pool_fingerprint(pool.get())) {
      std::fprintf(stderr, "mcreorder: error: resume table %s belongs to a different pool\n",
                   o.out.c_str());
      return 5;
    }
  }

  const size_t budget = o.budget_opt->count() > 0 ? o.budget : n;
  if (budget > n) return fail_config("budget exceeds pool size");

  if (!model_spec.value("snapshot_dir", std::string{}).empty())
    std::filesystem::create_directories(model_spec["snapshot_dir"].get<std::string>());

  OutputsHandle outputs;
  TRY(mcr_propagate(pool.get(), trace.get(), model_spec.dump().c_str(), budget,
                    resume.get(), o.common.threads, outputs.out()));
  TRY(mcr_outputs_write_csv(outputs.get(), o.out.c_str()));

  const size_t failed = mcr_outputs_failed(outputs.get());
  std::printf("qoi %s: evaluated=%zu failed=%zu of n=%zu (model=%s)\n", o.out.c_str(),
              mcr_outputs_evaluated(outputs.get()), failed, n,
              model_spec["name"].get<std::string>().c_str());
  if (failed > 0) {
    for (size_t i = 0; i < n; ++i)
      if (mcr_outputs_status(outputs.get(), i) == 2)
        std::fprintf(stderr, "mcreorder: sample %zu failed: %s\n", i,
                     mcr_outputs_flags(outputs.get(), i));
    return 4;
  }
  return 0;
}

/* ------------------------------- evaluate ------------------------------- */

struct EvaluateOpts {
  Common common;
  std::string pool_path;
  std::vector<std::string> trace_paths;
  std::string outputs_path;
  std::string checkpoints_text;
  std::string out, plot_path;
  CLI::Option* cps_opt = nullptr;
};

int run_evaluate(EvaluateOpts& o) {
  o.common.finalize();
  const json& cfg = o.common.cfg;
  std::string cps_text = o.cps_opt->count() ? o.checkpoints_text
                         : cfg.contains("checkpoints") ? cfg["checkpoints"].dump()
                                                       : std::string{};

  ordered_json effective;
  effective["pool"] = o.pool_path;
  effective["traces"] = o.trace_paths;
  effective["outputs"] = o.outputs_path;
  effective["out"] = o.out;

  if (o.common.check_config) {
    if (o.trace_paths.empty()) return fail_config("evaluate: needs at least one --trace");
    return emit_check_config(effective);
  }
  if (o.trace_paths.empty()) return fail_config("evaluate: needs at least one --trace");
  if (o.out.empty()) return fail_config("evaluate: missing -o/--out");

  PoolHandle pool;
  TRY(mcr_pool_read_csv(o.pool_path.c_str(), pool.out()));
  const size_t n = mcr_pool_size(pool.get());

  std::vector<TraceHandle> traces(o.trace_paths.size());
  for (size_t i = 0; i < o.trace_paths.size(); ++i)
    TRY(mcr_trace_read_jsonl(o.trace_paths[i].c_str(), traces[i].out()));

  // replicate traces of the same (policy, b) form one curve
  std::map<std::pair<std::string, size_t>, std::vector<const mcr_trace*>> groups;
  for (auto& t : traces)
    groups[{mcr_trace_policy(t.get()), mcr_trace_batch_size(t.get())}].push_back(t.get());

  const auto& first_key = groups.begin()->first;
  std::vector<size_t> cps = cps_text.empty()
                                ? default_checkpoints(n, first_key.second)
                                : parse_checkpoints(cps_text);

  ReportHandle report;
  TRY(mcr_report_create(cps.data(), cps.size(), report.out()));
  for (const auto& [key, group] : groups)
    TRY(mcr_report_add_input_curve(report.get(), pool.get(), key.first.c_str(), key.second,
                                   group.data(), group.size(), o.common.threads));

  OutputsHandle outputs;
  if (!o.outputs_path.empty()) {
    TRY(mcr_outputs_read_csv(o.outputs_path.c_str(), outputs.out()));
    const uint64_t fp = mcr_outputs_pool_fingerprint(outputs.get());
    if (fp != 0 && fp != mcr_pool_fingerprint(pool.get())) {
      std::fprintf(stderr, "mcreorder: error: outputs %s belong to a different pool\n",
                   o.outputs_path.c_str());
      return 5;
    }
    for (const auto& [key, group] : groups) {
      const std::string name = key.first + "/output";
      TRY(mcr_report_add_output_curve(report.get(), outputs.get(), name.c_str(), key.second,
                                      group.data(), group.size(), o.common.threads));
    }
  }

  ordered_json meta = base_meta("evaluate", effective);
  meta["pool_fingerprint"] = fingerprint_hex(mcr_pool_fingerprint(pool.get()));
  TRY(mcr_report_write_json(report.get(), o.out.c_str(), meta.dump().c_str(),
                            o.common.timings ? 1 : 0));
  if (!o.plot_path.empty()) TRY(mcr_report_write_plot_csv(report.get(), o.plot_path.c_str()));
  std::printf("report %s: %zu curves, %zu checkpoints\n", o.out.c_str(),
              mcr_report_curve_count(report.get()), cps.size());
  return 0;
}

/* -------------------------------- compare ------------------------------- */

struct CompareOpts {
  Common common;
  std::string pool_path;
  std::string sizes_text;
  size_t k = 500;
  size_t replicates = 20;
  uint64_t seed = 0;
  bool with_greedy = false;
  bool no_random = false;
  std::string checkpoints_text;
  std::string out, plot_path;
  CLI::Option *sizes_opt = nullptr, *k_opt = nullptr, *reps_opt = nullptr,
              *seed_opt = nullptr, *cps_opt = nullptr;
};

int run_compare(CompareOpts& o) {
  o.common.finalize();
  const json& cfg = o.common.cfg;
  const std::string sizes_text = o.sizes_opt->count() ? o.sizes_text
                                 : cfg.contains("sizes") ? cfg["sizes"].dump()
                                                         : std::string{};
  const size_t k = resolve(o.k_opt, o.k, cfg, "k", size_t{500});
  const size_t replicates = resolve(o.reps_opt, o.replicates, cfg, "replicates", size_t{20});
  const uint64_t seed = resolve(o.seed_opt, o.seed, cfg, "seed", uint64_t{0});
  std::string cps_text = o.cps_opt->count() ? o.checkpoints_text
                         : cfg.contains("checkpoints") ? cfg["checkpoints"].dump()
                                                       : std::string{};

  if (sizes_text.empty()) return fail_config("compare: missing --sizes");
  const std::vector<size_t> sizes = parse_checkpoints(sizes_text);
  if (sizes.empty()) return fail_config("compare: empty --sizes list");

  ordered_json effective;
  effective["pool"] = o.pool_path;
  effective["sizes"] = sizes;
  effective["k"] = k;
  effective["replicates"] = replicates;
  effective["seed"] = seed;
  effective["with_greedy"] = o.with_greedy;
  effective["random_baseline"] = !o.no_random;
  effective["out"] = o.out;

  if (o.common.check_config) {
    if (k < 1 || replicates < 1) return fail_config("compare: k and replicates must be >= 1");
    return emit_check_config(effective);
  }
  if (o.out.empty()) return fail_config("compare: missing -o/--out");

  PoolHandle pool;
  TRY(mcr_pool_read_csv(o.pool_path.c_str(), pool.out()));
  const size_t n = mcr_pool_size(pool.get());
  for (size_t b : sizes)
    if (b < 1 || b > n) return fail_config("compare: batch size out of range: " + std::to_string(b));

  const size_t max_b = *std::max_element(sizes.begin(), sizes.end());
  std::vector<size_t> cps =
      cps_text.empty() ? default_checkpoints(n, max_b) : parse_checkpoints(cps_text);

  ReportHandle report;
  TRY(mcr_report_create(cps.data(), cps.size(), report.out()));
  for (size_t b : sizes) {
    ordered_json spec;
    spec["policy"] = "batch";
    spec["b"] = b;
    spec["k"] = k;
    spec["seed"] = seed;
    TRY(mcr_report_run_policy(report.get(), pool.get(), spec.dump().c_str(), replicates,
                              o.common.threads));
  }
  if (!o.no_random) {
    ordered_json spec;
    spec["policy"] = "random";
    spec["seed"] = seed;
    TRY(mcr_report_run_policy(report.get(), pool.get(), spec.dump().c_str(), replicates,
                              o.common.threads));
  }
  if (o.with_greedy) {
    ordered_json spec;
    spec["policy"] = "greedy";
    TRY(mcr_report_run_policy(report.get(), pool.get(), spec.dump().c_str(), 1,
                              o.common.threads));
  }

  ordered_json meta = base_meta("compare", effective);
  meta["pool_fingerprint"] = fingerprint_hex(mcr_pool_fingerprint(pool.get()));
  TRY(mcr_report_write_json(report.get(), o.out.c_str(), meta.dump().c_str(),
                            o.common.timings ? 1 : 0));
  if (!o.plot_path.empty()) TRY(mcr_report_write_plot_csv(report.get(), o.plot_path.c_str()));
  std::printf("report %s: %zu curves, %zu checkpoints\n", o.out.c_str(),
              mcr_report_curve_count(report.get()), cps.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcreorder: adaptive reordering of Monte Carlo samples for faster "
               "uncertainty-propagation convergence"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a sample pool CSV from priors");
  gen.common.attach(cmd_gen);
  gen.priors_opt = cmd_gen->add_option("--priors", gen.priors_path,
                                       "JSON file with a list of prior specs");
  gen.n_opt = cmd_gen->add_option("--n", gen.n, "number of samples");
  gen.seed_opt = cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  gen.out_opt = cmd_gen->add_option("-o,--out", gen.out, "output pool CSV path");

  ReorderOpts reorder;
  auto* cmd_reorder = app.add_subcommand("reorder", "reorder a pool (greedy, batch, or random)");
  reorder.common.attach(cmd_reorder);
  cmd_reorder->add_option("--pool", reorder.pool_path, "input pool CSV")->required();
  reorder.policy_opt =
      cmd_reorder->add_option("--policy", reorder.policy, "greedy | batch | random");
  reorder.b_opt = cmd_reorder->add_option("--b", reorder.b, "batch size (batch policy)");
  reorder.k_opt =
      cmd_reorder->add_option("--k", reorder.k, "candidate batches per iteration (batch policy)");
  reorder.seed_opt = cmd_reorder->add_option("--seed", reorder.seed, "RNG seed");
  reorder.reps_opt = cmd_reorder->add_option("--replicates", reorder.replicates,
                                             "replicate runs (adds a report)");
  reorder.exh_opt = cmd_reorder->add_flag("--exhaustive", reorder.exhaustive,
                                          "enumerate all candidates instead of drawing (b=1)");
  reorder.norm_opt =
      cmd_reorder->add_option("--norm", reorder.norm, "aggregation norm: l1 | l2 | linf");
  reorder.scale_opt = cmd_reorder->add_flag("--scale-by-std", reorder.scale_by_std,
                                            "divide each dimension's W1 by the pool stddev");
  reorder.cps_opt = cmd_reorder->add_option("--checkpoints", reorder.checkpoints_text,
                                            "comma-separated picked-count checkpoints");
  cmd_reorder->add_option("-o,--out", reorder.out, "output trace JSONL (replicate 0)");
  cmd_reorder->add_option("--report", reorder.report_path, "report JSON path");
  cmd_reorder->add_option("--plot", reorder.plot_path, "plot CSV path");

  SimulateOpts simulate;
  auto* cmd_simulate =
      app.add_subcommand("simulate", "propagate samples through a model, write QoI CSV");
  simulate.common.attach(cmd_simulate);
  cmd_simulate->add_option("--pool", simulate.pool_path, "input pool CSV")->required();
  cmd_simulate->add_option("--trace", simulate.trace_path, "trace JSONL fixing the order");
  simulate.model_opt = cmd_simulate->add_option("--model", simulate.model,
                                                "identity | surrogate | phasefield");
  cmd_simulate->add_option("--params", simulate.params_path,
                           "JSON file with model parameters (phase-field block)");
  simulate.mseed_opt =
      cmd_simulate->add_option("--model-seed", simulate.model_seed, "model noise seed");
  simulate.budget_opt =
      cmd_simulate->add_option("--budget", simulate.budget, "evaluate only the first B picks");
  cmd_simulate->add_flag("--resume", simulate.resume,
                         "reuse rows already present in the output CSV");
  cmd_simulate->add_option("-o,--out", simulate.out, "output QoI CSV");
  simulate.snap_opt =
      cmd_simulate->add_option("--snapshots", simulate.snapshot_dir, "snapshot dump directory");
  simulate.snap_every_opt = cmd_simulate->add_option(
      "--snapshot-every", simulate.snapshot_every, "steps between snapshots (phase field)");

  EvaluateOpts evaluate;
  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "input- and output-space convergence reports for traces");
  evaluate.common.attach(cmd_evaluate);
  cmd_evaluate->add_option("--pool", evaluate.pool_path, "input pool CSV")->required();
  cmd_evaluate->add_option("--trace", evaluate.trace_paths,
                           "trace JSONL (repeat for replicates)");
  cmd_evaluate->add_option("--outputs", evaluate.outputs_path,
                           "QoI CSV over the full pool (enables output-space curves)");
  evaluate.cps_opt = cmd_evaluate->add_option("--checkpoints", evaluate.checkpoints_text,
                                              "comma-separated checkpoints");
  cmd_evaluate->add_option("-o,--out", evaluate.out, "report JSON path");
  cmd_evaluate->add_option("--plot", evaluate.plot_path, "plot CSV path");

  CompareOpts compare;
  auto* cmd_compare =
      app.add_subcommand("compare", "batch-size sweep plus baselines on one pool");
  compare.common.attach(cmd_compare);
  cmd_compare->add_option("--pool", compare.pool_path, "input pool CSV")->required();
  compare.sizes_opt =
      cmd_compare->add_option("--sizes", compare.sizes_text, "comma-separated batch sizes");
  compare.k_opt = cmd_compare->add_option("--k", compare.k, "candidate batches per iteration");
  compare.reps_opt =
      cmd_compare->add_option("--replicates", compare.replicates, "replicates per policy");
  compare.seed_opt = cmd_compare->add_option("--seed", compare.seed, "RNG seed");
  cmd_compare->add_flag("--with-greedy", compare.with_greedy, "add the greedy curve");
  cmd_compare->add_flag("--no-random", compare.no_random, "drop the random baseline");
  compare.cps_opt = cmd_compare->add_option("--checkpoints", compare.checkpoints_text,
                                            "comma-separated checkpoints");
  cmd_compare->add_option("-o,--out", compare.out, "report JSON path");
  cmd_compare->add_option("--plot", compare.plot_path, "plot CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_reorder->parsed()) return run_reorder(reorder);
    if (cmd_simulate->parsed()) return run_simulate(simulate);
    if (cmd_evaluate->parsed()) return run_evaluate(evaluate);
    if (cmd_compare->parsed()) return run_compare(compare);
  } catch (const json::exception& e) {
    return fail_config(e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mcreorder: error: %s\n", e.what());
    return 2;
  }
  return 2;
}
