#include "core/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace mcr {

Model make_identity_model(size_t d) {
  Model m;
  m.name = "identity";
  m.out_dim = d;
  for (size_t j = 0; j < d; ++j) m.column_names.push_back("y" + std::to_string(j));
  m.eval = [](std::span<const double> sample, size_t) {
    return ModelOutput{{sample.begin(), sample.end()}, ""};
  };
  return m;
}

Model make_surrogate_model(size_t d) {
  Model m;
  m.name = "surrogate";
  m.out_dim = d;
  for (size_t j = 0; j < d; ++j) m.column_names.push_back("y" + std::to_string(j));
  m.eval = [d](std::span<const double> sample, size_t) {
    std::vector<double> y(d);
    for (size_t j = 0; j < d; ++j)
      y[j] = std::exp(0.3 * sample[j]) + 0.5 * std::sin(sample[(j + 1) % d]);
    return ModelOutput{std::move(y), ""};
  };
  return m;
}

namespace {

// Grid dump plus a JSON sidecar describing the snapshot.
void dump_snapshot(const std::string& dir, size_t sample_index,
                   const CompositionField& field, const PhaseFieldSnapshot& snap,
                   const PhaseFieldParams& p) {
  const std::string stem = dir + "/sample_" + std::to_string(sample_index) + "_step_" +
                           std::to_string(snap.step);
  std::ofstream grid(stem + ".csv", std::ios::binary);
  if (!grid) throw IoError("cannot write snapshot: " + stem + ".csv");
  for (size_t x = 0; x < field.n; ++x) {
    for (size_t y = 0; y < field.n; ++y) {
      if (y) grid << ',';
      grid << format_double(field.at(x, y));
    }
    grid << '\n';
  }
  nlohmann::ordered_json side;
  side["sample"] = sample_index;
  side["step"] = snap.step;
  side["time"] = snap.time;
  side["mean"] = snap.mean;
  side["free_energy"] = snap.free_energy;
  side["params"] = phasefield_params_to_json(p);
  std::ofstream meta(stem + ".json", std::ios::binary);
  if (!meta) throw IoError("cannot write snapshot sidecar: " + stem + ".json");
  meta << side.dump(2) << '\n';
}

}  // namespace

Model make_phasefield_model(const PhaseFieldParams& base, uint64_t model_seed,
                            const std::string& snapshot_dir) {
  base.validate();
  Model m;
  m.name = "phasefield";
  m.out_dim = kQoIDim;
  m.column_names.assign(kQoIColumnNames, kQoIColumnNames + kQoIDim);
  m.eval = [base, model_seed, snapshot_dir](std::span<const double> sample, size_t index) {
    if (sample.size() != 4)
      throw std::invalid_argument("phasefield model: expects 4-D samples [c*, W, kappa, M]");
    PhaseFieldParams p = base;
    p.c_star = sample[0];
    p.barrier = sample[1];
    p.kappa = sample[2];
    p.mobility = sample[3];
    p.validate();
    RandomStream rng = RandomStream(model_seed).child(index, 0);
    SnapshotCallback cb;
    if (!snapshot_dir.empty())
      cb = [&](const CompositionField& f, const PhaseFieldSnapshot& s) {
        dump_snapshot(snapshot_dir, index, f, s, p);
      };
    const PhaseFieldRun run = run_phasefield(p, rng, cb);
    const QoIRecord q = extract_qoi(run.final_field, p);
    return ModelOutput{q.as_vector(), qoi_flags_to_string(q.flags)};
  };
  return m;
}

PhaseFieldParams phasefield_params_from_json(const nlohmann::json& spec) {
  PhaseFieldParams p;
  if (spec.contains("c_star")) p.c_star = spec.at("c_star").get<double>();
  if (spec.contains("barrier")) p.barrier = spec.at("barrier").get<double>();
  if (spec.contains("kappa")) p.kappa = spec.at("kappa").get<double>();
  if (spec.contains("mobility")) p.mobility = spec.at("mobility").get<double>();
  if (spec.contains("noise_amp")) p.noise_amp = spec.at("noise_amp").get<double>();
  if (spec.contains("c_alpha")) p.c_alpha = spec.at("c_alpha").get<double>();
  if (spec.contains("c_beta")) p.c_beta = spec.at("c_beta").get<double>();
  if (spec.contains("grid_n")) p.grid_n = spec.at("grid_n").get<size_t>();
  if (spec.contains("domain_l")) p.domain_l = spec.at("domain_l").get<double>();
  if (spec.contains("dt")) p.dt = spec.at("dt").get<double>();
  if (spec.contains("steps")) p.steps = spec.at("steps").get<size_t>();
  if (spec.contains("snapshot_every")) p.snapshot_every = spec.at("snapshot_every").get<size_t>();
  if (spec.contains("noise")) {
    const auto s = spec.at("noise").get<std::string>();
    if (s == "clipped-normal") p.noise = NoiseKind::ClippedNormal;
    else if (s == "uniform") p.noise = NoiseKind::Uniform;
    else throw std::invalid_argument("phase field: unknown noise kind '" + s + "'");
  }
  if (spec.contains("well")) {
    const auto s = spec.at("well").get<std::string>();
    if (s == "squared") p.well = WellForm::SquaredDoubleWell;
    else if (s == "single-product") p.well = WellForm::SingleProduct;
    else throw std::invalid_argument("phase field: unknown well form '" + s + "'");
  }
  p.validate();
  return p;
}

nlohmann::ordered_json phasefield_params_to_json(const PhaseFieldParams& p) {
  nlohmann::ordered_json j;
  j["c_star"] = p.c_star;
  j["barrier"] = p.barrier;
  j["kappa"] = p.kappa;
  j["mobility"] = p.mobility;
  j["noise_amp"] = p.noise_amp;
  j["c_alpha"] = p.c_alpha;
  j["c_beta"] = p.c_beta;
  j["grid_n"] = p.grid_n;
  j["domain_l"] = p.domain_l;
  j["dt"] = p.dt;
  j["steps"] = p.steps;
  j["snapshot_every"] = p.snapshot_every;
  j["noise"] = p.noise == NoiseKind::ClippedNormal ? "clipped-normal" : "uniform";
  j["well"] = p.well == WellForm::SquaredDoubleWell ? "squared" : "single-product";
  return j;
}

Model model_from_json(const nlohmann::json& spec, size_t d) {
  if (!spec.is_object() || !spec.contains("name"))
    throw std::invalid_argument("model spec: expected {\"name\": ...}");
  const auto name = spec.at("name").get<std::string>();
  if (name == "identity") return make_identity_model(d);
  if (name == "surrogate") return make_surrogate_model(d);
  if (name == "phasefield") {
    const uint64_t seed = spec.value("seed", uint64_t{0});
    const auto snapshot_dir = spec.value("snapshot_dir", std::string{});
    return make_phasefield_model(phasefield_params_from_json(spec), seed, snapshot_dir);
  }
  throw std::invalid_argument("model spec: unknown model '" + name + "'");
}

size_t OutputTable::evaluated() const {
  size_t c = 0;
  for (auto s : status)
    if (s != RowStatus::Pending) ++c;
  return c;
}

size_t OutputTable::failed() const {
  size_t c = 0;
  for (auto s : status)
    if (s == RowStatus::Failed) ++c;
  return c;
}

void OutputTable::finalize() {
  sorted_.assign(q, {});
  for (size_t j = 0; j < q; ++j) {
    auto& col = sorted_[j];
    col.reserve(n);
    for (size_t i = 0; i < n; ++i)
      if (status[i] == RowStatus::Ok) col.push_back(values[i * q + j]);
    std::sort(col.begin(), col.end());
  }
}

OutputTable propagate(const SamplePool& pool, std::span<const uint32_t> order,
                      const Model& model, size_t budget, const OutputTable* resume,
                      int threads) {
  const size_t n = pool.size();
  if (budget > n) throw std::invalid_argument("propagate: budget exceeds pool size");
  if (order.size() != n) throw std::invalid_argument("propagate: order must cover the pool");

  OutputTable out;
  out.n = n;
  out.q = model.out_dim;
  out.model_name = model.name;
  out.column_names = model.column_names;
  out.pool_fingerprint = pool.fingerprint();
  if (resume) {
    if (resume->n != n || resume->q != model.out_dim)
      throw ConsistencyError("propagate: resume table shape mismatch");
    if (resume->pool_fingerprint != 0 && resume->pool_fingerprint != pool.fingerprint())
      throw ConsistencyError("propagate: resume table belongs to a different pool");
    if (resume->model_name != model.name)
      throw ConsistencyError("propagate: resume table from model '" + resume->model_name +
                             "', expected '" + model.name + "'");
    out.values = resume->values;
    out.status = resume->status;
    out.flags = resume->flags;
  } else {
    out.values.assign(n * model.out_dim, std::numeric_limits<double>::quiet_NaN());
    out.status.assign(n, RowStatus::Pending);
    out.flags.assign(n, "");
  }

  std::vector<uint32_t> todo;
  for (size_t t = 0; t < budget; ++t) {
    const uint32_t i = order[t];
    if (out.status[i] == RowStatus::Pending) todo.push_back(i);
  }

  parallel_for(todo.size(), threads, [&](size_t t) {
    const uint32_t i = todo[t];
    try {
      ModelOutput res = model.eval(pool.row(i), i);
      if (res.values.size() != model.out_dim)
        throw std::runtime_error("model returned " + std::to_string(res.values.size()) +
                                 " values, expected " + std::to_string(model.out_dim));
      std::copy(res.values.begin(), res.values.end(), out.values.begin() + i * out.q);
      out.flags[i] = res.flags;
      out.status[i] = RowStatus::Ok;
    } catch (const std::exception& e) {
      std::string msg = e.what();
      if (const auto pos = msg.find('\n'); pos != std::string::npos) msg.resize(pos);
      out.flags[i] = "error:" + msg;
      out.status[i] = RowStatus::Failed;
    }
  });

  out.finalize();
  return out;
}

double output_prefix_manhattan(const OutputTable& outputs,
                               std::span<const uint32_t> order, size_t m,
                               std::vector<double>* w_out) {
  if (m == 0 || m > order.size())
    throw std::invalid_argument("output prefix: m out of range");
  if (outputs.sorted().empty() || outputs.sorted()[0].empty())
    throw std::invalid_argument("output prefix: no evaluated outputs");

  std::vector<double> prefix;
  prefix.reserve(m);
  double total = 0.0;
  if (w_out) w_out->assign(outputs.q, 0.0);
  for (size_t j = 0; j < outputs.q; ++j) {
    prefix.clear();
    for (size_t t = 0; t < m; ++t) {
      const uint32_t i = order[t];
      if (outputs.status[i] == RowStatus::Ok) prefix.push_back(outputs.at(i, j));
    }
    if (prefix.empty())
      throw std::invalid_argument("output prefix: no evaluated samples in the first " +
                                  std::to_string(m) + " picks");
    std::sort(prefix.begin(), prefix.end());
    const double wj = w1_sorted(outputs.sorted()[j], prefix);
    if (w_out) (*w_out)[j] = wj;
    total += wj;
  }
  return total;
}

PolicyCurve output_convergence_curve(const OutputTable& outputs,
                                     const std::vector<std::vector<uint32_t>>& orders,
                                     std::span<const size_t> checkpoints,
                                     const std::string& policy, size_t batch_size,
                                     int threads) {
  if (orders.empty()) throw std::invalid_argument("output convergence: no orderings");
  validate_checkpoints(checkpoints, outputs.n);
  PolicyCurve curve;
  curve.policy = policy;
  curve.batch_size = batch_size;
  curve.replicate_curves.resize(orders.size());
  parallel_for(orders.size(), threads, [&](size_t r) {
    std::vector<double> row(checkpoints.size());
    for (size_t c = 0; c < checkpoints.size(); ++c)
      row[c] = output_prefix_manhattan(outputs, orders[r], checkpoints[c]);
    curve.replicate_curves[r] = std::move(row);
  });
  curve.finalize();
  return curve;
}

ConvergenceReport batch_size_sweep(const SamplePool& pool, std::span<const size_t> sizes,
                                   size_t num_draws, size_t replicates,
                                   std::span<const size_t> checkpoints, uint64_t seed,
                                   int threads, bool include_random) {
  if (sizes.empty()) throw std::invalid_argument("batch size sweep: no sizes");
  ConvergenceReport report;
  report.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  for (size_t b : sizes) {
    PolicySpec spec;
    spec.policy = "batch";
    spec.batch = BatchConfig{b, num_draws, seed, false};
    report.curves.push_back(replicate_harness(pool, spec, replicates, checkpoints, threads));
  }
  if (include_random) {
    PolicySpec spec;
    spec.policy = "random";
    spec.seed = seed;
    report.curves.push_back(replicate_harness(pool, spec, replicates, checkpoints, threads));
  }
  return report;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_qoi_csv(const OutputTable& outputs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write QoI CSV: " + path);
  out << "sample_id";
  for (const auto& c : outputs.column_names) out << ',' << c;
  out << ",flags\n";
  for (size_t i = 0; i < outputs.n; ++i) {
    out << i;
    for (size_t j = 0; j < outputs.q; ++j) {
      out << ',';
      if (outputs.status[i] == RowStatus::Ok) out << format_double(outputs.at(i, j));
    }
    out << ',' << outputs.flags[i] << '\n';
  }
  if (!out) throw IoError("write failed: " + path);

  nlohmann::ordered_json meta;
  meta["tool"] = "mcreorder";
  meta["model"] = outputs.model_name;
  meta["n"] = outputs.n;
  meta["q"] = outputs.q;
  meta["columns"] = outputs.column_names;
  meta["pool_fingerprint"] = to_hex(outputs.pool_fingerprint);
  meta["evaluated"] = outputs.evaluated();
  meta["failed"] = outputs.failed();
  std::ofstream side(path + ".meta.json", std::ios::binary);
  if (!side) throw IoError("cannot write sidecar: " + path + ".meta.json");
  side << meta.dump(2) << '\n';
}

OutputTable read_qoi_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open QoI CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty QoI CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "sample_id" || header.back() != "flags")
    throw IoError(path + ": expected header sample_id,<columns...>,flags");

  OutputTable out;
  out.q = header.size() - 2;
  out.column_names.assign(header.begin() + 1, header.end() - 1);

  std::vector<std::vector<double>> rows;
  std::vector<RowStatus> status;
  std::vector<std::string> flags;
  size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw IoError(path + ": row " + std::to_string(row_no) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(header.size()));
    size_t id = 0;
    {
      const auto& cell = cells[0];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), id);
      if (res.ec != std::errc{} || id != row_no)
        throw IoError(path + ": sample ids must be 0..n-1 in order");
    }
    std::vector<double> vals(out.q, std::numeric_limits<double>::quiet_NaN());
    bool any_empty = false;
    for (size_t j = 0; j < out.q; ++j) {
      const auto& cell = cells[1 + j];
      if (cell.empty()) {
        any_empty = true;
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw IoError(path + ": bad number '" + cell + "' at row " + std::to_string(row_no));
      vals[j] = v;
    }
    const std::string& flag = cells.back();
    RowStatus st;
    if (flag.rfind("error:", 0) == 0) {
      st = RowStatus::Failed;
    } else if (any_empty) {
      st = RowStatus::Pending;
    } else {
      st = RowStatus::Ok;
    }
    rows.push_back(std::move(vals));
    status.push_back(st);
    flags.push_back(flag);
    ++row_no;
  }
  if (rows.empty()) throw IoError(path + ": no data rows");
  out.n = rows.size();
  out.values.assign(out.n * out.q, std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < out.n; ++i)
    if (status[i] == RowStatus::Ok)
      std::copy(rows[i].begin(), rows[i].end(), out.values.begin() + i * out.q);
  out.status = std::move(status);
  out.flags = std::move(flags);

  // Sidecar (when present) restores the pool fingerprint and model name.
  std::ifstream side(path + ".meta.json", std::ios::binary);
  if (side) {
    try {
      nlohmann::json meta;
      side >> meta;
      out.model_name = meta.value("model", std::string{});
      const auto fp = meta.value("pool_fingerprint", std::string{});
      if (!fp.empty()) out.pool_fingerprint = std::stoull(fp, nullptr, 16);
    } catch (const std::exception& e) {
      throw IoError(path + ".meta.json: bad sidecar: " + e.what());
    }
  }
  out.finalize();
  return out;
}

}  // namespace mcr
