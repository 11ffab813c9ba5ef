#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/phasefield.hpp"
#include "core/report.hpp"
#include "core/sample_pool.hpp"
#include "core/selection.hpp"

namespace mcr {

struct ModelOutput {
  std::vector<double> values;
  std::string flags;  // empty normally
};

/// Callable contract mapping one input sample to one QoI vector. Evaluation
/// must be a function of (sample, sample_index) only so results do not depend
/// on propagation order.
struct Model {
  std::string name;
  size_t out_dim = 0;
  bool deterministic = true;
  std::vector<std::string> column_names;
  std::function<ModelOutput(std::span<const double> sample, size_t sample_index)> eval;
};

Model make_identity_model(size_t d);
// Fixed smooth nonlinear map y_j = exp(0.3 x_j) + 0.5 sin(x_{(j+1) mod d}).
Model make_surrogate_model(size_t d);
// Requires d == 4; sample is [c*, W, kappa, M], output is the 5-entry QoI
// vector. Each sample's noise stream is child(model_seed, sample_index, 0).
// A non-empty snapshot_dir dumps grid CSVs + JSON sidecars at the configured
// snapshot interval.
Model make_phasefield_model(const PhaseFieldParams& base, uint64_t model_seed,
                            const std::string& snapshot_dir = {});
// spec: {"name":"identity"|"surrogate"|"phasefield", ...phase-field overrides...}
Model model_from_json(const nlohmann::json& spec, size_t d);
PhaseFieldParams phasefield_params_from_json(const nlohmann::json& spec);
nlohmann::ordered_json phasefield_params_to_json(const PhaseFieldParams& p);

enum class RowStatus : uint8_t { Pending = 0, Ok = 1, Failed = 2 };

/// Propagated outputs keyed by original sample index; row i always corresponds
/// to input sample i regardless of the order the model was driven in.
struct OutputTable {
  size_t n = 0, q = 0;
  std::string model_name;
  std::vector<std::string> column_names;
  std::vector<double> values;  // n*q, NaN unless status Ok
  std::vector<RowStatus> status;
  std::vector<std::string> flags;
  uint64_t pool_fingerprint = 0;

  double at(size_t i, size_t j) const { return values[i * q + j]; }
  size_t evaluated() const;
  size_t failed() const;

  // Ascending per-dimension views over Ok rows; rebuilt by finalize().
  const std::vector<std::vector<double>>& sorted() const { return sorted_; }
  void finalize();

private:
  std::vector<std::vector<double>> sorted_;
};

// Evaluates the model on the first `budget` samples in `order` (skipping rows
// already present in `resume`), in parallel across samples. A model failure
// marks the row Failed with a diagnostic flag instead of aborting.
OutputTable propagate(const SamplePool& pool, std::span<const uint32_t> order,
                      const Model& model, size_t budget,
                      const OutputTable* resume = nullptr, int threads = 1);

// ||W||_1 between the outputs of the first m picks and all evaluated outputs.
// Failed rows are excluded from both sides.
double output_prefix_manhattan(const OutputTable& outputs,
                               std::span<const uint32_t> order, size_t m,
                               std::vector<double>* w_out = nullptr);

// Output-space convergence curve for a set of replicate orderings.
PolicyCurve output_convergence_curve(const OutputTable& outputs,
                                     const std::vector<std::vector<uint32_t>>& orders,
                                     std::span<const size_t> checkpoints,
                                     const std::string& policy, size_t batch_size,
                                     int threads = 1);

// One adaptive-batch curve per batch size (plus a random baseline when
// include_random), shared checkpoints and pool.
ConvergenceReport batch_size_sweep(const SamplePool& pool,
                                   std::span<const size_t> sizes, size_t num_draws,
                                   size_t replicates, std::span<const size_t> checkpoints,
                                   uint64_t seed, int threads = 1,
                                   bool include_random = true);

// QoI CSV: header `sample_id,<columns...>,flags`; pending rows keep empty value
// cells so partial (budget-limited) propagations can be resumed from the file.
void write_qoi_csv(const OutputTable& outputs, const std::string& path);
OutputTable read_qoi_csv(const std::string& path);

}  // namespace mcr
