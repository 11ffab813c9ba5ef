#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcr {

/// Convergence curve of one policy across replicates. `replicate_curves` holds
/// the raw per-replicate distances at each checkpoint; finalize() derives the
/// mean, the 2.5/97.5 empirical percentile band, and the standard error.
struct PolicyCurve {
  std::string policy;
  size_t batch_size = 0;  // 0 when not a batch policy
  std::vector<std::vector<double>> replicate_curves;  // [replicate][checkpoint]
  std::vector<double> mean, lo, hi, stderr_;
  double total_wall_ms = 0.0;

  size_t replicates() const { return replicate_curves.size(); }
  void finalize();
};

struct ConvergenceReport {
  std::vector<size_t> checkpoints;
  std::vector<PolicyCurve> curves;
};

// Linear-interpolation percentile of an unsorted sample, p in [0,1].
double percentile(std::vector<double> values, double p);

// Report JSON: {"meta": <caller-provided>, "checkpoints": [...], "policies": [...]}.
// Wall times are included only when with_timings is set so reruns stay
// byte-identical by default.
void write_report_json(const ConvergenceReport& report, const std::string& path,
                       const nlohmann::ordered_json& meta, bool with_timings);

// Flat CSV for plotting: policy,b,m,mean,lo,hi
void write_plot_csv(const ConvergenceReport& report, const std::string& path);

nlohmann::ordered_json report_to_json(const ConvergenceReport& report,
                                      const nlohmann::ordered_json& meta,
                                      bool with_timings);

}  // namespace mcr
