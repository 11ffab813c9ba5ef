#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/sample_pool.hpp"

namespace mcr {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

void PolicyCurve::finalize() {
  const size_t reps = replicate_curves.size();
  if (reps == 0) throw std::invalid_argument("policy curve: no replicates");
  const size_t ncp = replicate_curves[0].size();
  for (const auto& row : replicate_curves)
    if (row.size() != ncp) throw std::invalid_argument("policy curve: ragged replicate rows");

  mean.assign(ncp, 0.0);
  lo.assign(ncp, 0.0);
  hi.assign(ncp, 0.0);
  stderr_.assign(ncp, 0.0);
  std::vector<double> col(reps);
  for (size_t c = 0; c < ncp; ++c) {
    for (size_t r = 0; r < reps; ++r) col[r] = replicate_curves[r][c];
    double m = 0.0;
    for (double v : col) m += v;
    m /= static_cast<double>(reps);
    mean[c] = m;
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    const double sd = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
    stderr_[c] = sd / std::sqrt(static_cast<double>(reps));
    lo[c] = percentile(col, 0.025);
    hi[c] = percentile(col, 0.975);
  }
}

nlohmann::ordered_json report_to_json(const ConvergenceReport& report,
                                      const nlohmann::ordered_json& meta,
                                      bool with_timings) {
  nlohmann::ordered_json j;
  j["meta"] = meta;
  j["checkpoints"] = report.checkpoints;
  auto policies = nlohmann::ordered_json::array();
  for (const auto& c : report.curves) {
    nlohmann::ordered_json pc;
    pc["policy"] = c.policy;
    pc["b"] = c.batch_size;
    pc["replicates"] = c.replicates();
    pc["mean"] = c.mean;
    pc["lo"] = c.lo;
    pc["hi"] = c.hi;
    pc["stderr"] = c.stderr_;
    // mean +- 2*stderr, recorded alongside the percentile band for comparison
    std::vector<double> lo2(c.mean.size()), hi2(c.mean.size());
    for (size_t i = 0; i < c.mean.size(); ++i) {
      lo2[i] = c.mean[i] - 2.0 * c.stderr_[i];
      hi2[i] = c.mean[i] + 2.0 * c.stderr_[i];
    }
    pc["lo_2se"] = lo2;
    pc["hi_2se"] = hi2;
    pc["wall_ms"] = with_timings ? c.total_wall_ms : 0.0;
    pc["replicate_curves"] = c.replicate_curves;
    policies.push_back(std::move(pc));
  }
  j["policies"] = std::move(policies);
  return j;
}

void write_report_json(const ConvergenceReport& report, const std::string& path,
                       const nlohmann::ordered_json& meta, bool with_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report: " + path);
  out << report_to_json(report, meta, with_timings).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_plot_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write plot CSV: " + path);
  out << "policy,b,m,mean,lo,hi\n";
  for (const auto& c : report.curves) {
    for (size_t i = 0; i < report.checkpoints.size(); ++i) {
      out << c.policy << ',' << c.batch_size << ',' << report.checkpoints[i] << ','
          << format_double(c.mean[i]) << ',' << format_double(c.lo[i]) << ','
          << format_double(c.hi[i]) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mcr
