#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/rng.hpp"
#include "core/sample_pool.hpp"

namespace mcr {

enum class PriorFamily { Uniform, Normal, TruncatedNormal, LogUniform };

std::string family_name(PriorFamily f);
PriorFamily family_from_name(const std::string& name);

/// One input dimension's distribution. JSON form:
///   {"family":"uniform","params":[lo,hi]}
///   {"family":"normal","params":[mu,sigma]}
///   {"family":"truncated-normal","params":[mu,sigma,lo,hi]}
///   {"family":"log-uniform","params":[lo,hi]}
struct PriorSpec {
  PriorFamily family = PriorFamily::Uniform;
  std::vector<double> params;

  void validate() const;  // throws std::invalid_argument
  double sample(RandomStream& rng) const;

  nlohmann::ordered_json to_json() const;
  static PriorSpec from_json(const nlohmann::json& j);
};

std::vector<PriorSpec> priors_from_json(const nlohmann::json& list);
nlohmann::ordered_json priors_to_json(const std::vector<PriorSpec>& priors);

// Shipped defaults for the 4-D demonstration model inputs [c*, W, kappa, M].
std::vector<PriorSpec> default_demo_priors();

// n i.i.d. rows, one column per prior. Column j consumes child stream
// (seed, 0xD1A0, j), so draws are bit-reproducible for a given seed.
SamplePool generate_pool(const std::vector<PriorSpec>& priors, size_t n, uint64_t seed);

}  // namespace mcr
