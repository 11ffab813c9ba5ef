#include "core/priors.hpp"

#include <stdexcept>

namespace mcr {

std::string family_name(PriorFamily f) {
  switch (f) {
    case PriorFamily::Uniform: return "uniform";
    case PriorFamily::Normal: return "normal";
    case PriorFamily::TruncatedNormal: return "truncated-normal";
    case PriorFamily::LogUniform: return "log-uniform";
  }
  return "?";
}

PriorFamily family_from_name(const std::string& name) {
  if (name == "uniform") return PriorFamily::Uniform;
  if (name == "normal") return PriorFamily::Normal;
  if (name == "truncated-normal") return PriorFamily::TruncatedNormal;
  if (name == "log-uniform") return PriorFamily::LogUniform;
  throw std::invalid_argument("unknown prior family '" + name + "'");
}

namespace {

void require_params(const PriorSpec& p, size_t count) {
  if (p.params.size() != count)
    throw std::invalid_argument("prior " + family_name(p.family) + ": expected " +
                                std::to_string(count) + " parameters, got " +
                                std::to_string(p.params.size()));
}

}  // namespace

void PriorSpec::validate() const {
  switch (family) {
    case PriorFamily::Uniform:
      require_params(*this, 2);
      if (!(params[0] < params[1]))
        throw std::invalid_argument("uniform prior: requires lo < hi");
      break;
    case PriorFamily::Normal:
      require_params(*this, 2);
      if (!(params[1] > 0.0))
        throw std::invalid_argument("normal prior: requires sigma > 0");
      break;
    case PriorFamily::TruncatedNormal:
      require_params(*this, 4);
      if (!(params[1] > 0.0))
        throw std::invalid_argument("truncated-normal prior: requires sigma > 0");
      if (!(params[2] < params[3]))
        throw std::invalid_argument("truncated-normal prior: requires lo < hi");
      break;
    case PriorFamily::LogUniform:
      require_params(*this, 2);
      if (!(params[0] > 0.0) || !(params[0] < params[1]))
        throw std::invalid_argument("log-uniform prior: requires 0 < lo < hi");
      break;
  }
}

double PriorSpec::sample(RandomStream& rng) const {
  switch (family) {
    case PriorFamily::Uniform: return rng.uniform(params[0], params[1]);
    case PriorFamily::Normal: return rng.normal(params[0], params[1]);
    case PriorFamily::TruncatedNormal:
      return rng.truncated_normal(params[0], params[1], params[2], params[3]);
    case PriorFamily::LogUniform: return rng.log_uniform(params[0], params[1]);
  }
  throw std::logic_error("unreachable prior family");
}

nlohmann::ordered_json PriorSpec::to_json() const {
  return {{"family", family_name(family)}, {"params", params}};
}

PriorSpec PriorSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.contains("params"))
    throw std::invalid_argument("prior spec: expected {\"family\":..., \"params\":[...]}");
  PriorSpec p;
  p.family = family_from_name(j.at("family").get<std::string>());
  p.params = j.at("params").get<std::vector<double>>();
  p.validate();
  return p;
}

std::vector<PriorSpec> priors_from_json(const nlohmann::json& list) {
  if (!list.is_array() || list.empty())
    throw std::invalid_argument("priors: expected a non-empty list");
  std::vector<PriorSpec> out;
  out.reserve(list.size());
  for (const auto& item : list) out.push_back(PriorSpec::from_json(item));
  return out;
}

nlohmann::ordered_json priors_to_json(const std::vector<PriorSpec>& priors) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& p : priors) out.push_back(p.to_json());
  return out;
}

std::vector<PriorSpec> default_demo_priors() {
  // [c*, W, kappa, M]: mean composition near the symmetric quench, positive
  // barrier/gradient/mobility ranges that keep the desk-scale solver stable.
  return {
      {PriorFamily::TruncatedNormal, {0.5, 0.08, 0.3, 0.7}},
      {PriorFamily::Uniform, {0.5, 2.0}},
      {PriorFamily::LogUniform, {0.5, 4.0}},
      {PriorFamily::Uniform, {0.5, 2.0}},
  };
}

SamplePool generate_pool(const std::vector<PriorSpec>& priors, size_t n, uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_pool: requires n >= 1");
  if (priors.empty()) throw std::invalid_argument("generate_pool: requires at least one prior");
  for (const auto& p : priors) p.validate();
  const size_t d = priors.size();
  std::vector<double> data(n * d);
  RandomStream root(seed);
  for (size_t j = 0; j < d; ++j) {
    RandomStream col = root.child(0xD1A0, j);
    for (size_t i = 0; i < n; ++i) data[i * d + j] = priors[j].sample(col);
  }
  return SamplePool(std::move(data), n, d);
}

}  // namespace mcr
