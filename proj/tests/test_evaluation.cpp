#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "core/errors.hpp"
#include "core/evaluation.hpp"
#include "core/priors.hpp"
#include "testutil.hpp"

using namespace mcr;

namespace {

SamplePool random_pool(uint64_t seed, size_t n, size_t d) {
  RandomStream rng(seed);
  std::vector<double> data(n * d);
  for (auto& v : data) v = rng.normal();
  return SamplePool(std::move(data), n, d);
}

std::vector<uint32_t> natural_order(size_t n) {
  std::vector<uint32_t> o(n);
  for (size_t i = 0; i < n; ++i) o[i] = static_cast<uint32_t>(i);
  return o;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("identity propagation reproduces the pool") {
  auto pool = random_pool(41, 25, 3);
  const auto model = make_identity_model(pool.dims());
  const auto order = random_reorder(pool, 9).order();
  const auto out = propagate(pool, order, model, pool.size());
  CHECK(out.q == pool.dims());
  CHECK(out.evaluated() == pool.size());
  CHECK(out.failed() == 0);
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = 0; j < pool.dims(); ++j) CHECK(out.at(i, j) == pool.at(i, j));
}

TEST_CASE("budget zero evaluates nothing") {
  auto pool = random_pool(42, 10, 2);
  const auto out = propagate(pool, natural_order(10), make_identity_model(2), 0);
  CHECK(out.evaluated() == 0);
  CHECK_THROWS_AS(output_prefix_manhattan(out, natural_order(10), 5), std::invalid_argument);
}

TEST_CASE("output rows are keyed by original index, not propagation order") {
  auto pool = random_pool(43, 30, 2);
  const auto model = make_surrogate_model(2);
  const auto a = propagate(pool, random_reorder(pool, 1).order(), model, pool.size());
  const auto b = propagate(pool, random_reorder(pool, 2).order(), model, pool.size());
  CHECK(a.values == b.values);
}

TEST_CASE("surrogate model is nonlinear and deterministic") {
  auto pool = random_pool(44, 5, 4);
  const auto model = make_surrogate_model(4);
  const auto r1 = model.eval(pool.row(0), 0);
  const auto r2 = model.eval(pool.row(0), 0);
  CHECK(r1.values == r2.values);
  // not the identity
  bool differs = false;
  for (size_t j = 0; j < 4; ++j) differs |= r1.values[j] != pool.at(0, j);
  CHECK(differs);
}

TEST_CASE("resumed propagation equals a direct full run bit for bit") {
  auto pool = random_pool(45, 20, 4);
  const auto model = make_surrogate_model(4);
  const auto order = random_reorder(pool, 3).order();
  const auto partial = propagate(pool, order, model, 8);
  CHECK(partial.evaluated() == 8);
  const auto resumed = propagate(pool, order, model, pool.size(), &partial);
  const auto direct = propagate(pool, order, model, pool.size());
  CHECK(resumed.values == direct.values);
  CHECK(resumed.evaluated() == pool.size());

  auto wrong = partial;
  wrong.pool_fingerprint ^= 1;
  CHECK_THROWS_AS(propagate(pool, order, model, pool.size(), &wrong), ConsistencyError);
}

TEST_CASE("model failures are flagged, counted, and excluded from distances") {
  auto pool = random_pool(46, 12, 2);
  Model flaky = make_identity_model(2);
  flaky.name = "flaky";
  flaky.eval = [](std::span<const double> sample, size_t index) {
    if (index % 3 == 0) throw std::runtime_error("synthetic failure");
    return ModelOutput{{sample.begin(), sample.end()}, ""};
  };
  const auto order = natural_order(12);
  const auto out = propagate(pool, order, flaky, 12);
  CHECK(out.failed() == 4);
  CHECK(out.evaluated() == 12);
  for (size_t i = 0; i < 12; ++i) {
    if (i % 3 == 0) {
      CHECK(out.status[i] == RowStatus::Failed);
      CHECK(out.flags[i].rfind("error:", 0) == 0);
      CHECK(std::isnan(out.at(i, 0)));
    } else {
      CHECK(out.status[i] == RowStatus::Ok);
    }
  }
  // reference set = the 8 surviving rows; a prefix of all of them gives 0
  std::vector<uint32_t> survivors;
  for (uint32_t i = 0; i < 12; ++i)
    if (i % 3 != 0) survivors.push_back(i);
  std::vector<uint32_t> full_order = survivors;
  for (uint32_t i = 0; i < 12; ++i)
    if (i % 3 == 0) full_order.push_back(i);
  CHECK(output_prefix_manhattan(out, full_order, survivors.size()) == 0.0);
}

TEST_CASE("output convergence with the identity model equals the input curve") {
  auto pool = random_pool(47, 50, 3);
  const auto outputs = propagate(pool, natural_order(50), make_identity_model(3), 50);
  const std::vector<size_t> cps{5, 10, 25, 50};

  std::vector<std::vector<uint32_t>> orders;
  for (uint32_t r = 0; r < 4; ++r) orders.push_back(random_reorder(pool, 70, r).order());

  const auto curve = output_convergence_curve(outputs, orders, cps, "random", 0);
  for (size_t r = 0; r < orders.size(); ++r)
    for (size_t c = 0; c < cps.size(); ++c)
      CHECK(curve.replicate_curves[r][c] == prefix_manhattan(pool, orders[r], cps[c]));
  // m = n checkpoint is exactly zero
  for (size_t r = 0; r < orders.size(); ++r) CHECK(curve.replicate_curves[r].back() == 0.0);
}

TEST_CASE("phase-field model smoke run: 8 samples, q = 5") {
  const auto priors = default_demo_priors();
  auto pool = generate_pool(priors, 8, 321);
  PhaseFieldParams base;
  base.grid_n = 32;
  base.steps = 40;
  base.dt = 0.25;
  const auto model = make_phasefield_model(base, 99);
  const auto out = propagate(pool, natural_order(8), model, 8, nullptr, 4);
  CHECK(out.n == 8);
  CHECK(out.q == kQoIDim);
  CHECK(out.failed() == 0);
  for (size_t i = 0; i < 8; ++i) {
    CHECK(out.at(i, 0) + out.at(i, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.at(i, 4) > 0.0);
    CHECK(out.at(i, 4) <= base.domain_l);
  }
  // order independence holds for the seeded noise streams as well
  const auto out2 = propagate(pool, random_reorder(pool, 1).order(), model, 8, nullptr, 2);
  CHECK(out.values == out2.values);
}

TEST_CASE("phase-field model rejects pools that are not 4-D") {
  auto pool = random_pool(48, 6, 3);
  PhaseFieldParams base;
  base.grid_n = 32;
  base.steps = 5;
  const auto model = make_phasefield_model(base, 0);
  const auto out = propagate(pool, natural_order(6), model, 6);
  CHECK(out.failed() == 6);  // every row flagged, nothing thrown
}

TEST_CASE("batch size sweep shapes") {
  auto pool = random_pool(49, 40, 2);
  const std::vector<size_t> sizes{5, 10, 40};
  const std::vector<size_t> cps{10, 20, 40};
  const auto report = batch_size_sweep(pool, sizes, 6, 3, cps, 2024, 2, true);
  REQUIRE(report.curves.size() == 4);  // three batch curves + random
  CHECK(report.curves[0].batch_size == 5);
  CHECK(report.curves[1].batch_size == 10);
  CHECK(report.curves[2].batch_size == 40);
  CHECK(report.curves[3].policy == "random");
  for (const auto& c : report.curves) {
    CHECK(c.replicates() == 3);
    for (double m : c.mean) CHECK(m >= 0.0);
    CHECK(c.mean.back() == 0.0);  // final checkpoint m = n
  }
  // sizes = [n] degenerates to a single unevaluated iteration
  const std::vector<size_t> only_n{40};
  const std::vector<size_t> last{40};
  const auto degenerate = batch_size_sweep(pool, only_n, 3, 2, last, 1, 1, false);
  REQUIRE(degenerate.curves.size() == 1);
  CHECK(degenerate.curves[0].mean[0] == 0.0);
}

TEST_CASE("QoI CSV round-trip with pending and failed rows") {
  auto pool = random_pool(50, 10, 2);
  Model flaky = make_identity_model(2);
  flaky.eval = [](std::span<const double> sample, size_t index) {
    if (index == 2) throw std::runtime_error("boom");
    return ModelOutput{{sample.begin(), sample.end()}, index == 3 ? "note" : ""};
  };
  const auto out = propagate(pool, natural_order(10), flaky, 7);
  const auto path = temp_path("mcr_qoi_roundtrip.csv");
  write_qoi_csv(out, path);

  const auto back = read_qoi_csv(path);
  CHECK(back.n == out.n);
  CHECK(back.q == out.q);
  CHECK(back.pool_fingerprint == pool.fingerprint());
  for (size_t i = 0; i < out.n; ++i) {
    CHECK(back.status[i] == out.status[i]);
    CHECK(back.flags[i] == out.flags[i]);
    if (out.status[i] == RowStatus::Ok)
      for (size_t j = 0; j < out.q; ++j) CHECK(back.at(i, j) == out.at(i, j));
  }
  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());
  CHECK_THROWS_AS(read_qoi_csv(path), IoError);
}

TEST_CASE("model JSON specs") {
  CHECK(model_from_json(nlohmann::json::parse(R"({"name":"identity"})"), 3).out_dim == 3);
  CHECK(model_from_json(nlohmann::json::parse(R"({"name":"surrogate"})"), 2).name ==
        "surrogate");
  const auto pf = model_from_json(
      nlohmann::json::parse(R"({"name":"phasefield","grid_n":32,"steps":10})"), 4);
  CHECK(pf.out_dim == kQoIDim);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"name":"nope"})"), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(R"({"name":"phasefield","grid_n":33})"), 4),
      std::invalid_argument);
}
