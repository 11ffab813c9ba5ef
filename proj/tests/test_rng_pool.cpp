#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "core/errors.hpp"
#include "core/priors.hpp"
#include "core/rng.hpp"
#include "core/sample_pool.hpp"

using namespace mcr;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("random stream is reproducible for a fixed seed") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("child streams depend only on (seed, a, b)") {
  RandomStream root(7);
  root.next_u64();  // consuming the parent must not shift the children
  RandomStream c1 = root.child(3, 9);
  RandomStream c2 = RandomStream(7).child(3, 9);
  for (int i = 0; i < 100; ++i) CHECK(c1.next_u64() == c2.next_u64());
  RandomStream other = root.child(3, 10);
  bool all_equal = true;
  RandomStream c3 = RandomStream(7).child(3, 9);
  for (int i = 0; i < 100; ++i) all_equal &= (other.next_u64() == c3.next_u64());
  CHECK_FALSE(all_equal);
}

TEST_CASE("next_below covers the range uniformly enough") {
  RandomStream rng(11);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[rng.next_below(10)];
  for (int c : counts) {
    CHECK(c > draws / 10 - 600);
    CHECK(c < draws / 10 + 600);
  }
}

TEST_CASE("uniform and log-uniform stay inside their supports") {
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
    const double lu = rng.log_uniform(0.5, 4.0);
    CHECK(lu >= 0.5);
    CHECK(lu <= 4.0);
  }
}

TEST_CASE("normal sample mean within the CLT bound") {
  RandomStream rng(123);
  const size_t n = 10000;
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += rng.normal();
  const double mean = sum / static_cast<double>(n);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("truncated normal respects its window") {
  RandomStream rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.truncated_normal(0.5, 0.1, 0.3, 0.7);
    CHECK(x >= 0.3);
    CHECK(x <= 0.7);
  }
}

TEST_CASE("distribution parameter validation") {
  RandomStream rng(1);
  CHECK_THROWS_AS(rng.uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.normal(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.truncated_normal(0.0, 1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.log_uniform(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("pool construction: two points and a singleton") {
  auto pool = SamplePool::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(pool.size() == 2);
  CHECK(pool.dims() == 2);
  for (size_t j = 0; j < 2; ++j) {
    CHECK(pool.sorted(j)[0] == 0.0);
    CHECK(pool.sorted(j)[1] == 1.0);
  }
  auto single = SamplePool::from_rows({{5.0}});
  CHECK(single.size() == 1);
  CHECK(single.dims() == 1);
}

TEST_CASE("pool validation reports the offending column") {
  CHECK_THROWS_WITH_AS(SamplePool::from_rows({{1.0, std::nan("")}}),
                       doctest::Contains("column 1"), std::invalid_argument);
  CHECK_THROWS_AS(SamplePool::from_rows({{1.0, 2.0}, {3.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SamplePool(std::vector<double>{}, 0, 0), std::invalid_argument);
}

TEST_CASE("sorted views hold exactly the column multiset") {
  RandomStream rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    const size_t n = 1 + rng.next_below(40);
    const size_t d = 1 + rng.next_below(4);
    std::vector<double> data(n * d);
    for (auto& v : data) v = rng.uniform(-10.0, 10.0);
    SamplePool pool(data, n, d);
    for (size_t j = 0; j < d; ++j) {
      std::vector<double> col;
      for (size_t i = 0; i < n; ++i) col.push_back(pool.at(i, j));
      std::sort(col.begin(), col.end());
      const auto view = pool.sorted(j);
      REQUIRE(view.size() == n);
      for (size_t i = 0; i < n; ++i) CHECK(view[i] == col[i]);
      for (size_t i = 1; i < n; ++i) CHECK(view[i - 1] <= view[i]);
      // index tags point back at the right rows
      const auto idx = pool.sorted_index(j);
      for (size_t i = 0; i < n; ++i) CHECK(pool.at(idx[i], j) == view[i]);
    }
  }
}

TEST_CASE("ties in sorted views break by original index") {
  auto pool = SamplePool::from_rows({{1.0}, {1.0}, {0.5}, {1.0}});
  const auto idx = pool.sorted_index(0);
  CHECK(idx[0] == 2);
  CHECK(idx[1] == 0);
  CHECK(idx[2] == 1);
  CHECK(idx[3] == 3);
}

TEST_CASE("selection state bookkeeping stays consistent") {
  RandomStream rng(77);
  const size_t n = 30;
  std::vector<double> data(n * 2);
  for (auto& v : data) v = rng.uniform(0.0, 1.0);
  SamplePool pool(data, n, 2);
  SelectionState state(pool);
  std::set<uint32_t> seen;
  std::vector<uint32_t> shuffled(n);
  for (size_t i = 0; i < n; ++i) shuffled[i] = static_cast<uint32_t>(i);
  for (size_t i = n; i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);

  for (size_t k = 0; k < n; ++k) {
    state.pick(shuffled[k]);
    seen.insert(shuffled[k]);
    CHECK(state.picked_count() + state.remaining().size() == n);
    for (uint32_t r : state.remaining()) CHECK_FALSE(seen.count(r));
    for (size_t j = 0; j < 2; ++j) {
      const auto ps = state.picked_sorted(j);
      REQUIRE(ps.size() == k + 1);
      for (size_t i = 1; i < ps.size(); ++i) CHECK(ps[i - 1] <= ps[i]);
    }
  }
  CHECK_THROWS_AS(state.pick(shuffled[0]), std::invalid_argument);
}

TEST_CASE("generate_pool is bit-reproducible and respects priors") {
  const auto priors = std::vector<PriorSpec>{
      {PriorFamily::Uniform, {0.0, 1.0}},
      {PriorFamily::TruncatedNormal, {0.5, 0.1, 0.3, 0.7}},
  };
  auto a = generate_pool(priors, 500, 99);
  auto b = generate_pool(priors, 500, 99);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.raw() == b.raw());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.at(i, 0) >= 0.0);
    CHECK(a.at(i, 0) < 1.0);
    CHECK(a.at(i, 1) >= 0.3);
    CHECK(a.at(i, 1) <= 0.7);
  }
  auto c = generate_pool(priors, 500, 100);
  CHECK(c.fingerprint() != a.fingerprint());
}

TEST_CASE("generated normal column passes its own CLT bound") {
  const auto priors = std::vector<PriorSpec>{{PriorFamily::Normal, {0.0, 1.0}}};
  const size_t n = 10000;
  auto pool = generate_pool(priors, n, 2024);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += pool.at(i, 0);
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("pool CSV round-trip is bit-exact") {
  RandomStream rng(55);
  std::vector<double> data(60 * 3);
  for (auto& v : data) v = rng.normal() * 1e3;
  data[5] = 0.1;
  data[6] = 1e-300;
  SamplePool pool(data, 60, 3);
  const auto path = temp_path("mcr_pool_roundtrip.csv");
  write_pool_csv(pool, path);
  auto loaded = read_pool_csv(path);
  CHECK(loaded.fingerprint() == pool.fingerprint());
  CHECK(loaded.raw() == pool.raw());
  std::remove(path.c_str());
}

TEST_CASE("pool CSV rejects malformed input") {
  const auto path = temp_path("mcr_pool_bad.csv");
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("x0,x1\n1.0,oops\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_pool_csv(path), IoError);
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("a,b\n1.0,2.0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_pool_csv(path), IoError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_pool_csv(path), IoError);
}

TEST_CASE("prior JSON round-trip and validation") {
  const auto priors = default_demo_priors();
  CHECK(priors.size() == 4);
  const auto j = priors_to_json(priors);
  const auto back = priors_from_json(j);
  REQUIRE(back.size() == priors.size());
  for (size_t i = 0; i < priors.size(); ++i) {
    CHECK(back[i].family == priors[i].family);
    CHECK(back[i].params == priors[i].params);
  }
  CHECK_THROWS_AS(PriorSpec::from_json(nlohmann::json{{"family", "uniform"},
                                                      {"params", {2.0, 1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PriorSpec::from_json(nlohmann::json{{"family", "cauchy"},
                                                      {"params", {0.0, 1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_pool({}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_pool(priors, 0, 1), std::invalid_argument);
}
