#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/rng.hpp"
#include "core/sample_pool.hpp"
#include "core/wasserstein.hpp"
#include "testutil.hpp"

using namespace mcr;

namespace {

SamplePool pool_1d(std::vector<double> values) {
  std::vector<std::vector<double>> rows;
  for (double v : values) rows.push_back({v});
  return SamplePool::from_rows(rows);
}

}  // namespace

TEST_CASE("w1_sorted on the worked examples") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(w1_sorted(a, a) == 0.0);

  const std::vector<double> p{0.0}, q{5.0};
  CHECK(w1_sorted(p, q) == doctest::Approx(5.0).epsilon(1e-15));

  const std::vector<double> u{0.0, 1.0}, v{0.0, 0.5, 1.0};
  const double d = w1_sorted(u, v);
  CHECK(d == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  // independent oracles for the same instance
  CHECK(std::abs(d - testutil::w1_riemann({0.0, 1.0}, {0.0, 0.5, 1.0}, 1000000)) < 1e-6);
  CHECK(std::abs(d - testutil::w1_transport_lp({0.0, 1.0}, {0.0, 0.5, 1.0})) < 1e-12);

  for (double c : {0.5, -3.0, 1048576.0}) {
    const std::vector<double> b{c, c + 1.0};
    CHECK(w1_sorted(u, b) == doctest::Approx(std::abs(c)).epsilon(1e-13));
  }
}

TEST_CASE("w1_sorted rejects empty input") {
  const std::vector<double> a{1.0};
  CHECK_THROWS_AS(w1_sorted({}, a), std::invalid_argument);
  CHECK_THROWS_AS(w1_sorted(a, {}), std::invalid_argument);
}

TEST_CASE("w1_sorted matches the exhaustive transport oracle") {
  RandomStream rng(1001);
  for (int rep = 0; rep < 1000; ++rep) {
    const size_t m = 1 + rng.next_below(12);
    const size_t n = 1 + rng.next_below(12);
    const auto a = testutil::random_multiset(rng, m);
    const auto b = testutil::random_multiset(rng, n);
    const double got = w1_sorted(a, b);
    const double expected = testutil::w1_transport_lp(a, b);
    CHECK(std::abs(got - expected) < 1e-12);
  }
}

TEST_CASE("metric axioms on random multisets") {
  RandomStream rng(2002);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto a = testutil::random_multiset(rng, 1 + rng.next_below(12));
    const auto b = testutil::random_multiset(rng, 1 + rng.next_below(12));
    const auto c = testutil::random_multiset(rng, 1 + rng.next_below(12));
    const double ab = w1_sorted(a, b);
    const double ba = w1_sorted(b, a);
    const double ac = w1_sorted(a, c);
    const double bc = w1_sorted(b, c);
    CHECK(ab >= 0.0);
    CHECK(ab == ba);                    // symmetry is exact
    CHECK(w1_sorted(a, a) == 0.0);      // identity is exact
    CHECK(ac <= ab + bc + 1e-12);       // triangle inequality
  }
}

TEST_CASE("translation (exact on dyadic grids) and positive homogeneity") {
  RandomStream rng(3003);
  for (int rep = 0; rep < 200; ++rep) {
    // dyadic values, so shifted sums are exact in binary floating point
    auto dyadic = [&](size_t size) {
      std::vector<double> v(size);
      for (auto& x : v) x = static_cast<double>(rng.next_below(4096)) / 1024.0;
      std::sort(v.begin(), v.end());
      return v;
    };
    auto a = dyadic(1 + rng.next_below(10));
    auto b = dyadic(1 + rng.next_below(10));
    const double base = w1_sorted(a, b);

    const double shift = static_cast<double>(rng.next_below(256)) / 16.0;
    auto as = a, bs = b;
    for (auto& x : as) x += shift;
    for (auto& x : bs) x += shift;
    CHECK(w1_sorted(as, bs) == base);

    const double lambda = rng.uniform(0.1, 8.0);
    auto al = a, bl = b;
    for (auto& x : al) x *= lambda;
    for (auto& x : bl) x *= lambda;
    const double scaled = w1_sorted(al, bl);
    CHECK(scaled == doctest::Approx(lambda * base).epsilon(1e-12));
  }
}

TEST_CASE("wass_vector: picked = all gives zero; single pick worked example") {
  auto pool = pool_1d({0.0, 0.5, 1.0});
  SelectionState all(pool);
  for (uint32_t i = 0; i < 3; ++i) all.pick(i);
  const auto wv = wass_vector(pool, all);
  CHECK(wv.manhattan == 0.0);
  CHECK(wv.w[0] == 0.0);

  SelectionState one(pool);
  one.pick(1);  // value 0.5
  CHECK(wass_vector(pool, one).manhattan == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  SelectionState empty(pool);
  CHECK_THROWS_AS(wass_vector(pool, empty), std::invalid_argument);
}

TEST_CASE("wass_vector dimensions are independent") {
  // dim 0 of the picked set matches the pool exactly; dim 1 differs
  auto pool = SamplePool::from_rows({{0.0, 0.0}, {1.0, 5.0}, {0.0, 9.0}, {1.0, 2.0}});
  SelectionState state(pool);
  state.pick(0);
  state.pick(1);  // dim-0 multiset {0,1} vs pool {0,0,1,1}: same empirical CDF
  const auto wv = wass_vector(pool, state);
  CHECK(wv.w[0] == 0.0);
  CHECK(wv.w[1] > 0.0);
}

TEST_CASE("eval_candidate worked examples") {
  auto pool = pool_1d({0.0, 1.0});
  SelectionState state(pool);
  CHECK(eval_candidate(pool, state, 0) == doctest::Approx(0.5).epsilon(1e-15));
  state.pick(0);
  CHECK(eval_candidate(pool, state, 1) == 0.0);
  CHECK_THROWS_AS(eval_candidate(pool, state, 0), std::invalid_argument);
}

TEST_CASE("eval_candidate equals a real insertion, bit for bit") {
  RandomStream rng(4004);
  for (int rep = 0; rep < 50; ++rep) {
    const size_t n = 2 + rng.next_below(30);
    const size_t d = 1 + rng.next_below(4);
    std::vector<double> data(n * d);
    for (auto& v : data) v = rng.uniform(-3.0, 3.0);
    if (rep % 3 == 0) data[0] = data[(n - 1) * d];  // exercise duplicate values
    SamplePool pool(data, n, d);
    SelectionState state(pool);
    const size_t pre_picks = rng.next_below(n - 1);
    for (size_t k = 0; k < pre_picks; ++k) {
      const auto rem = state.remaining();
      state.pick(rem[rng.next_below(rem.size())]);
    }
    const auto rem = state.remaining();
    for (uint32_t cand : rem) {
      const double predicted = eval_candidate(pool, state, cand);
      SelectionState copy(pool);
      for (uint32_t i : state.picked()) copy.pick(i);
      copy.pick(cand);
      CHECK(predicted == wass_vector(pool, copy).manhattan);
    }
  }
}

TEST_CASE("eval_batch worked examples and consistency") {
  auto pool = pool_1d({0.0, 0.5, 1.0});
  SelectionState state(pool);
  EvalScratch scratch;

  // batch holding the samples with values {0, 1} reproduces the 1/6 instance
  const std::vector<uint32_t> b02{0, 2};
  CHECK(eval_batch(pool, state, b02, scratch) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

  // whole remainder completes the pool
  const std::vector<uint32_t> all{0, 1, 2};
  CHECK(eval_batch(pool, state, all, scratch) == 0.0);

  // singleton batch agrees with eval_candidate
  for (uint32_t i : {0u, 1u, 2u}) {
    const std::vector<uint32_t> single{i};
    CHECK(eval_batch(pool, state, single, scratch) == eval_candidate(pool, state, i));
  }

  const std::vector<uint32_t> dup{0, 0};
  CHECK_THROWS_AS(eval_batch(pool, state, dup, scratch), std::invalid_argument);
  CHECK_THROWS_AS(eval_batch(pool, state, {}, scratch), std::invalid_argument);
  state.pick(0);
  const std::vector<uint32_t> overlap{0, 1};
  CHECK_THROWS_AS(eval_batch(pool, state, overlap, scratch), std::invalid_argument);
}

TEST_CASE("candidate evaluation performs no full re-sort") {
  RandomStream rng(5005);
  const size_t n = 1000, d = 3;
  std::vector<double> data(n * d);
  for (auto& v : data) v = rng.normal();
  SamplePool pool(data, n, d);
  SelectionState state(pool);
  for (size_t k = 0; k < n / 2; ++k) {
    const auto rem = state.remaining();
    state.pick(rem[rng.next_below(rem.size())]);
  }
  const uint32_t cand = state.remaining()[0];
  detail::w1_merge_steps = 0;
  eval_candidate(pool, state, cand);
  const uint64_t steps = detail::w1_merge_steps;
  const size_t m = state.picked_count();
  // linear merge: at most d*(n + m + 1) loop iterations, far below d*n*log2(n)
  CHECK(steps <= d * (n + m + 2));
  CHECK(steps > 0);
}

TEST_CASE("prefix distance agrees with incremental state") {
  RandomStream rng(6006);
  const size_t n = 40, d = 2;
  std::vector<double> data(n * d);
  for (auto& v : data) v = rng.uniform(0.0, 1.0);
  SamplePool pool(data, n, d);
  std::vector<uint32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
  for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);

  SelectionState state(pool);
  for (size_t m = 1; m <= n; ++m) {
    state.pick(order[m - 1]);
    std::vector<double> w;
    const double got = prefix_manhattan(pool, order, m, &w);
    const auto expect = wass_vector(pool, state);
    CHECK(got == doctest::Approx(expect.manhattan).epsilon(1e-14));
    REQUIRE(w.size() == d);
    for (size_t j = 0; j < d; ++j) CHECK(w[j] == doctest::Approx(expect.w[j]).epsilon(1e-14));
  }
  CHECK(prefix_manhattan(pool, order, n) == 0.0);
}

TEST_CASE("norm aggregation and objective scaling") {
  const std::vector<double> w{3.0, 4.0};
  CHECK(aggregate(w, Norm::L1) == 7.0);
  CHECK(aggregate(w, Norm::L2) == doctest::Approx(5.0));
  CHECK(aggregate(w, Norm::LInf) == 4.0);

  Objective scaled;
  scaled.scale = {3.0, 4.0};
  CHECK(scaled(w) == doctest::Approx(2.0));
  Objective linf{Norm::LInf, {}};
  CHECK(linf(w) == 4.0);
  Objective bad;
  bad.scale = {1.0};
  CHECK_THROWS_AS(bad(w), std::invalid_argument);
}
