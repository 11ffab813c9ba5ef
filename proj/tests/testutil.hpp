#pragma once

// Test-only oracles and statistics helpers. Everything here is independent of
// the implementation paths it is used to check: the transport oracle works on
// integer mass units, the Riemann oracle discretizes the quantile integral,
// and the greedy verifier re-sorts prefixes from scratch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "core/rng.hpp"
#include "core/sample_pool.hpp"
#include "core/wasserstein.hpp"

namespace testutil {

// Exact 1-D optimal transport cost between uniform empirical measures via the
// monotone (north-west corner) coupling on sorted inputs, computed in integer
// mass units of 1/(m*n).
inline double w1_transport_lp(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("oracle: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const uint64_t m = a.size(), n = b.size();
  uint64_t rem_a = n, rem_b = m;  // units of 1/(m*n)
  size_t i = 0, j = 0;
  long double cost = 0.0L;
  while (i < a.size() && j < b.size()) {
    const uint64_t flow = std::min(rem_a, rem_b);
    cost += static_cast<long double>(flow) * std::abs(a[i] - b[j]);
    rem_a -= flow;
    rem_b -= flow;
    if (rem_a == 0) {
      ++i;
      rem_a = n;
    }
    if (rem_b == 0) {
      ++j;
      rem_b = m;
    }
  }
  return static_cast<double>(cost / static_cast<long double>(m * n));
}

// Midpoint Riemann sum of |F_a^{-1}(u) - F_b^{-1}(u)| over a grid of u values.
inline double w1_riemann(std::vector<double> a, std::vector<double> b, size_t grid) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto quantile = [](const std::vector<double>& v, double u) {
    const size_t k = std::min(v.size() - 1, static_cast<size_t>(u * v.size()));
    return v[k];
  };
  long double sum = 0.0L;
  for (size_t g = 0; g < grid; ++g) {
    const double u = (static_cast<double>(g) + 0.5) / static_cast<double>(grid);
    sum += std::abs(quantile(a, u) - quantile(b, u));
  }
  return static_cast<double>(sum / static_cast<long double>(grid));
}

// Independent greedy reference: every iteration re-sorts the candidate prefix
// from scratch per dimension and takes the strict argmin (ties to the smallest
// original index). No incremental state, no eval_candidate.
inline std::vector<uint32_t> greedy_reference_order(const mcr::SamplePool& pool) {
  const size_t n = pool.size(), d = pool.dims();
  std::vector<uint32_t> order;
  std::vector<uint8_t> picked(n, 0);
  std::vector<double> prefix;
  for (size_t step = 0; step < n; ++step) {
    if (step == n - 1) {
      for (uint32_t i = 0; i < n; ++i)
        if (!picked[i]) {
          order.push_back(i);
          picked[i] = 1;
        }
      break;
    }
    double best_val = 0.0;
    uint32_t best_idx = 0;
    bool have = false;
    for (uint32_t cand = 0; cand < n; ++cand) {
      if (picked[cand]) continue;
      double total = 0.0;
      for (size_t j = 0; j < d; ++j) {
        prefix.clear();
        for (uint32_t i : order) prefix.push_back(pool.at(i, j));
        prefix.push_back(pool.at(cand, j));
        std::sort(prefix.begin(), prefix.end());
        total += mcr::w1_sorted(pool.sorted(j), prefix);
      }
      if (!have || total < best_val) {
        best_val = total;
        best_idx = cand;
        have = true;
      }
    }
    order.push_back(best_idx);
    picked[best_idx] = 1;
  }
  return order;
}

// Modified Lentz continued fraction for the regularized incomplete beta.
inline double betacf(double a, double b, double x) {
  const double eps = 3e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// P(T <= t) for Student's t with df degrees of freedom.
inline double student_cdf(double t, double df) {
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_less = 1.0;  // P-value for H1: mean(xs) < mean(ys)
};

inline WelchResult welch_one_sided(std::span<const double> xs, std::span<const double> ys) {
  auto stats = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [mx, vx] = stats(xs);
  const auto [my, vy] = stats(ys);
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  const double se2 = vx / nx + vy / ny;
  WelchResult r;
  r.t = (mx - my) / std::sqrt(se2);
  r.df = se2 * se2 / ((vx / nx) * (vx / nx) / (nx - 1.0) + (vy / ny) * (vy / ny) / (ny - 1.0));
  r.p_less = student_cdf(r.t, r.df);
  return r;
}

inline std::vector<double> random_multiset(mcr::RandomStream& rng, size_t size,
                                           double lo = -5.0, double hi = 5.0) {
  std::vector<double> v(size);
  for (auto& x : v) x = rng.uniform(lo, hi);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace testutil
