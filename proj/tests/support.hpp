#pragma once
// Random draws shared by the property tests.
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "maboost/dataset.hpp"

namespace testing {

struct Draws {
  maboost::SplitMix64 gen;
  explicit Draws(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) { return gen.uniform(lo, hi); }
  std::size_t dim(std::size_t lo = 2, std::size_t hi = 6) { return lo + gen.below(hi - lo + 1); }

  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  std::vector<double> positive(std::size_t n, double log_lo = -3.0, double log_hi = 2.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(uniform(log_lo, log_hi));
    return v;
  }
  std::vector<double> simplex(std::size_t n) {
    auto v = positive(n);
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= s;
    return v;
  }
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace testing
