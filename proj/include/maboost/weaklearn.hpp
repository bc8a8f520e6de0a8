#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maboost/dataset.hpp"

namespace maboost {

/// Decision stump h(x) = polarity * sign(x[feature] - threshold) with
/// sign(0) = +1. A threshold of -inf gives the constant hypothesis `polarity`.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int operator()(std::span<const double> x) const {
    return x[feature] - threshold >= 0.0 ? polarity : -polarity;
  }

  bool operator==(const Stump&) const = default;
};

struct StumpFit {
  Stump stump;
  double edge = 0.0;  ///< gamma = -w^T d >= 0
};

/// Exhaustive stump search over every feature and every midpoint between
/// consecutive distinct values, plus the constant stump. Sort orders are
/// computed once so repeated calls cost O(N d).
///
/// Among stumps with equal |edge| the lowest feature index wins, then the
/// lowest threshold; polarity is chosen so the edge is non-negative.
class StumpLearner {
 public:
  explicit StumpLearner(const Dataset& data);

  StumpFit fit(std::span<const double> w) const;

 private:
  const Dataset* data_;
  std::vector<std::vector<std::size_t>> order_;  // per feature, ascending value
};

/// One-shot convenience wrapper around StumpLearner.
StumpFit train_stump(const Dataset& data, std::span<const double> w);

/// d_i = -a_i h(x_i).
std::vector<double> loss_vector(const Dataset& data, const Stump& h);

/// gamma = -w^T d.
double edge(std::span<const double> w, std::span<const double> d);

}  // namespace maboost
