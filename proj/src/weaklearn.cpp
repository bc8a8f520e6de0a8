#include "maboost/weaklearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maboost/error.hpp"

namespace maboost {
namespace {

// Midpoint strictly above lo so that lo falls on the negative side.
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

}  // namespace

StumpLearner::StumpLearner(const Dataset& data) : data_(&data), order_(data.dim()) {
  for (std::size_t j = 0; j < data.dim(); ++j) {
    auto& ord = order_[j];
    ord.resize(data.size());
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t a, std::size_t b) { return data.feature(a, j) < data.feature(b, j); });
  }
}

StumpFit StumpLearner::fit(std::span<const double> w) const {
  const Dataset& data = *data_;
  if (w.size() != data.size()) {
    throw UsageError("weight vector has " + std::to_string(w.size()) + " entries for " +
                     std::to_string(data.size()) + " samples");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) total += w[i] * data.label(i);

  // score(theta) = sum_i w_i a_i sign(x_i - theta) = total - 2 * (mass below theta)
  Stump best{0, -std::numeric_limits<double>::infinity(), 1};
  double best_abs = std::abs(total);
  double best_score = total;
  for (std::size_t j = 0; j < data.dim(); ++j) {
    const auto& ord = order_[j];
    double below = 0.0;
    for (std::size_t k = 0; k + 1 < ord.size(); ++k) {
      below += w[ord[k]] * data.label(ord[k]);
      const double lo = data.feature(ord[k], j);
      const double hi = data.feature(ord[k + 1], j);
      if (!(lo < hi)) continue;
      const double score = total - 2.0 * below;
      if (std::abs(score) > best_abs) {
        best_abs = std::abs(score);
        best_score = score;
        best = Stump{j, midpoint(lo, hi), 1};
      }
    }
  }
  best.polarity = best_score >= 0.0 ? 1 : -1;

  // Report the edge from its definition rather than the sweep's running sums.
  double gamma = edge(w, loss_vector(data, best));
  if (gamma < 0.0) {
    best.polarity = -best.polarity;
    gamma = -gamma;
  }
  return {best, gamma};
}

StumpFit train_stump(const Dataset& data, std::span<const double> w) { return StumpLearner(data).fit(w); }

std::vector<double> loss_vector(const Dataset& data, const Stump& h) {
  std::vector<double> d(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) d[i] = -static_cast<double>(data.label(i) * h(data.row(i)));
  return d;
}

double edge(std::span<const double> w, std::span<const double> d) {
  if (w.size() != d.size()) {
    throw UsageError("edge: weight length " + std::to_string(w.size()) + " != loss length " +
                     std::to_string(d.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s -= w[i] * d[i];
  return s;
}

}  // namespace maboost
