#pragma once

// Independent numeric reference solvers used by the test and bench suites.
// Nothing here shares code with the production projections or stump search:
// each routine attacks the defining optimization problem directly.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "maboost/dataset.hpp"
#include "maboost/geometry.hpp"
#include "maboost/weaklearn.hpp"

namespace maboost::oracle {

/// argmin B_R(w, z) over {sum w = 1, 0 <= w_i <= caps_i} by pairwise
/// coordinate descent: repeatedly move mass between two coordinates to the
/// exact 1-D optimum (found by bisection on the derivative). Pass +inf caps
/// for the plain simplex.
std::vector<double> bregman_capped_simplex(const Geometry& g, std::span<const double> z,
                                           std::span<const double> caps);

/// argmin_{y >= 0} 1/2 (y - z)^2 + lambda y per coordinate, by golden-section search.
std::vector<double> orthant_l1(std::span<const double> z, double lambda);

/// argmin over [0,1]^N of the generalized KL divergence to z, by projected
/// coordinate-wise golden-section search.
std::vector<double> hypercube_entropic(std::span<const double> z);

/// Golden-section minimizer of a unimodal function on [lo, hi].
template <class T = double, class F>
T golden_section(F&& f, T lo, T hi, int iterations = 400) {
  const T inv_phi = (T(std::sqrt(5.0)) - 1) / 2;
  auto abs = [](T v) { return v < 0 ? -v : v; };
  const T tol = T(std::numeric_limits<double>::epsilon()) * T(std::numeric_limits<double>::epsilon());
  T a = lo;
  T b = hi;
  T c = b - inv_phi * (b - a);
  T d = a + inv_phi * (b - a);
  auto fc = f(c);
  auto fd = f(d);
  for (int i = 0; i < iterations && b - a > tol * (1 + abs(a) + abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

struct BruteStump {
  Stump stump;
  double edge = 0.0;
};

/// Enumerates every feature, every threshold in {-inf} U {midpoints of all
/// value pairs}, and both polarities; evaluates each edge from its definition.
/// O(d N^3), so only for small N.
BruteStump best_stump(const Dataset& data, std::span<const double> w);

}  // namespace maboost::oracle
