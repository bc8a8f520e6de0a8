#include "maboost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace maboost::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d/dx of the separable coordinate potential phi_i(x) = B_R restricted to x.
double coordinate_slope(const Geometry& g, double x, double z) {
  if (g.is_entropic()) return x <= 0.0 ? -kInf : std::log(x / z);
  return x - z;
}

}  // namespace

std::vector<double> bregman_capped_simplex(const Geometry& g, std::span<const double> z,
                                           std::span<const double> caps) {
  const std::size_t n = z.size();
  std::vector<double> upper(n);
  double total_upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    upper[i] = std::min(caps[i], 1.0);
    total_upper += upper[i];
  }
  // Feasible interior start.
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = upper[i] / total_upper;
  if (n == 1) return w;

  for (int sweep = 0; sweep < 20000; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Minimize phi_i(a) + phi_j(s - a) over a; the derivative
        // slope_i(a) - slope_j(s - a) is increasing in a.
        const double s = w[i] + w[j];
        double lo = std::max(0.0, s - upper[j]);
        double hi = std::min(upper[i], s);
        if (hi <= lo) continue;
        auto slope = [&](double a) { return coordinate_slope(g, a, z[i]) - coordinate_slope(g, s - a, z[j]); };
        double a;
        if (slope(lo) >= 0.0) {
          a = lo;
        } else if (slope(hi) <= 0.0) {
          a = hi;
        } else {
          for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (slope(mid) < 0.0) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          a = 0.5 * (lo + hi);
        }
        moved = std::max(moved, std::abs(a - w[i]));
        w[i] = a;
        w[j] = s - a;
      }
    }
    if (moved < 1e-15) break;
  }
  return w;
}

__extension__ typedef __float128 quad;

std::vector<double> orthant_l1(std::span<const double> z, double lambda) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    // Quad precision: a flat 1-D minimum only resolves to sqrt(eps) of the
    // working type.
    const quad zi = z[i];
    auto f = [&](quad v) { return (v - zi) * (v - zi) / 2 + quad(lambda) * v; };
    const quad hi = quad(std::max(0.0, z[i]) + 1.0);
    quad v = golden_section<quad>(f, quad(0), hi);
    if (f(0) <= f(v)) v = 0;
    y[i] = static_cast<double>(v);
  }
  return y;
}

std::vector<double> hypercube_entropic(std::span<const double> z) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    auto f = [&](double v) { return (v <= 0.0 ? 0.0 : v * std::log(v / zi)) - v + zi; };
    double v = golden_section(f, 0.0, 1.0);
    if (f(1.0) <= f(v)) v = 1.0;
    y[i] = v;
  }
  return y;
}

BruteStump best_stump(const Dataset& data, std::span<const double> w) {
  BruteStump best{Stump{0, -kInf, 1}, -kInf};
  auto consider = [&](const Stump& h) {
    double gamma = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) gamma += w[i] * data.label(i) * h(data.row(i));
    if (gamma > best.edge) best = {h, gamma};
  };
  for (std::size_t j = 0; j < data.dim(); ++j) {
    std::set<double> values;
    for (std::size_t i = 0; i < data.size(); ++i) values.insert(data.feature(i, j));
    std::vector<double> thresholds{-kInf};
    for (double a : values) {
      for (double b : values) {
        if (a < b) thresholds.push_back(a + (b - a) / 2.0);
      }
    }
    for (double th : thresholds) {
      consider(Stump{j, th, 1});
      consider(Stump{j, th, -1});
    }
  }
  return best;
}

}  // namespace maboost::oracle
