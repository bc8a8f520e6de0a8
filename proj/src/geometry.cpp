#include "maboost/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maboost/error.hpp"

namespace maboost {
namespace {

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw UsageError("vector length mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

void require_non_negative(std::span<const double> x) {
  for (double v : x) {
    if (!(v >= 0.0)) throw DomainError("negative-entropy potential requires non-negative input");
  }
}

void require_positive(std::span<const double> x) {
  for (double v : x) {
    if (!(v > 0.0)) throw DomainError("entropic mirror map requires strictly positive input");
  }
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

std::string_view to_string(GeometryKind kind) {
  return kind == GeometryKind::Quadratic ? "quadratic" : "entropy";
}

GeometryKind parse_geometry_kind(std::string_view name) {
  if (name == "quadratic") return GeometryKind::Quadratic;
  if (name == "entropy") return GeometryKind::NegativeEntropy;
  throw ConfigError("unknown geometry '" + std::string(name) + "' (expected quadratic|entropy)");
}

Geometry Geometry::quadratic(std::size_t n) {
  if (n == 0) throw ConfigError("quadratic geometry needs N >= 1");
  return {GeometryKind::Quadratic, static_cast<double>(n)};
}

Geometry Geometry::negative_entropy() { return {GeometryKind::NegativeEntropy, 1.0}; }

Geometry Geometry::make(GeometryKind kind, std::size_t n) {
  return kind == GeometryKind::Quadratic ? quadratic(n) : negative_entropy();
}

double potential(const Geometry& g, std::span<const double> x) {
  double r = 0.0;
  if (g.is_entropic()) {
    require_non_negative(x);
    for (double v : x) r += xlogx(v);
  } else {
    for (double v : x) r += 0.5 * v * v;
  }
  return r;
}

std::vector<double> mirror_map(const Geometry& g, std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (g.is_entropic()) {
    require_positive(x);
    for (double& v : out) v = 1.0 + std::log(v);
  }
  return out;
}

std::vector<double> inverse_mirror_map(const Geometry& g, std::span<const double> theta) {
  std::vector<double> out(theta.begin(), theta.end());
  if (g.is_entropic()) {
    for (double& v : out) v = std::exp(v - 1.0);
  }
  return out;
}

double divergence(const Geometry& g, std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y);
  double b = 0.0;
  if (g.is_entropic()) {
    require_non_negative(x);
    require_positive(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      b += (x[i] == 0.0 ? 0.0 : x[i] * std::log(x[i] / y[i])) - x[i] + y[i];
    }
    // Rounding can leave a tiny negative value when x == y.
    return std::max(b, 0.0);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    b += 0.5 * diff * diff;
  }
  return b;
}

std::vector<double> divergence_gradient(const Geometry& g, std::span<const double> y,
                                        std::span<const double> z) {
  require_same_size(y, z);
  std::vector<double> grad(y.size());
  if (g.is_entropic()) {
    require_positive(z);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] < 0.0) throw DomainError("entropic divergence gradient requires y >= 0");
      grad[i] = std::log(y[i] / z[i]);  // -inf at y_i = 0
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) grad[i] = y[i] - z[i];
  }
  return grad;
}

double primal_norm(const Geometry& g, std::span<const double> x) {
  double s = 0.0;
  if (g.is_entropic()) {
    for (double v : x) s += std::abs(v);
    return s;
  }
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dual_norm(const Geometry& g, std::span<const double> x) {
  if (g.is_entropic()) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace maboost
