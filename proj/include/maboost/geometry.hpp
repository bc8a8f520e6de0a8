#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace maboost {

enum class GeometryKind { Quadratic, NegativeEntropy };

std::string_view to_string(GeometryKind kind);
GeometryKind parse_geometry_kind(std::string_view name);

/// A Bregman geometry: the potential, its mirror map and the constant L
/// bounding the squared dual norm of any loss vector with entries in [-1, 1].
///
/// Quadratic:        R(x) = 1/2 |x|_2^2, paired with l2/l2, L = N.
/// NegativeEntropy:  R(x) = sum x_i log x_i, paired with l1/linf, L = 1.
///
/// Both potentials are 1-strongly convex w.r.t. their paired norm (entropy
/// only on the simplex).
struct Geometry {
  GeometryKind kind = GeometryKind::NegativeEntropy;
  double dual_norm_sq_bound = 1.0;

  static Geometry quadratic(std::size_t n);
  static Geometry negative_entropy();
  static Geometry make(GeometryKind kind, std::size_t n);

  bool is_entropic() const { return kind == GeometryKind::NegativeEntropy; }
};

/// R(x). Entropy uses 0 log 0 = 0, so zero coordinates are allowed.
double potential(const Geometry& g, std::span<const double> x);

/// Gradient of the potential. Entropy requires strictly positive input.
std::vector<double> mirror_map(const Geometry& g, std::span<const double> x);

/// Inverse of mirror_map; defined on all of R^N.
std::vector<double> inverse_mirror_map(const Geometry& g, std::span<const double> theta);

/// B_R(x, y) = R(x) - R(y) - <grad R(y), x - y>.
///
/// For entropy this is the generalized KL divergence
/// sum x_i log(x_i / y_i) - sum x_i + sum y_i, which is plain KL on the
/// simplex. Requires y strictly positive under entropy.
double divergence(const Geometry& g, std::span<const double> x, std::span<const double> y);

/// Gradient of B_R(., z) evaluated at y: grad R(y) - grad R(z).
std::vector<double> divergence_gradient(const Geometry& g, std::span<const double> y,
                                        std::span<const double> z);

/// Norm paired with the geometry (l2 or l1) and its dual (l2 or linf).
double primal_norm(const Geometry& g, std::span<const double> x);
double dual_norm(const Geometry& g, std::span<const double> x);

}  // namespace maboost
