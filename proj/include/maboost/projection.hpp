#pragma once

#include <span>
#include <variant>
#include <vector>

#include "maboost/geometry.hpp"

namespace maboost {

struct Simplex {};

/// {w : sum w = 1, 0 <= w_i <= cap}; cap = k/N for smooth boosting.
struct CappedSimplex {
  double cap = 1.0;
};

/// Simplex with per-coordinate upper bounds; +inf caps never bind.
struct MixedCaps {
  std::vector<double> caps;
};

/// y >= 0 with an l1 penalty of weight lambda (the SparseBoost step).
struct PositiveOrthant {
  double lambda = 0.0;
};

struct UnitHypercube {};

using ConstraintSet = std::variant<Simplex, CappedSimplex, MixedCaps, PositiveOrthant, UnitHypercube>;

/// Throws ConfigError when the set is empty for dimension n.
void check_feasible(const ConstraintSet& set, std::size_t n);

/// Bregman projection onto the probability simplex. Entropy: normalization.
/// Quadratic: sort-and-threshold Euclidean projection.
std::vector<double> project_simplex(const Geometry& g, std::span<const double> z);

/// Bregman projection onto the capped simplex {sum w = 1, 0 <= w_i <= cap}.
std::vector<double> project_capped_simplex(const Geometry& g, std::span<const double> z, double cap);

/// Bregman projection onto the simplex with per-coordinate caps.
std::vector<double> project_mixed(const Geometry& g, std::span<const double> z,
                                  std::span<const double> caps);

/// argmin_{y >= 0} 1/2 |y - z|^2 + lambda |y|_1, i.e. max(0, z_i - lambda).
std::vector<double> project_orthant_l1(std::span<const double> z, double lambda);

/// Projection onto [0,1]^N under R(w) = sum w log w - w: y_i = min(1, z_i).
std::vector<double> project_hypercube_entropic(std::span<const double> z);

/// Approximate projection Pi_S(Pi_K(z)). Only K = UnitHypercube, S = Simplex
/// is supported.
std::vector<double> project_double(const Geometry& g, std::span<const double> z,
                                   const ConstraintSet& outer, const ConstraintSet& inner);

/// Dispatches to the exact projection for `set`.
std::vector<double> project(const Geometry& g, std::span<const double> z, const ConstraintSet& set);

/// Entropic projections carried out on log-coordinates. Boosters keep their
/// state as log-weights so that long runs never underflow to exact zeros.
namespace entropic {

/// log of z / |z|_1, computed from log z with a max shift.
std::vector<double> normalize_log(std::span<const double> log_z);

/// log of the KL projection of z onto {sum w = 1, w_i <= caps_i}.
/// The solution has the form w_i = min(caps_i, s * z_i) for a scalar s.
std::vector<double> project_capped_log(std::span<const double> log_z, std::span<const double> caps);

}  // namespace entropic

}  // namespace maboost
