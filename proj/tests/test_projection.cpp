#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maboost/error.hpp"
#include "maboost/oracle.hpp"
#include "maboost/projection.hpp"
#include "support.hpp"

using namespace maboost;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Geometry kEnt = Geometry::negative_entropy();

std::vector<double> random_caps(testing::Draws& rng, std::size_t n) {
  while (true) {
    std::vector<double> c(n);
    for (auto& x : c) x = rng.gen.below(4) == 0 ? kInf : rng.uniform(0.05, 0.9);
    double total = 0.0;
    for (double x : c) total += std::min(x, 1.0);
    if (total >= 1.0) return c;
  }
}

bool in_capped_simplex(std::span<const double> w, std::span<const double> caps) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0 || w[i] > caps[i]) return false;
  }
  return std::abs(testing::sum(w) - 1.0) <= 1e-12;
}

}  // namespace

TEST_CASE("simplex projection examples") {
  CHECK(project_simplex(kEnt, std::vector{2.0, 2.0}) == std::vector{0.5, 0.5});
  const auto w = project_simplex(Geometry::quadratic(2), std::vector{0.8, 0.4});
  CHECK(w[0] == Approx(0.7).epsilon(1e-15));
  CHECK(w[1] == Approx(0.3).epsilon(1e-15));
  const auto same = project_simplex(Geometry::quadratic(2), std::vector{0.25, 0.75});
  CHECK(same[0] == 0.25);
  CHECK(same[1] == 0.75);
  CHECK_THROWS_AS(project_simplex(kEnt, std::vector{0.0, 0.0}), DegenerateInputError);
  CHECK_THROWS_AS(project_simplex(kEnt, std::vector{-1.0, 2.0}), DomainError);
}

TEST_CASE("capped simplex examples") {
  const auto w = project_capped_simplex(kEnt, std::vector{4.0, 1.0, 1.0}, 0.5);
  CHECK(w[0] == 0.5);
  CHECK(w[1] == Approx(0.25).epsilon(1e-14));
  CHECK(w[2] == Approx(0.25).epsilon(1e-14));

  const Geometry q = Geometry::quadratic(3);
  const std::vector z{0.9, 0.3, 0.0};
  const auto wq = project_capped_simplex(q, z, 0.5);
  CHECK(wq[0] == 0.5);
  const auto ref = oracle::bregman_capped_simplex(q, z, std::vector<double>(3, 0.5));
  CHECK(testing::max_abs_diff(wq, ref) <= 1e-6);

  testing::Draws rng(10);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = rng.dim();
    const auto zz = rng.positive(n);
    for (const Geometry& g : {kEnt, Geometry::quadratic(n)}) {
      CHECK(testing::max_abs_diff(project_capped_simplex(g, zz, 1.0), project_simplex(g, zz)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(check_feasible(CappedSimplex{0.2}, 3), ConfigError);
}

TEST_CASE("mixed caps examples") {
  const auto w = project_mixed(kEnt, std::vector{4.0, 1.0, 1.0}, std::vector{0.5, kInf, kInf});
  CHECK(w[0] == 0.5);
  CHECK(w[1] == Approx(0.25).epsilon(1e-14));
  testing::Draws rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = rng.dim();
    const auto z = rng.positive(n);
    const double cap = rng.uniform(1.0 / static_cast<double>(n), 1.0);
    for (const Geometry& g : {kEnt, Geometry::quadratic(n)}) {
      CHECK(testing::max_abs_diff(project_mixed(g, z, std::vector<double>(n, kInf)), project_simplex(g, z)) <=
            1e-12);
      CHECK(testing::max_abs_diff(project_mixed(g, z, std::vector<double>(n, cap)),
                                  project_capped_simplex(g, z, cap)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(check_feasible(MixedCaps{{0.2, 0.2}}, 2), ConfigError);
}

TEST_CASE("orthant step with l1 penalty") {
  CHECK(project_orthant_l1(std::vector{0.15, -0.02}, 0.0) == std::vector{0.15, 0.0});
  CHECK(project_orthant_l1(std::vector{0.3 - 0.1}, 0.05)[0] == Approx(0.15).epsilon(1e-14));
  testing::Draws rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto z = rng.vec(rng.dim(1, 6), -1.0, 2.0);
    const double lambda = rng.uniform(0.0, 1.0);
    REQUIRE(testing::max_abs_diff(project_orthant_l1(z, lambda), oracle::orthant_l1(z, lambda)) <= 1e-10);
  }
  CHECK_THROWS_AS(project(kEnt, std::vector{1.0}, PositiveOrthant{0.1}), ConfigError);
}

TEST_CASE("entropic hypercube projection") {
  CHECK(project_hypercube_entropic(std::vector{0.5, 3.0}) == std::vector{0.5, 1.0});
  CHECK(project_hypercube_entropic(std::vector{0.1, 0.9, 1.0}) == std::vector{0.1, 0.9, 1.0});
  testing::Draws rng(13);
  for (int i = 0; i < 200; ++i) {
    auto z = rng.vec(5, 0.0, 4.0);
    for (auto& v : z) v = std::max(v, 1e-3);
    REQUIRE(testing::max_abs_diff(project_hypercube_entropic(z), oracle::hypercube_entropic(z)) <= 1e-6);
  }
}

TEST_CASE("double projection") {
  const auto w = project_double(kEnt, std::vector{0.5, 3.0}, UnitHypercube{}, Simplex{});
  CHECK(w[0] == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector x{0.2, 0.3, 0.5};
  CHECK(testing::max_abs_diff(project_double(kEnt, x, UnitHypercube{}, Simplex{}), x) <= 1e-15);
  CHECK_THROWS_AS(project_double(kEnt, x, Simplex{}, UnitHypercube{}), ConfigError);

  testing::Draws rng(14);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = rng.dim();
    const auto z = rng.positive(n);
    const auto p = rng.simplex(n);
    const auto y = project_double(kEnt, z, UnitHypercube{}, Simplex{});
    REQUIRE(divergence(kEnt, p, z) >= divergence(kEnt, p, y));
  }
}

TEST_CASE("oracle equivalence on every geometry and set") {
  testing::Draws rng(15);
  for (const auto kind : {GeometryKind::Quadratic, GeometryKind::NegativeEntropy}) {
    CAPTURE(to_string(kind));
    for (int i = 0; i < 150; ++i) {
      const std::size_t n = rng.dim();
      const Geometry g = Geometry::make(kind, n);
      const auto z = g.is_entropic() ? rng.positive(n) : rng.vec(n, -1.5, 1.5);
      const std::vector<double> open(n, kInf);
      const double cap = rng.uniform(1.0 / static_cast<double>(n), 1.0);
      const auto caps = random_caps(rng, n);

      REQUIRE(testing::max_abs_diff(project(g, z, Simplex{}), oracle::bregman_capped_simplex(g, z, open)) <= 1e-6);
      REQUIRE(testing::max_abs_diff(project(g, z, CappedSimplex{cap}),
                                    oracle::bregman_capped_simplex(g, z, std::vector<double>(n, cap))) <= 1e-6);
      REQUIRE(testing::max_abs_diff(project(g, z, MixedCaps{caps}), oracle::bregman_capped_simplex(g, z, caps)) <=
              1e-6);
    }
  }
}

TEST_CASE("feasibility, idempotence and permutation equivariance") {
  testing::Draws rng(16);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = rng.dim(2, 9);
    const auto caps = random_caps(rng, n);
    for (const Geometry& g : {kEnt, Geometry::quadratic(n)}) {
      const auto z = g.is_entropic() ? rng.positive(n) : rng.vec(n, -2.0, 2.0);
      const auto w = project_mixed(g, z, caps);
      REQUIRE(in_capped_simplex(w, caps));
      if (g.is_entropic() && std::any_of(w.begin(), w.end(), [](double v) { return v <= 0.0; })) continue;
      REQUIRE(testing::max_abs_diff(project_mixed(g, w, caps), w) <= 1e-12);

      std::vector<std::size_t> perm(n);
      for (std::size_t j = 0; j < n; ++j) perm[j] = (j + 1 + i) % n;
      std::vector<double> zp(n), cp(n);
      for (std::size_t j = 0; j < n; ++j) {
        zp[j] = z[perm[j]];
        cp[j] = caps[perm[j]];
      }
      const auto wp = project_mixed(g, zp, cp);
      for (std::size_t j = 0; j < n; ++j) REQUIRE(std::abs(wp[j] - w[perm[j]]) <= 1e-12);
    }
  }
}

TEST_CASE("generalized Pythagorean inequality, relaxed and exact forms") {
  testing::Draws rng(17);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = rng.dim();
    const auto caps = i % 2 ? random_caps(rng, n) : std::vector<double>(n, kInf);
    for (const Geometry& g : {kEnt, Geometry::quadratic(n)}) {
      const auto z = g.is_entropic() ? rng.positive(n) : rng.vec(n, -1.5, 1.5);
      const auto y = project_mixed(g, z, caps);
      if (g.is_entropic() && std::any_of(y.begin(), y.end(), [](double v) { return v <= 0.0; })) continue;
      const auto x = project_mixed(g, g.is_entropic() ? rng.positive(n) : rng.vec(n, -1.5, 1.5), caps);
      const double bxz = divergence(g, x, z);
      const double bxy = divergence(g, x, y);
      const double byz = divergence(g, y, z);
      REQUIRE(bxz >= bxy);
      REQUIRE(bxz - bxy - byz >= -1e-10 * (1.0 + bxz));
      ++checked;
    }
  }
  CHECK(checked >= 1900);
}

TEST_CASE("variational inequality certificate") {
  testing::Draws rng(18);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = rng.dim();
    const auto caps = random_caps(rng, n);
    for (const Geometry& g : {kEnt, Geometry::quadratic(n)}) {
      const auto z = g.is_entropic() ? rng.positive(n) : rng.vec(n, -1.5, 1.5);
      const auto y = project_mixed(g, z, caps);
      if (g.is_entropic() && std::any_of(y.begin(), y.end(), [](double v) { return v <= 0.0; })) continue;
      const auto grad = divergence_gradient(g, y, z);
      const auto v = project_mixed(g, rng.positive(n), caps);
      double vi = 0.0;
      for (std::size_t j = 0; j < n; ++j) vi += (v[j] - y[j]) * grad[j];
      REQUIRE(vi >= -1e-12);
    }
    // Hypercube under entropy: the certificate holds with exact sign.
    const auto z = rng.positive(n);
    const auto y = project_hypercube_entropic(z);
    const auto grad = divergence_gradient(kEnt, y, z);
    const auto v = rng.vec(n, 0.0, 1.0);
    double vi = 0.0;
    for (std::size_t j = 0; j < n; ++j) vi += (v[j] - y[j]) * grad[j];
    REQUIRE(vi >= 0.0);
  }
}

TEST_CASE("entropic log-domain projections survive underflow") {
  std::vector<double> log_z{-2000.0, -2001.0, -2000.5};
  const auto lw = entropic::normalize_log(log_z);
  double s = 0.0;
  for (double v : lw) s += std::exp(v);
  CHECK(s == Approx(1.0).epsilon(1e-14));
  const auto lc = entropic::project_capped_log(std::vector{0.0, -800.0, -800.0}, std::vector{0.5, kInf, kInf});
  CHECK(std::exp(lc[0]) == Approx(0.5));
  CHECK(std::exp(lc[1]) == Approx(0.25));
}
