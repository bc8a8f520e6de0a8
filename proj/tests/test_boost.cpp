#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "maboost/boost.hpp"
#include "maboost/error.hpp"
#include "support.hpp"

using namespace maboost;
using doctest::Approx;

namespace {

BoosterConfig config(Algorithm a, GeometryKind g, int rounds = 100) {
  BoosterConfig c;
  c.algorithm = a;
  c.geometry = g;
  c.max_rounds = rounds;
  return c;
}

Dataset with_subsets(const Dataset& d, Subset s) {
  return Dataset(std::vector<double>(d.features().begin(), d.features().end()), d.dim(),
                 std::vector<int>(d.labels().begin(), d.labels().end()), std::vector<Subset>(d.size(), s));
}

void check_distributions(const RunResult& r, double cap = 1.0) {
  for (const auto& w : r.weights) {
    double total = 0.0;
    for (double v : w) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= cap);
      total += v;
    }
    REQUIRE(std::abs(total - 1.0) <= 1e-10);
  }
}

void check_same_rounds(const RunResult& a, const RunResult& b) {
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) {
    REQUIRE(a.trace[t].gamma == b.trace[t].gamma);
    REQUIRE(a.trace[t].eta == b.trace[t].eta);
    REQUIRE(a.trace[t].train_error == b.trace[t].train_error);
  }
  CHECK(a.state.ensemble == b.state.ensemble);
}

}  // namespace

TEST_CASE("bound formulas") {
  CHECK(bounds::quadratic(1.0) == 0.5);
  CHECK(bounds::entropic(2.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(bounds::sparse(AlphaMode::Zero, 3.0) == 0.25);
  CHECK(bounds::sparse(AlphaMode::Half, 4.0) == 0.5);
  CHECK(bounds::mada_squared(4, 0.5) == 1.0);
  CHECK(bounds::point_mass_divergence(GeometryKind::NegativeEntropy, 10) == Approx(std::log(10.0)));
  CHECK(bounds::point_mass_divergence(GeometryKind::Quadratic, 10) == Approx(0.45));
  // The general form reduces to the standard bounds under eta = gamma / L.
  testing::Draws rng(31);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng.gen.below(300);
    const auto gammas = rng.vec(1 + rng.gen.below(50), 0.0, 1.0);
    double sq = 0.0;
    double gain_q = 0.0;
    double gain_e = 0.0;
    for (double g : gammas) {
      sq += g * g;
      const double eq = g / static_cast<double>(n);
      gain_q += eq * g - 0.5 * static_cast<double>(n) * eq * eq;
      gain_e += g * g - 0.5 * g * g;
    }
    REQUIRE(bounds::general(GeometryKind::Quadratic, n, gain_q) == Approx(bounds::quadratic(sq)).epsilon(1e-12));
    REQUIRE(bounds::general(GeometryKind::NegativeEntropy, n, gain_e) == Approx(bounds::entropic(sq)).epsilon(1e-12));
  }
  // nu(T) from its closed form
  const double nu = bounds::margin_accuracy(3, 0.5, 1.0, std::log(4.0));
  CHECK(nu == Approx((1.0 + std::log(3.0)) / (2.0 * 2.0 - 2.0) * 0.5 + std::log(4.0) / (0.5 * (2.0 - 1.0))));
}

TEST_CASE("MABoost meets its bound on separable data") {
  for (auto g : {GeometryKind::NegativeEntropy, GeometryKind::Quadratic}) {
    for (auto a : {Algorithm::MABoostActive, Algorithm::MABoostLazy}) {
      CAPTURE(to_string(g));
      CAPTURE(to_string(a));
      BoosterConfig c = config(a, g, 400);
      c.record_weights = true;
      const RunResult r = run(c, gen_diagonal(2, 100, 0.1));
      CHECK(r.stop == StopReason::TargetReached);
      CHECK(r.trace.back().train_error == 0.0);
      double sq = 0.0;
      for (const auto& rt : r.trace) {
        sq += rt.gamma * rt.gamma;
        REQUIRE(rt.train_error <= bounds::maboost(g, sq) + kBoundSlack);
        REQUIRE(rt.bound == Approx(bounds::maboost(g, sq)).epsilon(1e-12));
        const double L = g == GeometryKind::NegativeEntropy ? 1.0 : 100.0;
        REQUIRE(rt.eta == Approx(rt.gamma / L).epsilon(1e-15));
      }
      check_distributions(r);
    }
  }
}

TEST_CASE("a single perfect stump ends the run after one round") {
  const RunResult r = run(config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy), gen_blobs(0, 100, 0.5));
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].gamma == Approx(1.0).epsilon(1e-12));
  CHECK(r.trace[0].eta == Approx(1.0).epsilon(1e-12));
  CHECK(r.trace[0].train_error == 0.0);
  CHECK(r.stop == StopReason::TargetReached);
}

TEST_CASE("stop_at_target = false runs every round") {
  BoosterConfig c = config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 200);
  c.stop_at_target = false;
  const RunResult r = run(c, gen_blobs(0, 200, 0.3));
  CHECK(r.trace.size() == 200);
  CHECK(r.stop == StopReason::MaxRounds);
}

TEST_CASE("active and lazy coincide under entropy") {
  BoosterConfig a = config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 60);
  a.record_weights = true;
  a.stop_at_target = false;
  BoosterConfig l = a;
  l.algorithm = Algorithm::MABoostLazy;
  const Dataset data = gen_noisy(3, 120, 0.1);
  const RunResult ra = run(a, data);
  const RunResult rl = run(l, data);
  REQUIRE(ra.weights.size() == rl.weights.size());
  for (std::size_t t = 0; t < ra.weights.size(); ++t) {
    REQUIRE(testing::max_abs_diff(ra.weights[t], rl.weights[t]) <= 1e-12);
  }
  for (std::size_t t = 0; t < ra.state.ensemble.size(); ++t) {
    REQUIRE(ra.state.ensemble.members[t].stump == rl.state.ensemble.members[t].stump);
  }
}

TEST_CASE("entropic MABoost is multiplicative reweighting") {
  BoosterConfig c = config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 30);
  c.record_weights = true;
  c.stop_at_target = false;
  const Dataset data = gen_noisy(8, 80, 0.2);
  const RunResult r = run(c, data);
  std::vector<double> w(data.size(), 1.0 / 80.0);
  for (std::size_t t = 0; t < r.state.ensemble.size(); ++t) {
    const auto& m = r.state.ensemble.members[t];
    for (std::size_t i = 0; i < data.size(); ++i) w[i] *= std::exp(-m.eta * data.label(i) * m.stump(data.row(i)));
    const double z = testing::sum(w);
    for (auto& v : w) v /= z;
    REQUIRE(testing::max_abs_diff(w, r.weights[t + 1]) <= 1e-10);
  }
}

TEST_CASE("sum of eta gamma grows while the edge is positive") {
  const RunResult r = run(config(Algorithm::MABoostLazy, GeometryKind::Quadratic, 80), gen_noisy(1, 100, 0.1));
  double acc = 0.0;
  for (const auto& rt : r.trace) {
    REQUIRE(rt.gamma > 0.0);
    const double next = acc + rt.eta * rt.gamma;
    REQUIRE(next > acc);
    acc = next;
  }
}

TEST_CASE("max-margin schedule") {
  const Dataset data = gen_diagonal(4, 60, 0.1);
  BoosterConfig one = config(Algorithm::MaxMargin, GeometryKind::NegativeEntropy, 1);
  const RunResult mm = run(one, data);
  const RunResult mb = run(config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 1), data);
  CHECK(mm.trace[0].eta == mb.trace[0].eta);
  CHECK(mm.state.ensemble == mb.state.ensemble);

  const RunResult r = run(config(Algorithm::MaxMargin, GeometryKind::NegativeEntropy, 600), data);
  CHECK(r.trace.size() == 600);
  double gmax = 0.0;
  double gmin = 1.0;
  for (const auto& rt : r.trace) {
    gmax = std::max(gmax, rt.gamma);
    gmin = std::min(gmin, rt.gamma);
    REQUIRE(rt.eta == Approx(rt.gamma / std::sqrt(static_cast<double>(rt.t))).epsilon(1e-15));
    REQUIRE(*rt.margin <= gmax + 1e-12);
    REQUIRE(rt.nu.has_value());
  }
  CHECK(margin(r.state.ensemble, data) == Approx(*r.trace.back().margin).epsilon(1e-12));
  CHECK(margin(r.state.ensemble, data) > 0.0);
}

TEST_CASE("smooth boosting keeps weights under k/N") {
  const Dataset data = gen_noisy(5, 200, 0.1);
  BoosterConfig c = config(Algorithm::Smooth, GeometryKind::NegativeEntropy, 150);
  c.k = 10;
  c.record_weights = true;
  const RunResult r = run(c, data);
  check_distributions(r, 10.0 / 200.0);
  for (const auto& rt : r.trace) REQUIRE(rt.max_weight <= 10.0 / 200.0);

  c.geometry = GeometryKind::Quadratic;
  check_distributions(run(c, data), 10.0 / 200.0);

  // k = N leaves the simplex unconstrained.
  BoosterConfig s = config(Algorithm::Smooth, GeometryKind::NegativeEntropy, 50);
  s.k = 200;
  s.stop_at_target = false;
  BoosterConfig m = config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 50);
  m.stop_at_target = false;
  check_same_rounds(run(s, data), run(m, data));
}

TEST_CASE("smooth boosting reaches 1/k within the edge-based round budget") {
  BoosterConfig c = config(Algorithm::Smooth, GeometryKind::NegativeEntropy, 1000);
  c.k = 20;
  const RunResult r = run(c, gen_diagonal(0, 200, 0.05));
  REQUIRE(r.stop == StopReason::TargetReached);
  double gmin = 1.0;
  for (const auto& rt : r.trace) gmin = std::min(gmin, rt.gamma);
  CHECK(static_cast<double>(r.trace.size()) <= 2.0 * std::log(20.0) / (gmin * gmin) + 1.0);
  CHECK(r.trace.back().train_error <= 1.0 / 20.0);
}

TEST_CASE("combined boosting") {
  const Dataset base = gen_noisy(6, 120, 0.1);

  SUBCASE("no B samples is plain MABoost") {
    BoosterConfig c = config(Algorithm::Combined, GeometryKind::NegativeEntropy, 60);
    c.k = 4;
    check_same_rounds(run(c, with_subsets(base, Subset::A)),
                      run(config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy, 60), base));
  }
  SUBCASE("no A samples is smooth boosting") {
    BoosterConfig c = config(Algorithm::Combined, GeometryKind::NegativeEntropy, 60);
    c.k = 4;
    BoosterConfig s = config(Algorithm::Smooth, GeometryKind::NegativeEntropy, 60);
    s.k = 4;
    check_same_rounds(run(c, with_subsets(base, Subset::B)), run(s, base));
  }
  SUBCASE("B weights respect their cap and the error on B ends at most 1/k") {
    const Dataset data = gen_combined(0, 150, 50, 0.3);
    for (auto g : {GeometryKind::NegativeEntropy, GeometryKind::Quadratic}) {
      BoosterConfig c = config(Algorithm::Combined, g, 500);
      c.k = 4;
      c.target_error = 0.02;
      c.record_weights = true;
      const RunResult r = run(c, data);
      CHECK(r.stop == StopReason::TargetReached);
      CHECK(*r.trace.back().eps_b <= 0.25);
      CHECK(*r.trace.back().eps_a <= 0.02);
      const double cap = combined_b_cap(c, data);
      CHECK(cap == Approx(4.0 / 50.0));
      for (const auto& w : r.weights) {
        for (std::size_t i = 0; i < data.size(); ++i) {
          if (data.subset(i) == Subset::B) REQUIRE(w[i] <= cap);
        }
      }
    }
  }
  SUBCASE("total-count caps") {
    const Dataset data = gen_combined(0, 150, 50, 0.3);
    BoosterConfig c = config(Algorithm::Combined, GeometryKind::NegativeEntropy, 100);
    c.k = 4;
    c.combined_cap = CombinedCap::Total;
    CHECK(combined_b_cap(c, data) == Approx(4.0 / 200.0));
    c.record_weights = true;
    const RunResult r = run(c, data);
    for (const auto& w : r.weights) {
      for (std::size_t i = 150; i < 200; ++i) REQUIRE(w[i] <= 0.02);
    }
  }
}

TEST_CASE("SparseBoost round one by hand") {
  const Dataset toy({-1.0, 1.0}, 1, {-1, 1});
  SUBCASE("half") {
    BoosterConfig c = config(Algorithm::Sparse, GeometryKind::Quadratic, 1);
    c.alpha_mode = AlphaMode::Half;
    const RunResult r = run(c, toy);
    // gamma = 1, |y_1| = 1: eta = 1/(2N) = 0.25, alpha = 1/2,
    // z = 0.5 - 0.25 = 0.25, y_2 = 0.25 - 0.125 = 0.125.
    CHECK(r.trace[0].gamma == 1.0);
    CHECK(r.trace[0].eta == Approx(0.25).epsilon(1e-12));
    CHECK(r.state.aux[0] == Approx(0.125).epsilon(1e-12));
    CHECK(r.state.aux[1] == Approx(0.125).epsilon(1e-12));
    CHECK(*r.trace[0].y_norm_next == Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("zero") {
    const RunResult r = run(config(Algorithm::Sparse, GeometryKind::Quadratic, 5), toy);
    // eta = 1/N = 0.5 drives both coordinates of y to exactly zero.
    CHECK(r.trace[0].eta == Approx(0.5).epsilon(1e-12));
    CHECK(*r.trace[0].y_norm_next == 0.0);
    CHECK(r.trace.size() == 1);
    CHECK(r.trace[0].train_error == 0.0);
  }
}

TEST_CASE("SparseBoost bounds and sparsity") {
  const Dataset data = gen_diagonal(0, 200, 0.05);
  for (auto mode : {AlphaMode::Zero, AlphaMode::Half}) {
    BoosterConfig c = config(Algorithm::Sparse, GeometryKind::Quadratic, 300);
    c.alpha_mode = mode;
    c.record_weights = true;
    const RunResult r = run(c, data);
    check_distributions(r);
    double acc = 0.0;
    int first_sparse = 0;
    for (const auto& rt : r.trace) {
      acc += rt.gamma * rt.gamma * *rt.y_norm * *rt.y_norm;
      REQUIRE(rt.train_error <= 1.0 / (1.0 + bounds::sparse_constant(mode) * acc) + kBoundSlack);
      if (mode == AlphaMode::Zero && rt.train_error > 0.0) REQUIRE(*rt.y_norm_next >= 1.0 / 200.0);
      if (!first_sparse && rt.nnz < 200) first_sparse = rt.t;
    }
    if (mode == AlphaMode::Half) {
      CHECK(first_sparse > 0);
      CHECK(first_sparse <= 50);
    }
  }
  CHECK_THROWS_AS(run(config(Algorithm::Sparse, GeometryKind::NegativeEntropy), data), ConfigError);
}

TEST_CASE("MadaBoost variant") {
  const Dataset data = gen_diagonal(0, 200, 0.05);
  for (auto rule : {MadaEta::PreviousError, MadaEta::FixedPoint}) {
    BoosterConfig c = config(Algorithm::Mada, GeometryKind::NegativeEntropy, 200);
    c.mada_eta = rule;
    c.record_weights = true;
    c.stop_at_target = false;
    const RunResult r = run(c, data);
    check_distributions(r);
    if (rule == MadaEta::PreviousError) CHECK(r.trace[0].eta == r.trace[0].gamma);

    // y_t^i = min(1, exp(sum_{l<t} eta_l d_l^i))
    std::vector<double> expo(data.size(), 0.0);
    double gmin = 1.0;
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
      std::vector<double> y(data.size());
      for (std::size_t i = 0; i < data.size(); ++i) y[i] = std::min(1.0, std::exp(expo[i]));
      const double ys = testing::sum(y);
      REQUIRE(ys == Approx(*r.trace[t].y_norm).epsilon(1e-12));
      for (auto& v : y) v /= ys;
      REQUIRE(testing::max_abs_diff(y, r.weights[t]) <= 1e-10);

      const auto& m = r.state.ensemble.members[t];
      for (std::size_t i = 0; i < data.size(); ++i) expo[i] -= m.eta * data.label(i) * m.stump(data.row(i));

      const auto& rt = r.trace[t];
      gmin = std::min(gmin, rt.gamma);
      REQUIRE(rt.train_error * rt.train_error <= 1.0 / (rt.t * gmin * gmin) + kBoundSlack);
      REQUIRE(*rt.y_norm_next >= 200.0 * rt.train_error - kBoundSlack);
    }
  }
}

TEST_CASE("MadaBoost convergence time") {
  BoosterConfig c = config(Algorithm::Mada, GeometryKind::NegativeEntropy, 2000);
  c.target_error = 0.05;
  const RunResult r = run(c, gen_diagonal(1, 100, 0.1));
  REQUIRE(r.stop == StopReason::TargetReached);
  double gmin = 1.0;
  for (const auto& rt : r.trace) gmin = std::min(gmin, rt.gamma);
  CHECK(static_cast<double>(r.trace.size()) <= 1.0 / (0.05 * 0.05 * gmin * gmin) + 1.0);
}

TEST_CASE("MadaBoost on a single correctly classified sample stops at once") {
  const RunResult r = run(config(Algorithm::Mada, GeometryKind::NegativeEntropy), Dataset({0.5}, 1, {1}));
  CHECK(r.trace.size() == 1);
  CHECK(r.trace[0].train_error == 0.0);
  CHECK(r.stop == StopReason::TargetReached);
}

TEST_CASE("prediction and margin") {
  Ensemble f;
  f.members.push_back({Stump{0, 0.0, 1}, 0.7});
  CHECK(predict(f, std::vector{0.3}) == 1);
  CHECK(predict(f, std::vector{-0.3}) == -1);
  f.members.push_back({Stump{0, 0.0, -1}, 0.7});
  CHECK(predict(f, std::vector{0.3}) == 1);  // tie votes +1
  Ensemble g;
  g.members.push_back({Stump{0, 0.0, 1}, 1.0});
  CHECK(margin(g, Dataset({-1.0, 1.0}, 1, {-1, 1})) == 1.0);
  CHECK_THROWS_AS(predict(Ensemble{}, std::vector{0.0}), UsageError);
}

TEST_CASE("configuration errors") {
  const Dataset data = gen_blobs(0, 20, 0.5);
  BoosterConfig c = config(Algorithm::Smooth, GeometryKind::NegativeEntropy);
  c.k = 0.5;
  CHECK_THROWS_AS(run(c, data), ConfigError);
  c.k = 4;
  c.target_error = 0.1;
  CHECK_THROWS_AS(run(c, data), ConfigError);
  CHECK_THROWS_AS(run(config(Algorithm::Combined, GeometryKind::NegativeEntropy), data), ConfigError);
  CHECK_THROWS_AS(run(config(Algorithm::Mada, GeometryKind::Quadratic), data), ConfigError);
  CHECK_THROWS_AS(run(config(Algorithm::MABoostActive, GeometryKind::Quadratic, 0), data), ConfigError);
  BoosterConfig t = config(Algorithm::MABoostActive, GeometryKind::Quadratic);
  t.target_error = 1.5;
  CHECK_THROWS_AS(run(t, data), ConfigError);
  CHECK_THROWS_AS(run_sparse(config(Algorithm::MABoostActive, GeometryKind::Quadratic), data), UsageError);
  CHECK_THROWS_AS(parse_algorithm("adaboost"), ConfigError);
}

TEST_CASE("zero edge under the uniform distribution") {
  const Dataset flat({1.0, 1.0, 1.0, 1.0}, 1, {1, -1, 1, -1});
  CHECK_THROWS_AS(run(config(Algorithm::MABoostActive, GeometryKind::NegativeEntropy), flat),
                  NoWeakLearnabilityError);
  CHECK_THROWS_AS(run(config(Algorithm::Mada, GeometryKind::NegativeEntropy), flat), NoWeakLearnabilityError);
}

TEST_CASE("runs are deterministic") {
  const Dataset data = gen_noisy(11, 150, 0.2);
  for (auto a : {Algorithm::MABoostActive, Algorithm::MABoostLazy, Algorithm::MaxMargin, Algorithm::Sparse,
                 Algorithm::Mada}) {
    const auto g = a == Algorithm::Sparse ? GeometryKind::Quadratic : GeometryKind::NegativeEntropy;
    BoosterConfig c = config(a, g, 80);
    c.record_weights = true;
    const RunResult x = run(c, data);
    const RunResult y = run(c, data);
    check_same_rounds(x, y);
    CHECK(x.weights == y.weights);
  }
}

TEST_CASE("enum names round trip") {
  for (auto a : {Algorithm::MABoostActive, Algorithm::MABoostLazy, Algorithm::MaxMargin, Algorithm::Smooth,
                 Algorithm::Combined, Algorithm::Sparse, Algorithm::Mada}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK(parse_alpha_mode("half") == AlphaMode::Half);
  CHECK(parse_mada_eta(to_string(MadaEta::FixedPoint)) == MadaEta::FixedPoint);
  CHECK(parse_combined_cap("total") == CombinedCap::Total);
}
