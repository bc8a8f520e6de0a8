#include "maboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maboost/error.hpp"
#include "maboost/projection.hpp"

namespace maboost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running ensemble scores H(x_i) = sum_t eta_t h_t(x_i), accumulated in the
// same order as Ensemble::score so both agree bit for bit.
class ScoreTracker {
 public:
  explicit ScoreTracker(const Dataset& data) : data_(data), scores_(data.size(), 0.0) {}

  void add(const Stump& h, double eta) {
    for (std::size_t i = 0; i < scores_.size(); ++i) scores_[i] += eta * h(data_.row(i));
  }

  bool mistake(std::size_t i) const { return (scores_[i] >= 0.0 ? 1 : -1) != data_.label(i); }

  std::size_t mistakes() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < scores_.size(); ++i) m += mistake(i) ? 1 : 0;
    return m;
  }

  std::size_t mistakes(Subset s) const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < scores_.size(); ++i) m += (data_.subset(i) == s && mistake(i)) ? 1 : 0;
    return m;
  }

  double error() const { return static_cast<double>(mistakes()) / static_cast<double>(scores_.size()); }

  /// Error of the ensemble with one more member, without committing it.
  double error_with(const Stump& h, double eta) const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < scores_.size(); ++i) {
      const double s = scores_[i] + eta * h(data_.row(i));
      m += (s >= 0.0 ? 1 : -1) != data_.label(i) ? 1 : 0;
    }
    return static_cast<double>(m) / static_cast<double>(scores_.size());
  }

  double min_margin(double eta_sum) const {
    double m = kInf;
    for (std::size_t i = 0; i < scores_.size(); ++i) m = std::min(m, data_.label(i) * scores_[i] / eta_sum);
    return m;
  }

 private:
  const Dataset& data_;
  std::vector<double> scores_;
};

void weight_stats(std::span<const double> w, RoundTrace& rec) {
  rec.max_weight = 0.0;
  rec.nnz = 0;
  for (double v : w) {
    rec.max_weight = std::max(rec.max_weight, v);
    rec.nnz += v > 0.0 ? 1 : 0;
  }
}

[[noreturn]] void violation(int t, const std::string& what) {
  throw BoundViolation("round " + std::to_string(t) + ": " + what);
}

void check_error_bound(int t, double err, double bound, const char* name) {
  if (!(err <= bound + kBoundSlack)) {
    violation(t, std::string(name) + " bound violated: train_error " + std::to_string(err) + " > " +
                     std::to_string(bound));
  }
}

void check_distribution(int t, std::span<const double> w, std::span<const double> caps) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0)) violation(t, "negative weight");
    if (!caps.empty() && w[i] > caps[i]) violation(t, "weight exceeds its cap");
    total += w[i];
  }
  if (std::abs(total - 1.0) > 1e-10) violation(t, "weights do not sum to one");
}

void require_algorithm(const BoosterConfig& config, std::initializer_list<Algorithm> allowed,
                       const char* runner) {
  if (std::find(allowed.begin(), allowed.end(), config.algorithm) == allowed.end()) {
    throw UsageError(std::string(runner) + " cannot run algorithm " + std::string(to_string(config.algorithm)));
  }
}

// MABoost and its constrained/max-margin variants. The dual update is
// grad R(z_{t+1}) = grad R(w_t) + eta d (active) or grad R(z_t) + eta d (lazy),
// followed by a Bregman projection onto the simplex or a capped simplex.
// Entropic state is held as log-weights.
RunResult run_mirror(const BoosterConfig& config, const Dataset& data) {
  validate(config, data);
  const std::size_t n = data.size();
  const double nd = static_cast<double>(n);
  const Geometry g = Geometry::make(config.geometry, n);
  const double L = g.dual_norm_sq_bound;
  const Algorithm algo = config.algorithm;
  const bool lazy = algo == Algorithm::MABoostLazy;
  const bool max_margin = algo == Algorithm::MaxMargin;
  const double target = effective_target(config);

  std::vector<double> caps(n, kInf);
  if (algo == Algorithm::Smooth) std::fill(caps.begin(), caps.end(), config.k / nd);
  if (algo == Algorithm::Combined) {
    for (std::size_t i = 0; i < n; ++i) {
      if (data.subset(i) == Subset::B) caps[i] = combined_b_cap(config, data);
    }
  }
  const double caps_b = algo == Algorithm::Combined ? combined_b_cap(config, data) : kInf;
  const bool capped = std::any_of(caps.begin(), caps.end(), [](double c) { return c < 1.0; });
  const std::vector<double> no_caps;
  const std::span<const double> active_caps = capped ? std::span<const double>(caps) : no_caps;

  const StumpLearner learner(data);
  RunResult result;
  std::vector<double> w(n, 1.0 / nd);
  std::vector<double> log_w(n, -std::log(nd));
  std::vector<double> z = w;
  std::vector<double> log_z = log_w;
  ScoreTracker tracker(data);

  const std::size_t n_a = data.has_subsets() ? data.count(Subset::A) : 0;
  const std::size_t n_b = data.has_subsets() ? data.count(Subset::B) : 0;
  const double C = bounds::point_mass_divergence(g.kind, n);
  double sum_gamma_sq = 0.0;
  double gain = 0.0;
  double gamma_min = kInf;

  for (int t = 1; t <= config.max_rounds; ++t) {
    if (config.record_weights) result.weights.push_back(w);
    const StumpFit fit = learner.fit(w);
    const double gamma = fit.edge;
    if (gamma <= kEdgeFloor) {
      if (t == 1) throw NoWeakLearnabilityError("weak learner has zero edge under the uniform distribution");
      result.stop = StopReason::ZeroEdge;
      break;
    }
    const double eta = max_margin ? gamma / (L * std::sqrt(static_cast<double>(t))) : gamma / L;
    const std::vector<double> d = loss_vector(data, fit.stump);

    RoundTrace rec;
    rec.t = t;
    rec.gamma = gamma;
    rec.eta = eta;
    weight_stats(w, rec);

    if (g.is_entropic()) {
      // log z_{t+1} = log(base) + eta d, the entropic mirror step without the
      // constant offset of grad R.
      std::vector<double>& base = lazy ? log_z : log_w;
      std::vector<double> theta(n);
      for (std::size_t i = 0; i < n; ++i) theta[i] = base[i] + eta * d[i];
      if (lazy) log_z = theta;
      log_w = capped ? entropic::project_capped_log(theta, caps) : entropic::normalize_log(theta);
      for (std::size_t i = 0; i < n; ++i) w[i] = std::min(caps[i], std::exp(log_w[i]));
    } else {
      std::vector<double> theta = mirror_map(g, lazy ? z : w);
      for (std::size_t i = 0; i < n; ++i) theta[i] += eta * d[i];
      z = inverse_mirror_map(g, theta);
      w = capped ? project_mixed(g, z, caps) : project_simplex(g, z);
    }

    result.state.ensemble.members.push_back({fit.stump, eta});
    tracker.add(fit.stump, eta);
    rec.train_error = tracker.error();
    sum_gamma_sq += gamma * gamma;
    gain += eta * gamma - 0.5 * L * eta * eta;
    gamma_min = std::min(gamma_min, gamma);
    rec.bound = max_margin ? bounds::general(g.kind, n, gain) : bounds::maboost(g.kind, sum_gamma_sq);

    double eps_a = 0.0;
    double eps_b = 0.0;
    if (max_margin) {
      rec.margin = tracker.min_margin(result.state.ensemble.eta_sum());
      rec.nu = bounds::margin_accuracy(t, gamma_min, L, C);
    }
    if (algo == Algorithm::Combined) {
      eps_a = n_a ? static_cast<double>(tracker.mistakes(Subset::A)) / static_cast<double>(n_a) : 0.0;
      eps_b = n_b ? static_cast<double>(tracker.mistakes(Subset::B)) / static_cast<double>(n_b) : 0.0;
      rec.eps_a = eps_a;
      rec.eps_b = eps_b;
    }

    if (config.check_bounds) {
      check_distribution(t, w, active_caps);
      if (algo == Algorithm::Smooth) {
        // The error distribution lies in S_k only while eps >= 1/k.
        if (rec.train_error >= 1.0 / config.k) check_error_bound(t, rec.train_error, rec.bound, "smooth");
      } else if (algo == Algorithm::Combined) {
        // Uniform weight on the A-mistakes is always feasible; on the
        // B-mistakes only while 1/m_B fits under the cap.
        const double m_a = static_cast<double>(tracker.mistakes(Subset::A));
        const double m_b = static_cast<double>(tracker.mistakes(Subset::B));
        check_error_bound(t, m_a / nd, rec.bound, "combined (A)");
        if (m_b > 0.0 && 1.0 / m_b <= caps_b) check_error_bound(t, m_b / nd, rec.bound, "combined (B)");
      } else {
        check_error_bound(t, rec.train_error, rec.bound, max_margin ? "max-margin" : "MABoost");
      }
    }
    result.trace.push_back(rec);

    if (!max_margin && config.stop_at_target) {
      const bool done = algo == Algorithm::Combined ? (eps_a <= target && eps_b <= 1.0 / config.k)
                                                    : rec.train_error <= target;
      if (done) {
        result.stop = StopReason::TargetReached;
        break;
      }
    }
  }
  if (config.record_weights) result.weights.push_back(w);
  result.state.w = std::move(w);
  if (lazy) {
    result.state.aux = z;
    if (g.is_entropic()) {
      for (std::size_t i = 0; i < n; ++i) result.state.aux[i] = std::exp(log_z[i]);
    }
  }
  return result;
}

}  // namespace

// ---- names ------------------------------------------------------------------------

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MABoostActive: return "maboost-active";
    case Algorithm::MABoostLazy: return "maboost-lazy";
    case Algorithm::MaxMargin: return "maxmargin";
    case Algorithm::Smooth: return "smooth";
    case Algorithm::Combined: return "combined";
    case Algorithm::Sparse: return "sparse";
    case Algorithm::Mada: return "mada";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::MABoostActive, Algorithm::MABoostLazy, Algorithm::MaxMargin, Algorithm::Smooth,
                      Algorithm::Combined, Algorithm::Sparse, Algorithm::Mada}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(AlphaMode m) { return m == AlphaMode::Zero ? "zero" : "half"; }

AlphaMode parse_alpha_mode(std::string_view name) {
  if (name == "zero") return AlphaMode::Zero;
  if (name == "half") return AlphaMode::Half;
  throw ConfigError("unknown alpha mode '" + std::string(name) + "' (expected zero|half)");
}

std::string_view to_string(MadaEta m) { return m == MadaEta::PreviousError ? "previous_error" : "fixed_point"; }

MadaEta parse_mada_eta(std::string_view name) {
  if (name == "previous_error") return MadaEta::PreviousError;
  if (name == "fixed_point") return MadaEta::FixedPoint;
  throw ConfigError("unknown mada eta rule '" + std::string(name) + "' (expected previous_error|fixed_point)");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxRounds: return "max_rounds";
    case StopReason::TargetReached: return "target_reached";
    case StopReason::ZeroEdge: return "zero_edge";
    case StopReason::Collapsed: return "distribution_collapsed";
  }
  return "?";
}

std::string_view to_string(CombinedCap c) { return c == CombinedCap::Subset ? "subset" : "total"; }

CombinedCap parse_combined_cap(std::string_view name) {
  if (name == "subset") return CombinedCap::Subset;
  if (name == "total") return CombinedCap::Total;
  throw ConfigError("unknown combined cap '" + std::string(name) + "' (expected subset|total)");
}

// ---- config -----------------------------------------------------------------------

double combined_b_cap(const BoosterConfig& config, const Dataset& data) {
  const std::size_t base = config.combined_cap == CombinedCap::Subset ? data.count(Subset::B) : data.size();
  return config.k / static_cast<double>(std::max<std::size_t>(base, 1));
}

void validate(const BoosterConfig& config, const Dataset& data) {
  if (config.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (config.target_error && !(*config.target_error >= 0.0 && *config.target_error <= 1.0)) {
    throw ConfigError("target error must lie in [0, 1]");
  }
  const Algorithm a = config.algorithm;
  if (a == Algorithm::Smooth || a == Algorithm::Combined) {
    if (!(config.k >= 1.0) || !std::isfinite(config.k)) {
      throw ConfigError("k must be a finite value >= 1 (the capped simplex is empty otherwise)");
    }
  }
  if (a == Algorithm::Smooth && config.target_error && *config.target_error < 1.0 / config.k) {
    throw ConfigError("smooth boosting needs target error >= 1/k");
  }
  if (a == Algorithm::Combined && !data.has_subsets()) {
    throw ConfigError("combined boosting needs per-sample A/B subset flags");
  }
  if (a == Algorithm::Sparse && config.geometry != GeometryKind::Quadratic) {
    throw ConfigError("sparse boosting requires the quadratic geometry");
  }
  if (a == Algorithm::Mada && config.geometry != GeometryKind::NegativeEntropy) {
    throw ConfigError("the MadaBoost variant requires the entropy geometry");
  }
}

double effective_target(const BoosterConfig& config) {
  if (config.target_error) return *config.target_error;
  return config.algorithm == Algorithm::Smooth ? 1.0 / config.k : 0.0;
}

// ---- ensemble ---------------------------------------------------------------------

double Ensemble::eta_sum() const {
  double s = 0.0;
  for (const auto& m : members) s += m.eta;
  return s;
}

double Ensemble::score(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& m : members) s += m.eta * m.stump(x);
  return s;
}

int predict(const Ensemble& f, std::span<const double> x) {
  if (f.empty()) throw UsageError("cannot predict with an empty ensemble");
  return f.score(x) >= 0.0 ? 1 : -1;
}

double margin(const Ensemble& f, const Dataset& data) {
  if (f.empty()) throw UsageError("margin of an empty ensemble is undefined");
  const double total = f.eta_sum();
  double m = kInf;
  for (std::size_t i = 0; i < data.size(); ++i) m = std::min(m, data.label(i) * f.score(data.row(i)) / total);
  return m;
}

// ---- runners ----------------------------------------------------------------------

RunResult run(const BoosterConfig& config, const Dataset& data) {
  switch (config.algorithm) {
    case Algorithm::MABoostActive:
    case Algorithm::MABoostLazy: return run_maboost(config, data);
    case Algorithm::MaxMargin: return run_max_margin(config, data);
    case Algorithm::Smooth: return run_smooth(config, data);
    case Algorithm::Combined: return run_combined(config, data);
    case Algorithm::Sparse: return run_sparse(config, data);
    case Algorithm::Mada: return run_mada(config, data);
  }
  throw UsageError("unknown algorithm");
}

RunResult run_maboost(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::MABoostActive, Algorithm::MABoostLazy}, "run_maboost");
  return run_mirror(config, data);
}

RunResult run_max_margin(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::MaxMargin}, "run_max_margin");
  return run_mirror(config, data);
}

RunResult run_smooth(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::Smooth}, "run_smooth");
  return run_mirror(config, data);
}

RunResult run_combined(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::Combined}, "run_combined");
  return run_mirror(config, data);
}

// SparseBoost: z = y + eta d, y' = max(0, z - alpha eta), w = y' / |y'|_1.
RunResult run_sparse(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::Sparse}, "run_sparse");
  validate(config, data);
  const std::size_t n = data.size();
  const double nd = static_cast<double>(n);
  const double target = effective_target(config);
  const bool half = config.alpha_mode == AlphaMode::Half;

  const StumpLearner learner(data);
  RunResult result;
  std::vector<double> y(n, 1.0 / nd);
  std::vector<double> w(n);
  ScoreTracker tracker(data);
  double acc = 0.0;  // sum gamma^2 |y|_1^2

  for (int t = 1; t <= config.max_rounds; ++t) {
    double y_norm = 0.0;
    for (double v : y) y_norm += v;
    for (std::size_t i = 0; i < n; ++i) w[i] = y[i] / y_norm;
    if (config.record_weights) result.weights.push_back(w);

    const StumpFit fit = learner.fit(w);
    const double gamma = fit.edge;
    if (gamma <= kEdgeFloor) {
      if (t == 1) throw NoWeakLearnabilityError("weak learner has zero edge under the uniform distribution");
      result.stop = StopReason::ZeroEdge;
      break;
    }
    const double eta = half ? gamma * y_norm / (2.0 * nd) : gamma * y_norm / nd;
    const double alpha = half ? std::min(1.0, 0.5 * gamma * y_norm) : 0.0;
    const std::vector<double> d = loss_vector(data, fit.stump);

    RoundTrace rec;
    rec.t = t;
    rec.gamma = gamma;
    rec.eta = eta;
    rec.y_norm = y_norm;
    weight_stats(w, rec);

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = y[i] + eta * d[i];
    y = project_orthant_l1(z, alpha * eta);
    double next_norm = 0.0;
    for (double v : y) next_norm += v;
    rec.y_norm_next = next_norm;

    result.state.ensemble.members.push_back({fit.stump, eta});
    tracker.add(fit.stump, eta);
    rec.train_error = tracker.error();
    acc += gamma * gamma * y_norm * y_norm;
    rec.bound = bounds::sparse(config.alpha_mode, acc);

    if (config.check_bounds) {
      check_distribution(t, w, {});
      check_error_bound(t, rec.train_error, rec.bound, "SparseBoost");
      if (!half && rec.train_error > 0.0 && next_norm < 1.0 / nd - 1e-12) {
        violation(t, "|y|_1 fell below 1/N while the ensemble still errs");
      }
    }
    result.trace.push_back(rec);

    if (next_norm <= 0.0) {
      result.stop = StopReason::Collapsed;
      break;
    }
    if (config.stop_at_target && rec.train_error <= target) {
      result.stop = StopReason::TargetReached;
      break;
    }
  }
  double total = 0.0;
  for (double v : y) total += v;
  if (total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) w[i] = y[i] / total;
    if (config.record_weights) result.weights.push_back(w);
  }
  result.state.w = std::move(w);
  result.state.aux = std::move(y);
  return result;
}

// MadaBoost variant: z_{t+1} = z_t exp(eta d), y = min(1, z), w = y / |y|_1,
// with eta_t = eps * gamma_t. The empty ensemble counts as eps_0 = 1, which
// matches y_1 = 1 and |y_1|_1 = N eps_0.
RunResult run_mada(const BoosterConfig& config, const Dataset& data) {
  require_algorithm(config, {Algorithm::Mada}, "run_mada");
  validate(config, data);
  const std::size_t n = data.size();
  const double nd = static_cast<double>(n);
  const double target = effective_target(config);

  const StumpLearner learner(data);
  RunResult result;
  std::vector<double> log_z(n, 0.0);
  std::vector<double> y(n, 1.0);
  std::vector<double> w(n);
  ScoreTracker tracker(data);
  double prev_error = 1.0;
  double gamma_min = kInf;

  for (int t = 1; t <= config.max_rounds; ++t) {
    double y_norm = 0.0;
    for (double v : y) y_norm += v;
    for (std::size_t i = 0; i < n; ++i) w[i] = y[i] / y_norm;
    if (config.record_weights) result.weights.push_back(w);

    const StumpFit fit = learner.fit(w);
    const double gamma = fit.edge;
    if (gamma <= kEdgeFloor) {
      if (t == 1) throw NoWeakLearnabilityError("weak learner has zero edge under the uniform distribution");
      result.stop = StopReason::ZeroEdge;
      break;
    }
    double eta = prev_error * gamma;
    if (config.mada_eta == MadaEta::FixedPoint) {
      const double provisional = tracker.error_with(fit.stump, eta);
      if (provisional > 0.0) eta = provisional * gamma;
    }
    const std::vector<double> d = loss_vector(data, fit.stump);

    RoundTrace rec;
    rec.t = t;
    rec.gamma = gamma;
    rec.eta = eta;
    rec.y_norm = y_norm;
    weight_stats(w, rec);

    result.state.ensemble.members.push_back({fit.stump, eta});
    tracker.add(fit.stump, eta);
    rec.train_error = tracker.error();

    double next_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      log_z[i] += eta * d[i];
      y[i] = std::exp(std::min(0.0, log_z[i]));  // entropic hypercube projection
      next_norm += y[i];
    }
    rec.y_norm_next = next_norm;
    gamma_min = std::min(gamma_min, gamma);
    const double sq = bounds::mada_squared(t, gamma_min);
    rec.bound = std::sqrt(sq);

    if (config.check_bounds) {
      check_distribution(t, w, {});
      if (!(rec.train_error * rec.train_error <= sq + kBoundSlack)) {
        violation(t, "MadaBoost bound violated: train_error^2 " +
                         std::to_string(rec.train_error * rec.train_error) + " > " + std::to_string(sq));
      }
      if (next_norm < nd * rec.train_error - kBoundSlack) violation(t, "|y|_1 < N * train_error");
    }
    result.trace.push_back(rec);
    prev_error = rec.train_error;

    if (config.stop_at_target && rec.train_error <= target) {
      result.stop = StopReason::TargetReached;
      break;
    }
  }
  double total = 0.0;
  for (double v : y) total += v;
  for (std::size_t i = 0; i < n; ++i) w[i] = y[i] / total;
  if (config.record_weights) result.weights.push_back(w);
  result.state.w = std::move(w);
  result.state.aux.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.state.aux[i] = std::exp(log_z[i]);
  return result;
}

// ---- bounds -----------------------------------------------------------------------

namespace bounds {

double quadratic(double sum_gamma_sq) { return 1.0 / (1.0 + sum_gamma_sq); }

double entropic(double sum_gamma_sq) { return std::exp(-0.5 * sum_gamma_sq); }

double maboost(GeometryKind g, double sum_gamma_sq) {
  return g == GeometryKind::Quadratic ? quadratic(sum_gamma_sq) : entropic(sum_gamma_sq);
}

double general(GeometryKind g, std::size_t n, double gain) {
  if (g == GeometryKind::NegativeEntropy) return std::min(1.0, std::exp(-gain));
  const double denom = 1.0 + 2.0 * static_cast<double>(n) * gain;
  return denom <= 1.0 ? 1.0 : 1.0 / denom;
}

double sparse_constant(AlphaMode mode) { return mode == AlphaMode::Zero ? 1.0 : 0.25; }

double sparse(AlphaMode mode, double acc) { return 1.0 / (1.0 + sparse_constant(mode) * acc); }

double mada_squared(int t, double gamma_min) { return 1.0 / (static_cast<double>(t) * gamma_min * gamma_min); }

double point_mass_divergence(GeometryKind g, std::size_t n) {
  const double nd = static_cast<double>(n);
  return g == GeometryKind::NegativeEntropy ? std::log(nd) : 0.5 * (1.0 - 1.0 / nd);
}

double margin_accuracy(int t, double gamma_min, double L, double C) {
  const double td = static_cast<double>(t);
  const double root = std::sqrt(td + 1.0) - 1.0;
  return (1.0 + std::log(td)) / (2.0 * root) * gamma_min + L * C / (gamma_min * root);
}

}  // namespace bounds

}  // namespace maboost
