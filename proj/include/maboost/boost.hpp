#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "maboost/dataset.hpp"
#include "maboost/geometry.hpp"
#include "maboost/weaklearn.hpp"

namespace maboost {

enum class Algorithm { MABoostActive, MABoostLazy, MaxMargin, Smooth, Combined, Sparse, Mada };

/// SparseBoost l1 schedule: alpha = 0, or alpha = min(1, gamma |y|_1 / 2).
enum class AlphaMode { Zero, Half };

/// How the MadaBoost variant picks eta_t = eps * gamma_t: with the previous
/// round's ensemble error, or with one refinement using the error of the
/// ensemble that already includes h_t at the provisional step.
enum class MadaEta { PreviousError, FixedPoint };
/// Denominator of the B-sample cap in combined boosting: k / N_B (Subset) or
/// k / N over all samples (Total). With Total and N_B <= N / k the caps leave
/// only the uniform distribution on B once A is fit.
enum class CombinedCap { Subset, Total };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(AlphaMode m);
AlphaMode parse_alpha_mode(std::string_view name);
std::string_view to_string(MadaEta m);
MadaEta parse_mada_eta(std::string_view name);
std::string_view to_string(CombinedCap c);
CombinedCap parse_combined_cap(std::string_view name);

struct BoosterConfig {
  Algorithm algorithm = Algorithm::MABoostActive;
  GeometryKind geometry = GeometryKind::NegativeEntropy;
  int max_rounds = 100;
  /// Stop once the training error reaches this value. Unset means 1/k for
  /// Smooth and 0 otherwise. MaxMargin ignores it and always runs max_rounds.
  std::optional<double> target_error;
  double k = 1.0;  ///< smoothness parameter for Smooth and Combined
  AlphaMode alpha_mode = AlphaMode::Zero;
  MadaEta mada_eta = MadaEta::PreviousError;
  CombinedCap combined_cap = CombinedCap::Subset;
  /// When false every run lasts max_rounds (or until the edge vanishes).
  bool stop_at_target = true;
  /// Throw BoundViolation when a per-round guarantee fails.
  bool check_bounds = true;
  /// Keep w_1 .. w_{T+1} in RunResult::weights.
  bool record_weights = false;
};

/// Throws ConfigError for invalid or inconsistent settings.
void validate(const BoosterConfig& config, const Dataset& data);
double effective_target(const BoosterConfig& config);
/// Upper bound on each B-sample weight in combined boosting.
double combined_b_cap(const BoosterConfig& config, const Dataset& data);

struct WeightedStump {
  Stump stump;
  double eta = 0.0;

  bool operator==(const WeightedStump&) const = default;
};

/// The weighted vote f(x) = sign(sum_t eta_t h_t(x)).
struct Ensemble {
  std::vector<WeightedStump> members;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
  double eta_sum() const;
  /// sum_t eta_t h_t(x), accumulated in round order.
  double score(std::span<const double> x) const;

  bool operator==(const Ensemble&) const = default;
};

/// sign of the weighted vote with sign(0) = +1.
int predict(const Ensemble& f, std::span<const double> x);

/// min_j a_j f(x_j) / sum_t eta_t.
double margin(const Ensemble& f, const Dataset& data);

struct RoundTrace {
  int t = 0;
  double gamma = 0.0;
  double eta = 0.0;
  double train_error = 0.0;  ///< error of the ensemble through round t
  double bound = 1.0;        ///< theoretical bound on train_error at round t
  double max_weight = 0.0;   ///< of the distribution handed to the learner
  std::size_t nnz = 0;
  std::optional<double> margin;  ///< MaxMargin
  std::optional<double> nu;      ///< MaxMargin: accuracy term with gamma_min = min observed edge
  std::optional<double> eps_a;   ///< Combined
  std::optional<double> eps_b;
  std::optional<double> y_norm;       ///< Sparse, Mada: |y_t|_1 before the update
  std::optional<double> y_norm_next;  ///< Sparse, Mada: |y_{t+1}|_1 after it
};

enum class StopReason { MaxRounds, TargetReached, ZeroEdge, Collapsed };
std::string_view to_string(StopReason r);

/// Booster state at termination.
struct EnsembleState {
  Ensemble ensemble;
  std::vector<double> w;    ///< current distribution
  std::vector<double> aux;  ///< z (lazy, Mada) or y (Sparse); empty otherwise
};

struct RunResult {
  EnsembleState state;
  std::vector<RoundTrace> trace;
  StopReason stop = StopReason::MaxRounds;
  std::vector<std::vector<double>> weights;  ///< filled when record_weights
};

/// Runs the configured algorithm.
RunResult run(const BoosterConfig& config, const Dataset& data);

RunResult run_maboost(const BoosterConfig& config, const Dataset& data);
RunResult run_max_margin(const BoosterConfig& config, const Dataset& data);
RunResult run_smooth(const BoosterConfig& config, const Dataset& data);
RunResult run_combined(const BoosterConfig& config, const Dataset& data);
RunResult run_sparse(const BoosterConfig& config, const Dataset& data);
RunResult run_mada(const BoosterConfig& config, const Dataset& data);

/// Closed-form training-error bounds.
namespace bounds {

/// Quadratic MABoost: 1 / (1 + sum gamma^2).
double quadratic(double sum_gamma_sq);
/// Entropic MABoost: exp(-sum gamma^2 / 2).
double entropic(double sum_gamma_sq);
double maboost(GeometryKind g, double sum_gamma_sq);

/// Bound for an arbitrary step schedule, from
/// gain = sum_t (eta_t gamma_t - L eta_t^2 / 2):
/// quadratic 1 / (1 + 2 N gain), entropic exp(-gain).
double general(GeometryKind g, std::size_t n, double gain);

/// SparseBoost: 1 / (1 + c sum gamma^2 |y|_1^2), c = 1 (Zero) or 1/4 (Half).
double sparse_constant(AlphaMode mode);
double sparse(AlphaMode mode, double sum_gamma_sq_ynorm_sq);

/// MadaBoost variant: eps_t^2 <= 1 / (t gamma_min^2); returns the bound on eps_t^2.
double mada_squared(int t, double gamma_min);

/// B_R(w*, w_1) for w* a point mass and w_1 uniform: log N (entropy) or
/// (1 - 1/N) / 2 (quadratic).
double point_mass_divergence(GeometryKind g, std::size_t n);

/// nu(T) = (1 + log T) / (2 sqrt(T+1) - 2) * gamma_min
///         + L C / (gamma_min (sqrt(T+1) - 1)).
double margin_accuracy(int t, double gamma_min, double L, double C);

}  // namespace bounds

/// Additive slack used for every bound assertion.
inline constexpr double kBoundSlack = 1e-9;
/// Edges at or below this are treated as zero.
inline constexpr double kEdgeFloor = 1e-12;

}  // namespace maboost
