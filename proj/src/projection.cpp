#include "maboost/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maboost/error.hpp"

namespace maboost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-12;
constexpr int kMaxBisection = 200;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(std::span<const double> z) {
  for (double v : z) {
    if (!std::isfinite(v)) throw DomainError("projection input must be finite");
  }
}

// Entropic projections need z >= 0 with positive mass.
void require_entropic_input(std::span<const double> z) {
  require_finite(z);
  double total = 0.0;
  for (double v : z) {
    if (v < 0.0) throw DomainError("entropic projection requires non-negative input");
    total += v;
  }
  if (total <= 0.0) throw DegenerateInputError("entropic projection of an all-zero vector");
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

std::vector<double> to_log(std::span<const double> z) {
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](double v) { return std::log(v); });
  return out;
}

std::vector<double> from_log(std::span<const double> log_w, std::span<const double> caps) {
  std::vector<double> w(log_w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::min(caps[i], std::exp(log_w[i]));
  return w;
}

// Euclidean projection onto {sum w = 1, 0 <= w_i <= caps_i}. The solution is
// clamp(z_i - theta, 0, cap_i); sum is non-increasing in theta, so bisect on
// theta and then solve exactly for theta on the identified free set.
std::vector<double> quadratic_capped(std::span<const double> z, std::span<const double> caps) {
  const std::size_t n = z.size();
  auto mass = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::clamp(z[i] - theta, 0.0, caps[i]);
    return s;
  };

  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min(lo, z[i] - std::min(caps[i], 1.0));
    hi = std::max(hi, z[i]);
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxBisection; ++it) {
    theta = 0.5 * (lo + hi);
    const double m = mass(theta);
    if (std::abs(m - 1.0) <= 1e-12) break;
    if (m > 1.0) {
      lo = theta;
    } else {
      hi = theta;
    }
  }

  // Closed-form theta for the current active set, kept only if the set is
  // unchanged under it.
  double free_sum = 0.0;
  double capped_sum = 0.0;
  std::size_t free_count = 0;
  std::vector<char> state(n);  // 0 zero, 1 free, 2 capped
  for (std::size_t i = 0; i < n; ++i) {
    const double v = z[i] - theta;
    if (v >= caps[i]) {
      state[i] = 2;
      capped_sum += caps[i];
    } else if (v > 0.0) {
      state[i] = 1;
      free_sum += z[i];
      ++free_count;
    }
  }
  if (free_count > 0) {
    const double exact = (free_sum + capped_sum - 1.0) / static_cast<double>(free_count);
    bool same = true;
    for (std::size_t i = 0; i < n && same; ++i) {
      const double v = z[i] - exact;
      const char s = v >= caps[i] ? 2 : (v > 0.0 ? 1 : 0);
      same = s == state[i];
    }
    if (same) theta = exact;
  }

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::clamp(z[i] - theta, 0.0, caps[i]);
  return w;
}

std::vector<double> check_caps(std::span<const double> caps, std::size_t n) {
  if (caps.size() != n) {
    throw UsageError("caps length " + std::to_string(caps.size()) + " does not match input length " +
                     std::to_string(n));
  }
  return {caps.begin(), caps.end()};
}

}  // namespace

void check_feasible(const ConstraintSet& set, std::size_t n) {
  if (n == 0) throw ConfigError("cannot project a zero-length vector");
  std::visit(overloaded{
                 [](const Simplex&) {},
                 [n](const CappedSimplex& s) {
                   if (!(s.cap > 0.0) || s.cap * static_cast<double>(n) < 1.0 - kFeasTol) {
                     throw ConfigError("capped simplex is empty: cap * N = " +
                                       std::to_string(s.cap * static_cast<double>(n)) + " < 1");
                   }
                 },
                 [n](const MixedCaps& s) {
                   if (s.caps.size() != n) throw ConfigError("mixed caps length does not match N");
                   double total = 0.0;
                   for (double c : s.caps) {
                     if (!(c >= 0.0)) throw ConfigError("mixed caps must be non-negative");
                     total += std::min(c, 1.0);
                   }
                   if (total < 1.0 - kFeasTol) {
                     throw ConfigError("mixed-cap simplex is empty: sum of min(cap, 1) < 1");
                   }
                 },
                 [](const PositiveOrthant& s) {
                   if (!(s.lambda >= 0.0)) throw ConfigError("l1 weight must be non-negative");
                 },
                 [](const UnitHypercube&) {},
             },
             set);
}

namespace entropic {

std::vector<double> normalize_log(std::span<const double> log_z) {
  double m = -kInf;
  for (double v : log_z) m = std::max(m, v);
  if (m == -kInf) throw DegenerateInputError("entropic projection of an all-zero vector");
  double s = 0.0;
  for (double v : log_z) s += std::exp(v - m);
  // Subtract m before log(s): adding it back first loses |m| * eps.
  const double log_s = std::log(s);
  std::vector<double> out(log_z.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (log_z[i] - m) - log_s;
  return out;
}

std::vector<double> project_capped_log(std::span<const double> raw_log_z, std::span<const double> caps) {
  const std::size_t n = raw_log_z.size();
  if (caps.size() != n) throw UsageError("caps length does not match input length");

  // The projection ignores a common scale of z, so shift the largest log to 0.
  double m = -kInf;
  for (double v : raw_log_z) m = std::max(m, v);
  std::vector<double> log_z(raw_log_z.begin(), raw_log_z.end());
  if (m > -kInf) {
    for (double& v : log_z) v -= m;
  }

  // Coordinates bind in ascending order of cap_i / z_i.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    // A zero cap binds before anything else.
    ratio[i] = caps[i] == 0.0 ? -kInf : std::log(caps[i]) - log_z[i];
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });

  std::vector<double> suffix(n + 1, -kInf);
  for (std::size_t j = n; j-- > 0;) suffix[j] = log_add(log_z[order[j]], suffix[j + 1]);

  std::vector<double> out(n, -kInf);
  double capped_mass = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double remaining = 1.0 - capped_mass;
    if (remaining <= kFeasTol) return out;  // caps absorb all the mass
    if (j == n || suffix[j] == -kInf) {
      throw DegenerateInputError("entropic capped projection: remaining mass has no support");
    }
    const double log_s = std::log(remaining) - suffix[j];
    const std::size_t head = order[j];
    if (log_s + log_z[head] <= std::log(caps[head])) {
      for (std::size_t k = j; k < n; ++k) out[order[k]] = log_s + log_z[order[k]];
      return out;
    }
    out[head] = std::log(caps[head]);
    capped_mass += caps[head];
  }
  return out;
}

}  // namespace entropic

std::vector<double> project_simplex(const Geometry& g, std::span<const double> z) {
  if (z.empty()) throw UsageError("cannot project a zero-length vector");
  if (g.is_entropic()) {
    require_entropic_input(z);
    const double total = std::accumulate(z.begin(), z.end(), 0.0);
    std::vector<double> w(z.begin(), z.end());
    for (double& v : w) v /= total;
    return w;
  }
  require_finite(z);
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) w[i] = std::max(z[i] - theta, 0.0);
  return w;
}

std::vector<double> project_capped_simplex(const Geometry& g, std::span<const double> z, double cap) {
  check_feasible(CappedSimplex{cap}, z.size());
  const std::vector<double> caps(z.size(), cap);
  return project_mixed(g, z, caps);
}

std::vector<double> project_mixed(const Geometry& g, std::span<const double> z,
                                  std::span<const double> caps_in) {
  const std::vector<double> caps = check_caps(caps_in, z.size());
  check_feasible(MixedCaps{caps}, z.size());
  if (g.is_entropic()) {
    require_entropic_input(z);
    const std::vector<double> log_w = entropic::project_capped_log(to_log(z), caps);
    return from_log(log_w, caps);
  }
  require_finite(z);
  return quadratic_capped(z, caps);
}

std::vector<double> project_orthant_l1(std::span<const double> z, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("l1 weight must be non-negative");
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = std::max(0.0, z[i] - lambda);
  return y;
}

std::vector<double> project_hypercube_entropic(std::span<const double> z) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) throw DomainError("entropic hypercube projection requires strictly positive input");
    y[i] = std::min(1.0, z[i]);
  }
  return y;
}

std::vector<double> project_double(const Geometry& g, std::span<const double> z,
                                   const ConstraintSet& outer, const ConstraintSet& inner) {
  if (!std::holds_alternative<UnitHypercube>(outer) || !std::holds_alternative<Simplex>(inner)) {
    throw ConfigError("double projection supports only hypercube (outer) then simplex (inner)");
  }
  const std::vector<double> in_box = project(g, z, outer);
  return project_simplex(g, in_box);
}

std::vector<double> project(const Geometry& g, std::span<const double> z, const ConstraintSet& set) {
  return std::visit(
      overloaded{
          [&](const Simplex&) { return project_simplex(g, z); },
          [&](const CappedSimplex& s) { return project_capped_simplex(g, z, s.cap); },
          [&](const MixedCaps& s) { return project_mixed(g, z, s.caps); },
          [&](const PositiveOrthant& s) {
            if (g.is_entropic()) throw ConfigError("the l1-penalized orthant step is Euclidean only");
            return project_orthant_l1(z, s.lambda);
          },
          [&](const UnitHypercube&) {
            if (g.is_entropic()) return project_hypercube_entropic(z);
            require_finite(z);
            std::vector<double> y(z.begin(), z.end());
            for (double& v : y) v = std::clamp(v, 0.0, 1.0);
            return y;
          },
      },
      set);
}

}  // namespace maboost
