#include "maboost/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "maboost/error.hpp"
#include "text.hpp"

namespace maboost {
namespace {

using ordered_json = nlohmann::ordered_json;

double get_number(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw ParseError(std::string("missing numeric field '") + key + "'", line);
  return it->get<double>();
}

std::optional<double> get_optional(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  if (!it->is_number()) throw ParseError(std::string("field '") + key + "' is not numeric", line);
  return it->get<double>();
}

std::string get_string(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ParseError(std::string("missing string field '") + key + "'", line);
  return it->get<std::string>();
}

TraceHeader parse_header(const nlohmann::json& j, std::size_t line) {
  const auto schema = j.find("schema");
  if (schema == j.end() || !schema->is_number_integer()) throw ParseError("first line is not a trace header", line);
  if (schema->get<int>() != kTraceSchema) {
    throw ParseError("unsupported trace schema " + std::to_string(schema->get<int>()), line);
  }
  TraceHeader h;
  try {
    h.algorithm = parse_algorithm(get_string(j, "algorithm", line));
    h.geometry = parse_geometry_kind(get_string(j, "geometry", line));
    h.alpha_mode = parse_alpha_mode(j.value("alpha_mode", std::string("zero")));
    h.mada_eta = parse_mada_eta(j.value("mada_eta", std::string("previous_error")));
    h.combined_cap = parse_combined_cap(j.value("combined_cap", std::string("subset")));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line);
  }
  h.n = static_cast<std::size_t>(get_number(j, "n", line));
  h.L = get_number(j, "L", line);
  h.k = j.value("k", 1.0);
  h.n_a = j.value("n_a", std::size_t{0});
  h.n_b = j.value("n_b", std::size_t{0});
  if (h.n == 0) throw ParseError("header has n = 0", line);
  return h;
}

RoundTrace parse_round(const nlohmann::json& j, std::size_t line) {
  RoundTrace r;
  r.t = static_cast<int>(get_number(j, "t", line));
  r.gamma = get_number(j, "gamma", line);
  r.eta = get_number(j, "eta", line);
  r.train_error = get_number(j, "train_error", line);
  r.bound = get_number(j, "bound", line);
  r.max_weight = get_number(j, "max_weight", line);
  r.nnz = static_cast<std::size_t>(get_number(j, "nnz", line));
  r.margin = get_optional(j, "margin", line);
  r.nu = get_optional(j, "nu", line);
  r.eps_a = get_optional(j, "eps_A", line);
  r.eps_b = get_optional(j, "eps_B", line);
  r.y_norm = get_optional(j, "y_norm", line);
  r.y_norm_next = get_optional(j, "y_norm_next", line);
  return r;
}

// Accumulates the first failing round for one bound family.
class Family {
 public:
  explicit Family(std::string name) { check_.family = std::move(name); }

  void expect(bool ok, int t, const std::string& detail) {
    ++check_.rounds_checked;
    if (!ok && check_.pass) {
      check_.pass = false;
      check_.first_violation = t;
      check_.detail = detail;
    }
  }

  BoundCheck done() { return std::move(check_); }

 private:
  BoundCheck check_;
};

std::string le(double lhs, double rhs) {
  return text::format_double(lhs) + " > " + text::format_double(rhs);
}

}  // namespace

TraceHeader make_trace_header(const BoosterConfig& config, const Dataset& data) {
  TraceHeader h;
  h.algorithm = config.algorithm;
  h.geometry = config.geometry;
  h.n = data.size();
  h.L = Geometry::make(config.geometry, data.size()).dual_norm_sq_bound;
  h.k = config.k;
  h.alpha_mode = config.alpha_mode;
  h.mada_eta = config.mada_eta;
  h.combined_cap = config.combined_cap;
  if (data.has_subsets()) {
    h.n_a = data.count(Subset::A);
    h.n_b = data.count(Subset::B);
  }
  return h;
}

void write_trace_header(std::ostream& out, const TraceHeader& h) {
  ordered_json j;
  j["schema"] = kTraceSchema;
  j["algorithm"] = std::string(to_string(h.algorithm));
  j["geometry"] = std::string(to_string(h.geometry));
  j["n"] = h.n;
  j["L"] = h.L;
  if (h.algorithm == Algorithm::Smooth || h.algorithm == Algorithm::Combined) j["k"] = h.k;
  if (h.algorithm == Algorithm::Sparse) j["alpha_mode"] = std::string(to_string(h.alpha_mode));
  if (h.algorithm == Algorithm::Mada) j["mada_eta"] = std::string(to_string(h.mada_eta));
  if (h.algorithm == Algorithm::Combined) {
    j["n_a"] = h.n_a;
    j["n_b"] = h.n_b;
    j["combined_cap"] = std::string(to_string(h.combined_cap));
  }
  out << j.dump() << '\n';
}

void write_trace_round(std::ostream& out, const RoundTrace& r) {
  ordered_json j;
  j["t"] = r.t;
  j["gamma"] = r.gamma;
  j["eta"] = r.eta;
  j["train_error"] = r.train_error;
  j["bound"] = r.bound;
  j["max_weight"] = r.max_weight;
  j["nnz"] = r.nnz;
  if (r.margin) j["margin"] = *r.margin;
  if (r.nu) j["nu"] = *r.nu;
  if (r.eps_a) j["eps_A"] = *r.eps_a;
  if (r.eps_b) j["eps_B"] = *r.eps_b;
  if (r.y_norm) j["y_norm"] = *r.y_norm;
  if (r.y_norm_next) j["y_norm_next"] = *r.y_norm_next;
  out << j.dump() << '\n';
}

void write_trace(std::ostream& out, const TraceHeader& header, const std::vector<RoundTrace>& rounds) {
  write_trace_header(out, header);
  for (const auto& r : rounds) write_trace_round(out, r);
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("trace line is not a JSON object", line_no);
    if (!trace.header) {
      trace.header = parse_header(j, line_no);
      continue;
    }
    RoundTrace r = parse_round(j, line_no);
    const int expected = trace.rounds.empty() ? 1 : trace.rounds.back().t + 1;
    if (r.t != expected) {
      throw ParseError("round " + std::to_string(r.t) + " out of order (expected " + std::to_string(expected) + ")",
                       line_no);
    }
    trace.rounds.push_back(r);
  }
  return trace;
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

VerifyReport verify_trace(const Trace& trace) {
  VerifyReport report;
  if (!trace.header || trace.rounds.empty()) {
    report.vacuous = true;
    return report;
  }
  const TraceHeader& h = *trace.header;
  const double nd = static_cast<double>(h.n);
  const auto& rounds = trace.rounds;
  const std::string geom(to_string(h.geometry));

  double sum_gamma_sq = 0.0;
  double gain = 0.0;
  double acc = 0.0;
  double gamma_min = std::numeric_limits<double>::infinity();

  switch (h.algorithm) {
    case Algorithm::MABoostActive:
    case Algorithm::MABoostLazy:
    case Algorithm::Smooth: {
      Family f(h.algorithm == Algorithm::Smooth ? "smooth-" + geom : "error-bound-" + geom);
      Family caps("smooth-caps");
      for (const auto& r : rounds) {
        sum_gamma_sq += r.gamma * r.gamma;
        const double b = bounds::maboost(h.geometry, sum_gamma_sq);
        if (h.algorithm == Algorithm::Smooth) {
          if (r.train_error >= 1.0 / h.k) f.expect(r.train_error <= b + kBoundSlack, r.t, le(r.train_error, b));
          caps.expect(r.max_weight <= h.k / nd, r.t, le(r.max_weight, h.k / nd));
        } else {
          f.expect(r.train_error <= b + kBoundSlack, r.t, le(r.train_error, b));
        }
      }
      report.checks.push_back(f.done());
      if (h.algorithm == Algorithm::Smooth) report.checks.push_back(caps.done());
      break;
    }
    case Algorithm::MaxMargin: {
      Family f("gain-bound-" + geom);
      for (const auto& r : rounds) {
        gain += r.eta * r.gamma - 0.5 * h.L * r.eta * r.eta;
        const double b = bounds::general(h.geometry, h.n, gain);
        f.expect(r.train_error <= b + kBoundSlack, r.t, le(r.train_error, b));
      }
      report.checks.push_back(f.done());
      break;
    }
    case Algorithm::Combined: {
      Family fa("combined-A");
      Family fb("combined-B");
      const double n_a = static_cast<double>(h.n_a);
      const double n_b = static_cast<double>(h.n_b);
      const double cap_b = h.k / (h.combined_cap == CombinedCap::Subset ? std::max(n_b, 1.0) : nd);
      for (const auto& r : rounds) {
        sum_gamma_sq += r.gamma * r.gamma;
        const double b = bounds::maboost(h.geometry, sum_gamma_sq);
        if (!r.eps_a || !r.eps_b) throw ParseError("combined trace round lacks eps_A/eps_B", 0);
        const double share_a = *r.eps_a * n_a / nd;
        const double m_b = *r.eps_b * n_b;
        fa.expect(share_a <= b + kBoundSlack, r.t, le(share_a, b));
        if (m_b > 0.0 && 1.0 / m_b <= cap_b) fb.expect(m_b / nd <= b + kBoundSlack, r.t, le(m_b / nd, b));
      }
      report.checks.push_back(fa.done());
      report.checks.push_back(fb.done());
      break;
    }
    case Algorithm::Sparse: {
      Family f("sparse-error-bound");
      Family floor("sparse-ynorm-floor");
      for (const auto& r : rounds) {
        if (!r.y_norm || !r.y_norm_next) throw ParseError("sparse trace round lacks y_norm", 0);
        acc += r.gamma * r.gamma * *r.y_norm * *r.y_norm;
        const double b = bounds::sparse(h.alpha_mode, acc);
        f.expect(r.train_error <= b + kBoundSlack, r.t, le(r.train_error, b));
        if (h.alpha_mode == AlphaMode::Zero && r.train_error > 0.0) {
          floor.expect(*r.y_norm_next >= 1.0 / nd - 1e-12, r.t, le(1.0 / nd, *r.y_norm_next));
        }
      }
      report.checks.push_back(f.done());
      if (h.alpha_mode == AlphaMode::Zero) report.checks.push_back(floor.done());
      break;
    }
    case Algorithm::Mada: {
      Family f("mada-error-bound");
      Family chain("mada-ynorm-chain");
      for (const auto& r : rounds) {
        if (!r.y_norm_next) throw ParseError("mada trace round lacks y_norm_next", 0);
        gamma_min = std::min(gamma_min, r.gamma);
        const double sq = bounds::mada_squared(r.t, gamma_min);
        const double e2 = r.train_error * r.train_error;
        f.expect(e2 <= sq + kBoundSlack, r.t, le(e2, sq));
        chain.expect(*r.y_norm_next >= nd * r.train_error - kBoundSlack, r.t, le(nd * r.train_error, *r.y_norm_next));
      }
      report.checks.push_back(f.done());
      report.checks.push_back(chain.done());
      break;
    }
  }
  return report;
}

// ---- model ------------------------------------------------------------------------

void write_model(std::ostream& out, const Model& m) {
  out << "maboost-model 1 algorithm=" << to_string(m.algorithm) << " geometry=" << to_string(m.geometry)
      << " dim=" << m.dim << " stumps=" << m.ensemble.size() << '\n';
  for (const auto& ws : m.ensemble.members) {
    out << ws.stump.feature << ' ' << text::format_double(ws.stump.threshold) << ' ' << ws.stump.polarity << ' '
        << text::format_double(ws.eta) << '\n';
  }
}

Model read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty model file", line_no);
  const auto head = text::tokens(line);
  if (head.size() != 6 || head[0] != "maboost-model" || head[1] != "1") {
    throw ParseError("not a maboost model header", line_no);
  }
  auto field = [&](std::string_view tok, std::string_view key) {
    if (tok.substr(0, key.size()) != key || tok.size() <= key.size() || tok[key.size()] != '=') {
      throw ParseError("expected " + std::string(key) + "=...", line_no);
    }
    return tok.substr(key.size() + 1);
  };
  Model m;
  std::size_t count = 0;
  try {
    m.algorithm = parse_algorithm(field(head[2], "algorithm"));
    m.geometry = parse_geometry_kind(field(head[3], "geometry"));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line_no);
  }
  const auto dim = text::parse_int(field(head[4], "dim"));
  const auto stumps = text::parse_int(field(head[5], "stumps"));
  if (!dim || *dim < 1 || !stumps || *stumps < 0) throw ParseError("bad dim/stumps in header", line_no);
  m.dim = static_cast<std::size_t>(*dim);
  count = static_cast<std::size_t>(*stumps);

  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto toks = text::tokens(line);
    if (toks.size() != 4) throw ParseError("expected: feature threshold polarity eta", line_no);
    const auto feature = text::parse_int(toks[0]);
    const auto threshold = text::parse_double(toks[1]);
    const auto polarity = text::parse_int(toks[2]);
    const auto eta = text::parse_double(toks[3]);
    if (!feature || *feature < 0 || static_cast<std::size_t>(*feature) >= m.dim) {
      throw ParseError("bad feature index", line_no);
    }
    if (!threshold || std::isnan(*threshold)) throw ParseError("bad threshold", line_no);
    if (!polarity || (*polarity != 1 && *polarity != -1)) throw ParseError("polarity must be 1 or -1", line_no);
    if (!eta || !std::isfinite(*eta)) throw ParseError("bad eta", line_no);
    m.ensemble.members.push_back(
        {Stump{static_cast<std::size_t>(*feature), *threshold, static_cast<int>(*polarity)}, *eta});
  }
  if (m.ensemble.size() != count) {
    throw ParseError("header announces " + std::to_string(count) + " stumps, found " +
                         std::to_string(m.ensemble.size()),
                     line_no);
  }
  return m;
}

}  // namespace maboost
