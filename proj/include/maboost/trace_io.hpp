#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maboost/boost.hpp"

namespace maboost {

// JSON-lines trace: one header object, then one object per completed round:
//
//   {"schema":1,"algorithm":"maboost-active","geometry":"entropy","n":200,"L":1.0,...}
//   {"t":1,"gamma":1.0,"eta":1.0,"train_error":0.0,"bound":0.6065306597126334,
//    "max_weight":0.005,"nnz":200}
//
// Optional round keys: margin, nu, eps_A, eps_B, y_norm, y_norm_next.

inline constexpr int kTraceSchema = 1;

struct TraceHeader {
  Algorithm algorithm = Algorithm::MABoostActive;
  GeometryKind geometry = GeometryKind::NegativeEntropy;
  std::size_t n = 0;
  double L = 1.0;
  double k = 1.0;
  AlphaMode alpha_mode = AlphaMode::Zero;
  MadaEta mada_eta = MadaEta::PreviousError;
  CombinedCap combined_cap = CombinedCap::Subset;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct Trace {
  std::optional<TraceHeader> header;  ///< absent only for an empty file
  std::vector<RoundTrace> rounds;
};

TraceHeader make_trace_header(const BoosterConfig& config, const Dataset& data);

void write_trace_header(std::ostream& out, const TraceHeader& header);
void write_trace_round(std::ostream& out, const RoundTrace& round);
void write_trace(std::ostream& out, const TraceHeader& header, const std::vector<RoundTrace>& rounds);

/// Throws ParseError (with the 1-based line) on malformed input.
Trace read_trace(std::istream& in);

struct BoundCheck {
  std::string family;
  std::size_t rounds_checked = 0;
  bool pass = true;
  std::optional<int> first_violation;
  std::string detail;
};

struct VerifyReport {
  std::vector<BoundCheck> checks;
  bool vacuous = false;  ///< no rounds to check

  bool pass() const;
};

/// Recomputes every applicable bound from the gamma/eta/|y|_1 sequence in the
/// trace (the recorded `bound` field is not trusted) and compares each round's
/// training error against it with slack kBoundSlack.
VerifyReport verify_trace(const Trace& trace);

// ---- model file ---------------------------------------------------------------------
//
//   maboost-model 1 algorithm=maboost-active geometry=entropy dim=2 stumps=3
//   <feature> <threshold> <polarity> <eta>      (one line per stump)
//
// Numbers use the shortest round-trip form; thresholds may be -inf.

struct Model {
  Algorithm algorithm = Algorithm::MABoostActive;
  GeometryKind geometry = GeometryKind::NegativeEntropy;
  std::size_t dim = 0;
  Ensemble ensemble;

  bool operator==(const Model&) const = default;
};

void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);

}  // namespace maboost
