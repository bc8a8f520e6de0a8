#include "maboost/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "maboost/bench.hpp"
#include "maboost/boost.hpp"
#include "maboost/dataset.hpp"
#include "maboost/error.hpp"
#include "maboost/projection.hpp"
#include "maboost/trace_io.hpp"
#include "text.hpp"

namespace maboost::cli {
namespace {

struct DataSource {
  std::string path;
  std::string gen;
  std::string format = "auto";
  std::string label_column = "label";
  std::string subset_column;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", path, "CSV or LIBSVM file");
    cmd->add_option("--gen", gen,
                    "generator: blobs:SEED:N:MARGIN | noisy:SEED:N:FLIP | diag:SEED:N:MARGIN | "
                    "combined:SEED:NA:NB:FLIP");
    cmd->add_option("--format", format, "input format for --data")->check(CLI::IsMember({"auto", "csv", "libsvm"}));
    cmd->add_option("--label-column", label_column, "CSV label column name");
    cmd->add_option("--subset-column", subset_column, "CSV column holding A/B membership");
  }
};

std::uint64_t parse_seed(std::string_view s) {
  const auto v = text::parse_int(s);
  if (!v || *v < 0) throw UsageError("bad generator seed '" + std::string(s) + "'");
  return static_cast<std::uint64_t>(*v);
}

std::size_t parse_count(std::string_view s) {
  const auto v = text::parse_int(s);
  if (!v || *v < 1) throw UsageError("bad generator size '" + std::string(s) + "'");
  return static_cast<std::size_t>(*v);
}

double parse_real(std::string_view s) {
  const auto v = text::parse_double(s);
  if (!v) throw UsageError("bad number '" + std::string(s) + "'");
  return *v;
}

Dataset generate(const std::string& spec) {
  const auto parts = text::split(spec, ':');
  const auto kind = parts[0];
  if (kind == "blobs" && parts.size() == 4) {
    return gen_blobs(parse_seed(parts[1]), parse_count(parts[2]), parse_real(parts[3]));
  }
  if (kind == "noisy" && parts.size() == 4) {
    return gen_noisy(parse_seed(parts[1]), parse_count(parts[2]), parse_real(parts[3]));
  }
  if (kind == "diag" && parts.size() == 4) {
    return gen_diagonal(parse_seed(parts[1]), parse_count(parts[2]), parse_real(parts[3]));
  }
  if (kind == "combined" && parts.size() == 5) {
    return gen_combined(parse_seed(parts[1]), parse_count(parts[2]), parse_count(parts[3]), parse_real(parts[4]));
  }
  throw UsageError("unrecognized generator spec '" + spec + "'");
}

Dataset load(const DataSource& src) {
  if (src.path.empty() == src.gen.empty()) throw UsageError("give exactly one of --data or --gen");
  if (!src.gen.empty()) return generate(src.gen);
  std::string format = src.format;
  if (format == "auto") {
    const auto ext = std::filesystem::path(src.path).extension().string();
    format = (ext == ".libsvm" || ext == ".svm") ? "libsvm" : "csv";
  }
  if (format == "libsvm") return load_libsvm(src.path);
  CsvOptions options;
  options.label_column = src.label_column;
  if (!src.subset_column.empty()) options.subset_column = src.subset_column;
  return load_csv(src.path, options);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

ConstraintSet parse_set(const std::string& spec, std::size_t n, bool& is_double) {
  is_double = false;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "simplex" && arg.empty()) return Simplex{};
  if (kind == "hypercube" && arg.empty()) return UnitHypercube{};
  if (kind == "double" && arg.empty()) {
    is_double = true;
    return Simplex{};
  }
  if (kind == "capped" && !arg.empty()) return CappedSimplex{parse_real(arg)};
  if (kind == "orthant-l1" && !arg.empty()) return PositiveOrthant{parse_real(arg)};
  if (kind == "mixed" && !arg.empty()) {
    MixedCaps caps;
    for (auto part : text::split(arg, ',')) caps.caps.push_back(parse_real(text::trim(part)));
    if (caps.caps.size() != n) throw UsageError("mixed caps count does not match the vector length");
    return caps;
  }
  throw UsageError("unrecognized set '" + spec +
                   "' (expected simplex | capped:CAP | mixed:C1,C2,.. | hypercube | orthant-l1:LAMBDA | double)");
}

struct TrainArgs {
  std::string algo;
  std::string geometry;
  DataSource source;
  int rounds = 100;
  std::optional<double> target;
  std::optional<double> k;
  std::string alpha_mode = "zero";
  std::string mada_eta = "previous_error";
  std::string combined_cap = "subset";
  bool full_rounds = false;
  std::string trace_path;
  std::string model_path;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  BoosterConfig config;
  config.algorithm = parse_algorithm(a.algo);
  if (!a.geometry.empty()) {
    config.geometry = parse_geometry_kind(a.geometry);
  } else {
    config.geometry = config.algorithm == Algorithm::Sparse ? GeometryKind::Quadratic : GeometryKind::NegativeEntropy;
  }
  if (config.algorithm == Algorithm::Sparse && config.geometry != GeometryKind::Quadratic) {
    throw UsageError("--algo sparse requires --geometry quadratic");
  }
  if (config.algorithm == Algorithm::Mada && config.geometry != GeometryKind::NegativeEntropy) {
    throw UsageError("--algo mada requires --geometry entropy");
  }
  const bool needs_k = config.algorithm == Algorithm::Smooth || config.algorithm == Algorithm::Combined;
  if (needs_k && !a.k) throw UsageError("--algo " + a.algo + " requires --k (k >= 1)");
  if (a.k) config.k = *a.k;
  config.max_rounds = a.rounds;
  config.target_error = a.target;
  config.alpha_mode = parse_alpha_mode(a.alpha_mode);
  config.mada_eta = parse_mada_eta(a.mada_eta);
  config.combined_cap = parse_combined_cap(a.combined_cap);
  config.stop_at_target = !a.full_rounds;

  const Dataset data = load(a.source);
  validate(config, data);
  const RunResult result = run(config, data);

  if (!a.trace_path.empty()) {
    auto trace_out = open_output(a.trace_path);
    write_trace(trace_out, make_trace_header(config, data), result.trace);
  }
  if (!a.model_path.empty()) {
    auto model_out = open_output(a.model_path);
    write_model(model_out, Model{config.algorithm, config.geometry, data.dim(), result.state.ensemble});
  }
  const RoundTrace& last = result.trace.back();
  out << "rounds=" << result.trace.size() << " train_error=" << text::format_double(last.train_error)
      << " bound=" << text::format_double(last.bound) << '\n';
  err << "stop=" << to_string(result.stop) << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  const Trace trace = read_trace(in);
  const VerifyReport report = verify_trace(trace);
  if (report.vacuous) {
    err << "warning: trace has no rounds; nothing to verify\n";
    out << "PASS (vacuous)\n";
    return kExitOk;
  }
  for (const auto& c : report.checks) {
    if (c.pass) {
      out << "PASS " << c.family << " (" << c.rounds_checked << " rounds checked)\n";
    } else {
      out << "FAIL " << c.family << ": first violation at round " << *c.first_violation << " (" << c.detail
          << ")\n";
    }
  }
  return report.pass() ? kExitOk : kExitBound;
}

int cmd_project(const std::string& geometry, const std::string& set_spec, std::istream& in, std::ostream& out) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("stdin is not JSON: ") + e.what());
  }
  if (!j.is_array()) throw UsageError("stdin must be a JSON array of numbers");
  std::vector<double> z;
  for (const auto& v : j) {
    if (!v.is_number()) throw UsageError("stdin must be a JSON array of numbers");
    z.push_back(v.get<double>());
  }
  const GeometryKind kind = parse_geometry_kind(geometry);
  const Geometry g = Geometry::make(kind, std::max<std::size_t>(z.size(), 1));
  bool is_double = false;
  const ConstraintSet set = parse_set(set_spec, z.size(), is_double);
  const std::vector<double> w = is_double ? project_double(g, z, UnitHypercube{}, Simplex{}) : project(g, z, set);
  out << nlohmann::json(w).dump() << '\n';
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const DataSource& source, std::ostream& out) {
  std::ifstream in(model_path);
  if (!in) throw UsageError("cannot open " + model_path);
  const Model model = read_model(in);
  const Dataset data = load(source);
  if (data.dim() < model.dim) throw UsageError("data has fewer features than the model expects");
  for (std::size_t i = 0; i < data.size(); ++i) out << predict(model.ensemble, data.row(i)) << '\n';
  return kExitOk;
}

int cmd_bench(const std::optional<std::string>& filter, bool list, std::ostream& out) {
  if (list) {
    for (const auto& c : bench::acceptance_criteria()) out << c.id << ' ' << c.name << '\n';
    return kExitOk;
  }
  const auto outcomes = bench::run_criteria(filter);
  if (outcomes.empty()) throw UsageError("no criterion matches '" + filter.value_or("") + "'");
  bench::print_table(out, outcomes);
  const bool ok = std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.result.pass; });
  return ok ? kExitOk : kExitBound;
}

}  // namespace

int run(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mirror-ascent boosting: train, verify bounds, project, bench"};
  app.name("maboost");
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "run a booster and write its trace and model");
  train_cmd->add_option("--algo", train.algo, "maboost-active|maboost-lazy|maxmargin|smooth|combined|sparse|mada")
      ->required();
  train_cmd->add_option("--geometry", train.geometry, "quadratic|entropy");
  train.source.add_to(train_cmd);
  train_cmd->add_option("--rounds", train.rounds, "maximum number of rounds")->check(CLI::PositiveNumber);
  train_cmd->add_option("--target-eps", train.target, "stop once the training error reaches this value");
  train_cmd->add_option("--k", train.k, "smoothness parameter (smooth, combined)");
  train_cmd->add_option("--alpha-mode", train.alpha_mode, "sparse l1 schedule: zero|half");
  train_cmd->add_option("--mada-eta", train.mada_eta, "previous_error|fixed_point");
  train_cmd->add_option("--combined-cap", train.combined_cap, "B-sample cap k/N_B (subset) or k/N (total)");
  train_cmd->add_flag("--full-rounds", train.full_rounds, "ignore the error target and run every round");
  train_cmd->add_option("--trace", train.trace_path, "JSON-lines trace output");
  train_cmd->add_option("--model", train.model_path, "model output");

  std::string trace_path;
  auto* verify_cmd = app.add_subcommand("verify", "re-check every bound recorded in a trace");
  verify_cmd->add_option("trace", trace_path, "trace file")->required();

  std::string geometry;
  std::string set_spec;
  auto* project_cmd = app.add_subcommand("project", "project a JSON vector read from stdin");
  project_cmd->add_option("--geometry", geometry, "quadratic|entropy")->required();
  project_cmd->add_option("--set", set_spec, "simplex|capped:CAP|mixed:C1,..|hypercube|orthant-l1:LAMBDA|double")
      ->required();

  std::string model_path;
  DataSource predict_source;
  auto* predict_cmd = app.add_subcommand("predict", "print the model's prediction for each sample");
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_source.add_to(predict_cmd);

  std::optional<std::string> criterion;
  bool list = false;
  auto* bench_cmd = app.add_subcommand("bench", "run the acceptance criteria");
  bench_cmd->add_option("--criterion", criterion, "run a single criterion by id or name");
  bench_cmd->add_flag("--list", list, "list criteria");

  std::vector<std::string> storage{"maboost"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, out, err);
    if (*verify_cmd) return cmd_verify(trace_path, out, err);
    if (*project_cmd) return cmd_project(geometry, set_spec, in, out);
    if (*predict_cmd) return cmd_predict(model_path, predict_source, out);
    if (*bench_cmd) return cmd_bench(criterion, list, out);
  } catch (const NoWeakLearnabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitLearner;
  } catch (const BoundViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitBound;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace maboost::cli
