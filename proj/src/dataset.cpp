#include "maboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "maboost/error.hpp"
#include "text.hpp"

namespace maboost {
namespace {

// Tracks which label convention a file uses; mixing -1 with 0 is rejected.
class LabelReader {
 public:
  int read(std::string_view cell, std::size_t line) {
    const auto v = text::parse_double(text::trim(cell));
    if (!v) throw ParseError("label '" + std::string(cell) + "' is not numeric", line);
    if (*v == 1.0) return 1;
    if (*v == -1.0) {
      if (saw_zero_) throw ParseError("label -1 mixed with 0/1 labels", line);
      saw_minus_ = true;
      return -1;
    }
    if (*v == 0.0) {
      if (saw_minus_) throw ParseError("label 0 mixed with -1/+1 labels", line);
      saw_zero_ = true;
      return -1;
    }
    throw ParseError("label '" + std::string(cell) + "' is not in {-1,+1} or {0,1}", line);
  }

 private:
  bool saw_zero_ = false;
  bool saw_minus_ = false;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return in;
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::size_t dim, std::vector<int> labels,
                 std::vector<Subset> subsets)
    : features_(std::move(features)), dim_(dim), labels_(std::move(labels)), subsets_(std::move(subsets)) {
  if (labels_.empty()) throw ConfigError("dataset needs at least one sample");
  if (dim_ == 0) throw ConfigError("dataset needs at least one feature");
  if (features_.size() != labels_.size() * dim_) {
    throw ConfigError("feature matrix size does not match N x d");
  }
  for (int a : labels_) {
    if (a != 1 && a != -1) throw ConfigError("labels must be -1 or +1");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw ConfigError("features must be finite");
  }
  if (!subsets_.empty() && subsets_.size() != labels_.size()) {
    throw ConfigError("subset flags must cover every sample");
  }
}

std::size_t Dataset::count(Subset s) const {
  return static_cast<std::size_t>(std::count(subsets_.begin(), subsets_.end(), s));
}

Dataset concat(const Dataset& first, const Dataset& second) {
  if (first.dim() != second.dim()) throw ConfigError("cannot concatenate datasets of different dimension");
  if (first.has_subsets() != second.has_subsets()) {
    throw ConfigError("cannot concatenate a dataset with subset flags and one without");
  }
  std::vector<double> f(first.features().begin(), first.features().end());
  f.insert(f.end(), second.features().begin(), second.features().end());
  std::vector<int> y(first.labels().begin(), first.labels().end());
  y.insert(y.end(), second.labels().begin(), second.labels().end());
  std::vector<Subset> s(first.subsets().begin(), first.subsets().end());
  s.insert(s.end(), second.subsets().begin(), second.subsets().end());
  return Dataset(std::move(f), first.dim(), std::move(y), std::move(s));
}

// ---- CSV ----------------------------------------------------------------------

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw ParseError("missing header row", line_no);
  header = text::split(header_line, ',');

  std::optional<std::size_t> label_col;
  std::optional<std::size_t> subset_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = text::trim(header[c]);
    if (name == options.label_column) label_col = c;
    if (options.subset_column && name == *options.subset_column) subset_col = c;
  }
  if (!label_col) throw ParseError("header has no label column '" + options.label_column + "'", line_no);
  if (options.subset_column && !subset_col) {
    throw ParseError("header has no subset column '" + *options.subset_column + "'", line_no);
  }
  const std::size_t dim = header.size() - 1 - (subset_col ? 1 : 0);
  if (dim == 0) throw ParseError("header has no feature columns", line_no);

  LabelReader labels_in;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<Subset> subsets;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = text::trim(cells[c]);
      if (c == *label_col) {
        labels.push_back(labels_in.read(cell, line_no));
      } else if (subset_col && c == *subset_col) {
        if (cell == "A") {
          subsets.push_back(Subset::A);
        } else if (cell == "B") {
          subsets.push_back(Subset::B);
        } else {
          throw ParseError("subset '" + std::string(cell) + "' is not A or B", line_no);
        }
      } else {
        const auto v = text::parse_double(cell);
        if (!v || !std::isfinite(*v)) {
          throw ParseError("cell '" + std::string(cell) + "' is not a finite number", line_no);
        }
        features.push_back(*v);
      }
    }
  }
  if (labels.empty()) throw ParseError("no data rows", line_no);
  return Dataset(std::move(features), dim, std::move(labels), std::move(subsets));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "label";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << (j + 1);
  if (data.has_subsets()) out << ",subset";
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i);
    for (double v : data.row(i)) out << ',' << text::format_double(v);
    if (data.has_subsets()) out << ',' << (data.subset(i) == Subset::A ? 'A' : 'B');
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out, data);
}

// ---- LIBSVM -------------------------------------------------------------------

Dataset parse_libsvm(std::istream& in) {
  LabelReader labels_in;
  std::vector<std::map<std::size_t, double>> rows;
  std::vector<int> labels;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content = line;
    if (const auto hash = content.find('#'); hash != std::string_view::npos) content = content.substr(0, hash);
    const auto toks = text::tokens(content);
    if (toks.empty()) continue;
    labels.push_back(labels_in.read(toks[0], line_no));
    std::map<std::size_t, double> row;
    for (std::size_t k = 1; k < toks.size(); ++k) {
      const auto colon = toks[k].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("token '" + std::string(toks[k]) + "' is not index:value", line_no);
      }
      const auto idx = text::parse_int(toks[k].substr(0, colon));
      const auto val = text::parse_double(toks[k].substr(colon + 1));
      if (!idx || *idx < 1) throw ParseError("bad feature index in '" + std::string(toks[k]) + "'", line_no);
      if (!val || !std::isfinite(*val)) {
        throw ParseError("bad feature value in '" + std::string(toks[k]) + "'", line_no);
      }
      const auto index = static_cast<std::size_t>(*idx);
      if (!row.emplace(index, *val).second) {
        throw ParseError("duplicate feature index " + std::to_string(index), line_no);
      }
      dim = std::max(dim, index);
    }
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw ParseError("no data rows", line_no);
  dim = std::max<std::size_t>(dim, 1);
  std::vector<double> features(labels.size() * dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [index, value] : rows[i]) features[i * dim + index - 1] = value;
  }
  return Dataset(std::move(features), dim, std::move(labels));
}

Dataset load_libsvm(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_libsvm(in);
}

// ---- Generators ---------------------------------------------------------------

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

namespace {

void check_even_size(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw ConfigError("generator needs an even N >= 2");
}

}  // namespace

Dataset gen_blobs(std::uint64_t seed, std::size_t n, double margin) {
  check_even_size(n);
  if (!(margin > 0.0) || !std::isfinite(margin)) throw ConfigError("blob margin must be positive");
  SplitMix64 rng(seed);
  std::vector<double> features(2 * n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = i % 2 == 0 ? 1 : -1;
    labels[i] = a;
    features[2 * i] = a * (margin + rng.uniform());
    features[2 * i + 1] = rng.uniform(-1.0, 1.0);
  }
  return Dataset(std::move(features), 2, std::move(labels));
}

Dataset gen_noisy(std::uint64_t seed, std::size_t n, double flip_rate) {
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) throw ConfigError("flip rate must lie in [0, 0.5)");
  const Dataset clean = gen_blobs(seed, n, kDefaultBlobMargin);
  const auto flips = static_cast<std::size_t>(std::llround(flip_rate * static_cast<double>(n)));
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  SplitMix64 rng(seed ^ 0xD1B54A32D192ED03ULL);
  std::vector<int> labels(clean.labels().begin(), clean.labels().end());
  for (std::size_t k = 0; k < flips; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(index[k], index[j]);
    labels[index[k]] = -labels[index[k]];
  }
  return Dataset(std::vector<double>(clean.features().begin(), clean.features().end()), 2, std::move(labels));
}

Dataset gen_diagonal(std::uint64_t seed, std::size_t n, double margin) {
  check_even_size(n);
  if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("diagonal margin must lie in (0, 1)");
  SplitMix64 rng(seed);
  std::vector<double> features(2 * n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = i % 2 == 0 ? 1 : -1;
    double x0 = 0.0;
    double x1 = 0.0;
    do {
      x0 = rng.uniform(-1.0, 1.0);
      x1 = rng.uniform(-1.0, 1.0);
    } while (a * (x0 + x1) < margin);
    labels[i] = a;
    features[2 * i] = x0;
    features[2 * i + 1] = x1;
  }
  return Dataset(std::move(features), 2, std::move(labels));
}

Dataset gen_combined(std::uint64_t seed, std::size_t n_a, std::size_t n_b, double flip_rate) {
  const Dataset a = gen_blobs(seed, n_a, kDefaultBlobMargin);
  const Dataset b = gen_noisy(seed + 1, n_b, flip_rate);
  auto tagged = [](const Dataset& d, Subset s) {
    return Dataset(std::vector<double>(d.features().begin(), d.features().end()), d.dim(),
                   std::vector<int>(d.labels().begin(), d.labels().end()), std::vector<Subset>(d.size(), s));
  };
  return concat(tagged(a, Subset::A), tagged(b, Subset::B));
}

}  // namespace maboost
