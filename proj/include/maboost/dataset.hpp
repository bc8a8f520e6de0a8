#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maboost {

/// Membership used when combining a primary (A) and a secondary (B) dataset.
enum class Subset : std::uint8_t { A, B };

/// Immutable labeled samples: an N x d row-major feature matrix and labels
/// in {-1, +1}, optionally tagged with A/B membership.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t dim, std::vector<int> labels,
          std::vector<Subset> subsets = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }

  double feature(std::size_t i, std::size_t j) const { return features_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }
  std::span<const double> features() const { return features_; }

  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  bool has_subsets() const { return !subsets_.empty(); }
  Subset subset(std::size_t i) const { return subsets_[i]; }
  std::span<const Subset> subsets() const { return subsets_; }
  std::size_t count(Subset s) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<double> features_;
  std::size_t dim_;
  std::vector<int> labels_;
  std::vector<Subset> subsets_;
};

/// Concatenates rows; both inputs must have the same dimension.
Dataset concat(const Dataset& first, const Dataset& second);

// ---- CSV --------------------------------------------------------------------
//
// Comma-separated, header row first. Every column other than the label and
// (optional) subset column is a numeric feature, in file order. Labels are
// either all in {-1, +1} or all in {0, 1}; 0 maps to -1. Subset cells are A or B.

struct CsvOptions {
  std::string label_column = "label";
  std::optional<std::string> subset_column;
};

Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes label first, then f1..fd, then "subset" when present. Values use the
/// shortest round-trip representation, so save + load is bit-exact.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

// ---- LIBSVM -----------------------------------------------------------------
//
// "<label> <index>:<value> ..." with 1-based indices; missing indices are 0 and
// d is the largest index seen. Text after '#' is ignored.

Dataset parse_libsvm(std::istream& in);
Dataset load_libsvm(const std::filesystem::path& path);

// ---- Seeded generators --------------------------------------------------------

/// splitmix64 (Steele, Lea & Flood): state += 0x9E3779B97F4A7C15, then
/// z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
/// return z ^ z>>31. Doubles take the top 53 bits: (x >> 11) * 2^-53.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();                                     ///< [0, 1)
  double uniform(double lo, double hi);                 ///< [lo, hi)
  std::uint64_t below(std::uint64_t bound);             ///< [0, bound), bound > 0

 private:
  std::uint64_t state_;
};

inline constexpr double kDefaultBlobMargin = 0.5;

/// Two axis-aligned box clusters in 2-D. Sample i has label +1 for even i and
/// -1 for odd i; feature 0 lies in [margin, margin + 1) for positives and
/// (-margin - 1, -margin] for negatives, feature 1 in [-1, 1). Any threshold
/// in (-margin, margin) on feature 0 separates the classes.
Dataset gen_blobs(std::uint64_t seed, std::size_t n, double margin);

/// gen_blobs(seed, n, kDefaultBlobMargin) with round(flip_rate * n) labels
/// flipped; the flipped indices come from a partial Fisher-Yates shuffle
/// driven by SplitMix64(seed ^ 0xD1B54A32D192ED03).
Dataset gen_noisy(std::uint64_t seed, std::size_t n, double flip_rate);

/// Points uniform in [-1, 1)^2 labeled by the diagonal x0 + x1 > 0, with
/// rejection of anything closer than `margin` (in x0 + x1) to the boundary.
/// Separable by a combination of stumps but not by any single one.
Dataset gen_diagonal(std::uint64_t seed, std::size_t n, double margin);

/// A = gen_blobs(seed, n_a, default margin) tagged A, followed by
/// B = gen_noisy(seed + 1, n_b, flip_rate) tagged B.
Dataset gen_combined(std::uint64_t seed, std::size_t n_a, std::size_t n_b, double flip_rate);

}  // namespace maboost
