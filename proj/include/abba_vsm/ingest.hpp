#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace abba {

/// One univariate series. Timestamps are implicit: value k sits at index k.
struct TimeSeriesSample {
  std::uint64_t sample_id = 0;
  std::optional<std::string> label;
  std::vector<double> values;

  friend bool operator==(const TimeSeriesSample&, const TimeSeriesSample&) = default;
};

struct Dataset {
  std::string name;
  std::vector<TimeSeriesSample> samples;
  /// Sorted, distinct. Recomputed by refresh_labels().
  std::vector<std::string> class_labels;

  void refresh_labels();
  std::size_t size() const { return samples.size(); }
};

/// Throws InvalidInputError when the sample has fewer than two values or a
/// non-finite value.
void validate_sample(const TimeSeriesSample& sample);

enum class Delimiter { Auto, Tab, Comma, Whitespace };

Delimiter parse_delimiter(const std::string& name);

/// Reads the UCR text format: `label<d>v1<d>v2...`, one sample per line.
/// Auto-detection looks at the first non-blank line: tab, then comma, then
/// runs of blanks (the pre-2018 archive layout). Blank lines are skipped and
/// a trailing delimiter is tolerated. With `labeled` false every field is a
/// value and samples carry no label.
Dataset load_ucr(const std::filesystem::path& path, Delimiter delimiter = Delimiter::Auto,
                 bool labeled = true);

/// Writes labels verbatim and values in shortest round-trip form.
/// Unlabeled samples get an empty label field.
void write_ucr(const Dataset& ds, const std::filesystem::path& path,
               Delimiter delimiter = Delimiter::Tab);

/// Train and test files concatenated; sample ids are reassigned 0..n-1 in
/// file order (train first).
Dataset concat(const Dataset& first, const Dataset& second, std::string name);

/// Per-sample z-normalization. Constant series become all zeros.
Dataset z_normalize(const Dataset& ds);

/// `test_fraction` is the fraction held out for testing.
struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

/// Number of test samples drawn from a class of `class_count` samples:
/// max(1, ceil(test_fraction * class_count)).
std::size_t test_count_for(std::size_t class_count, double test_fraction);

/// Stratified split. Within each class samples are ordered by a SplitMix64
/// hash of (seed, sample_id) and the first test_count_for() go to test. Both
/// halves keep the input's sample order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec);

/// Same partition as stratified_split, as positions into ds.samples.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec);

}  // namespace abba
