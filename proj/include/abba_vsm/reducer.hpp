#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abba_vsm/ingest.hpp"

namespace abba {

/// One linear piece: `len` unit steps with total value change `inc`.
struct Segment {
  std::int64_t len = 1;
  double inc = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentSequence {
  std::uint64_t sample_id = 0;
  std::optional<std::string> label;
  double y0 = 0.0;
  std::vector<Segment> segments;
  std::int64_t original_length = 0;

  std::size_t size() const { return segments.size(); }

  friend bool operator==(const SegmentSequence&, const SegmentSequence&) = default;
};

/// Throws FormatError if segments are empty, a len is < 1, a value is
/// non-finite, or the lens do not add up to original_length - 1.
void validate(const SegmentSequence& seq);

struct ReductionParams {
  double rt = 0.1;
};

/// Greedy left-to-right piecewise-linear reduction.
///
/// From anchor i the end j is advanced one index at a time while the chord
/// from (i, y_i) to (j, y_j) keeps  sum_{k=i..j} (yhat_k - y_k)^2 <= (j - i) * rt^2,
/// and the segment stops at the first j that breaks the budget. The chord
/// error is updated in O(1) per step from running sums, so the whole pass is
/// O(N). The accepted end is re-checked directly once per segment, which
/// guards against cancellation in the running-sum form.
SegmentSequence reduce(const TimeSeriesSample& sample, const ReductionParams& params);

/// Squared error of the chord between indices `first` and `last`.
double chord_squared_error(std::span<const double> values, std::size_t first, std::size_t last);

/// Inverse of reduce: linear interpolation between segment endpoints,
/// accumulated left to right from y0.
TimeSeriesSample reconstruct(const SegmentSequence& seq);

struct CompressionMetrics {
  /// 1 - symbols / (4 * N): one byte per symbol against four per float.
  double compression_ratio = 0.0;
  /// n / (N - 1); 1.0 means no reduction at all.
  double segment_fraction = 0.0;
};

/// The byte model floors the ratio at 0.75 whenever n <= N.
inline constexpr double kByteModelFloor = 0.75;

CompressionMetrics compression_ratio(const SegmentSequence& seq, std::size_t symbol_count);
CompressionMetrics compression_ratio(const SegmentSequence& seq);

}  // namespace abba
