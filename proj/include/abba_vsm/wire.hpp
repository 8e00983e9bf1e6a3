#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "abba_vsm/reducer.hpp"

namespace abba {

// Segment stream (.abbaseg): JSON lines. Line 1 is the header
//   {"format":"abbaseg","format_version":1,"dataset_name":...,"rt":...,"sample_count":...}
// and each following line is one sample
//   {"sample_id":...,"label":...|null,"y0":...,"original_length":...,"segments":[[len,inc],...]}
// Doubles are written in shortest round-trip form.

inline constexpr int kSegmentFormatVersion = 1;

struct StreamHeader {
  int format_version = kSegmentFormatVersion;
  std::string dataset_name;
  double rt = 0.0;
  std::uint64_t sample_count = 0;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

struct WireStats {
  std::uint64_t bytes_written = 0;
  /// 4 bytes per raw value.
  std::uint64_t raw_equivalent_bytes = 0;
  /// 8 bytes per segment: a 4-byte length and a 4-byte increment.
  std::uint64_t segment_payload_bytes = 0;
  /// 100 * (1 - payload / raw).
  double reduction_percent = 0.0;
};

struct SegmentStream {
  StreamHeader header;
  std::vector<SegmentSequence> sequences;
};

/// Idealized payload figures only; bytes_written is left at 0.
WireStats payload_stats(std::span<const SegmentSequence> seqs);

/// sample_count in `meta` is ignored and replaced by seqs.size().
WireStats write_segments(std::span<const SegmentSequence> seqs, const StreamHeader& meta,
                         std::ostream& out);
WireStats write_segments(std::span<const SegmentSequence> seqs, const StreamHeader& meta,
                         const std::filesystem::path& path);

SegmentStream read_segments(std::istream& in);
SegmentStream read_segments(const std::filesystem::path& path);

/// True when the file starts with '{', i.e. looks like a segment stream.
bool looks_like_segment_stream(const std::filesystem::path& path);

}  // namespace abba
