#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "abba_vsm/error.hpp"
#include "abba_vsm/pipeline.hpp"
#include "abba_vsm/wire.hpp"

namespace fs = std::filesystem;
using namespace abba;

namespace {

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("abba_wire_" + std::to_string(std::random_device{}()) + "_" + name);
}

SegmentSequence random_sequence(std::mt19937_64& rng, std::uint64_t id) {
  std::uniform_int_distribution<int> n_seg(1, 40);
  std::uniform_int_distribution<std::int64_t> len(1, 1000);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  SegmentSequence seq;
  seq.sample_id = id;
  if (rng() % 4 != 0) seq.label = "class \"" + std::to_string(rng() % 5) + "\"\t\xc3\xa9";
  seq.y0 = mant(rng) * std::pow(10.0, expo(rng));
  std::int64_t total = 0;
  const int n = n_seg(rng);
  for (int k = 0; k < n; ++k) {
    const auto l = len(rng);
    seq.segments.push_back({l, mant(rng) * std::pow(10.0, expo(rng))});
    total += l;
  }
  seq.original_length = total + 1;
  return seq;
}

}  // namespace

TEST(PayloadStats, ByteArithmetic) {
  std::vector<SegmentSequence> one{{0, "a", 0.0, std::vector<Segment>(10, Segment{1, 0.0}), 100}};
  one[0].segments[0].len = 90;
  const auto stats = payload_stats(one);
  EXPECT_EQ(stats.raw_equivalent_bytes, 400u);
  EXPECT_EQ(stats.segment_payload_bytes, 80u);
  EXPECT_DOUBLE_EQ(stats.reduction_percent, 80.0);
}

TEST(WriteSegments, EmptyListIsAnError) {
  std::ostringstream out;
  EXPECT_THROW(write_segments({}, StreamHeader{}, out), FormatError);
}

TEST(WriteSegments, RejectsInvalidRecords) {
  std::ostringstream out;
  std::vector<SegmentSequence> bad{{0, std::nullopt, 0.0, {{2, 1.0}}, 5}};
  EXPECT_THROW(write_segments(bad, StreamHeader{}, out), FormatError);
}

TEST(WriteSegments, ReportsBytesAndHeaderCount) {
  std::vector<SegmentSequence> seqs{{3, "x", 1.5, {{2, 1.0}}, 3}, {4, std::nullopt, 0.0, {{1, 1.0}, {1, 2.0}}, 3}};
  std::ostringstream out;
  StreamHeader meta{kSegmentFormatVersion, "toy", 0.25, 99};
  const auto stats = write_segments(seqs, meta, out);
  EXPECT_EQ(stats.bytes_written, out.str().size());
  std::istringstream in(out.str());
  const auto back = read_segments(in);
  EXPECT_EQ(back.header.sample_count, 2u);
  EXPECT_EQ(back.header.dataset_name, "toy");
  EXPECT_EQ(back.header.rt, 0.25);
  EXPECT_EQ(back.sequences, seqs);
}

TEST(ReadSegments, RoundTripOfSmallReduction) {
  TimeSeriesSample s{7, "1", {0.0, 1.0, 0.0}};
  const std::vector<SegmentSequence> seqs{reduce(s, {1.0})};
  const auto path = temp_path("peak.abbaseg");
  write_segments(seqs, {kSegmentFormatVersion, "peak", 1.0, 0}, path);
  EXPECT_TRUE(looks_like_segment_stream(path));
  const auto back = read_segments(path);
  fs::remove(path);
  ASSERT_EQ(back.sequences.size(), 1u);
  EXPECT_EQ(back.sequences[0], seqs[0]);
  EXPECT_EQ(back.sequences[0].segments[0], (Segment{2, 0.0}));
  EXPECT_EQ(back.sequences[0].original_length, 3);
}

TEST(ReadSegments, RandomStreamsRoundTripExactly) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SegmentSequence> seqs;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) seqs.push_back(random_sequence(rng, rng()));
    std::stringstream io;
    write_segments(seqs, {kSegmentFormatVersion, "r" + std::to_string(trial), 0.001 * trial + 1e-7, 0}, io);
    const auto back = read_segments(io);
    ASSERT_EQ(back.sequences, seqs) << "trial " << trial;
  }
}

TEST(ReadSegments, TruncationIsDetected) {
  std::mt19937_64 rng(2);
  std::vector<SegmentSequence> seqs{random_sequence(rng, 0), random_sequence(rng, 1), random_sequence(rng, 2)};
  std::ostringstream out;
  write_segments(seqs, {kSegmentFormatVersion, "t", 0.1, 0}, out);
  const std::string text = out.str();

  // Dropping a whole record breaks the sample count.
  const auto last_line = text.rfind('\n', text.size() - 2);
  std::istringstream missing(text.substr(0, last_line + 1));
  EXPECT_THROW(read_segments(missing), FormatError);

  // Cutting mid-record breaks the JSON.
  std::istringstream cut(text.substr(0, text.size() - 15));
  EXPECT_THROW(read_segments(cut), FormatError);

  std::istringstream empty("");
  EXPECT_THROW(read_segments(empty), FormatError);
}

TEST(ReadSegments, VersionAndShapeErrors) {
  std::istringstream future(
      R"({"format":"abbaseg","format_version":2,"dataset_name":"x","rt":0.1,"sample_count":1})"
      "\n"
      R"({"sample_id":0,"label":null,"y0":0,"original_length":2,"segments":[[1,1]]})"
      "\n");
  EXPECT_THROW(read_segments(future), FormatError);

  std::istringstream bad_sum(
      R"({"format":"abbaseg","format_version":1,"dataset_name":"x","rt":0.1,"sample_count":1})"
      "\n"
      R"({"sample_id":0,"label":null,"y0":0,"original_length":5,"segments":[[1,1]]})"
      "\n");
  EXPECT_THROW(read_segments(bad_sum), FormatError);

  std::istringstream not_json("1\t0.0\t1.0\n");
  EXPECT_THROW(read_segments(not_json), FormatError);
}

TEST(LoadSegmentInput, RtMismatchWarnsButKeepsHeaderValue) {
  const auto path = temp_path("warn.abbaseg");
  std::vector<SegmentSequence> seqs{{0, "a", 0.0, {{1, 1.0}}, 2}};
  write_segments(seqs, {kSegmentFormatVersion, "warn", 0.3, 0}, path);

  const auto mismatch = load_segment_input(path, 0.1, 0.1);
  EXPECT_TRUE(mismatch.from_stream);
  EXPECT_EQ(mismatch.rt, 0.3);
  ASSERT_EQ(mismatch.warnings.size(), 1u);
  EXPECT_NE(mismatch.warnings[0].find("0.3"), std::string::npos);

  EXPECT_TRUE(load_segment_input(path, 0.3, 0.1).warnings.empty());
  EXPECT_TRUE(load_segment_input(path, std::nullopt, 0.1).warnings.empty());
  fs::remove(path);
}
