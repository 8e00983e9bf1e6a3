#include "abba_vsm/wire.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "abba_vsm/error.hpp"

namespace abba {

using nlohmann::json;

namespace {

json header_to_json(const StreamHeader& h) {
  return json{{"format", "abbaseg"},
              {"format_version", h.format_version},
              {"dataset_name", h.dataset_name},
              {"rt", h.rt},
              {"sample_count", h.sample_count}};
}

json record_to_json(const SegmentSequence& s) {
  json segs = json::array();
  for (const auto& seg : s.segments) segs.push_back(json::array({seg.len, seg.inc}));
  return json{{"sample_id", s.sample_id},
              {"label", s.label ? json(*s.label) : json(nullptr)},
              {"y0", s.y0},
              {"original_length", s.original_length},
              {"segments", std::move(segs)}};
}

template <typename T>
T field(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end())
    throw FormatError("segment stream line " + std::to_string(line_no) + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError("segment stream line " + std::to_string(line_no) + ": bad '" + key + "'");
  }
}

double number(const json& j, std::size_t line_no) {
  if (!j.is_number())
    throw FormatError("segment stream line " + std::to_string(line_no) + ": expected a number");
  return j.get<double>();
}

}  // namespace

WireStats payload_stats(std::span<const SegmentSequence> seqs) {
  WireStats st;
  for (const auto& s : seqs) {
    st.raw_equivalent_bytes += 4 * static_cast<std::uint64_t>(s.original_length);
    st.segment_payload_bytes += 8 * static_cast<std::uint64_t>(s.segments.size());
  }
  if (st.raw_equivalent_bytes > 0)
    st.reduction_percent = 100.0 * (1.0 - static_cast<double>(st.segment_payload_bytes) /
                                              static_cast<double>(st.raw_equivalent_bytes));
  return st;
}

WireStats write_segments(std::span<const SegmentSequence> seqs, const StreamHeader& meta,
                         std::ostream& out) {
  if (seqs.empty()) throw FormatError("a segment stream must carry at least one sample");
  for (const auto& s : seqs) validate(s);

  StreamHeader header = meta;
  header.format_version = kSegmentFormatVersion;
  header.sample_count = seqs.size();

  WireStats st = payload_stats(seqs);
  const auto emit = [&](const json& j) {
    const std::string line = j.dump();
    out << line << '\n';
    st.bytes_written += line.size() + 1;
  };
  emit(header_to_json(header));
  for (const auto& s : seqs) emit(record_to_json(s));
  if (!out) throw IoError("failed writing segment stream");
  return st;
}

WireStats write_segments(std::span<const SegmentSequence> seqs, const StreamHeader& meta,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  auto st = write_segments(seqs, meta, out);
  out.close();
  if (!out) throw IoError("failed closing " + path.string());
  return st;
}

SegmentStream read_segments(std::istream& in) {
  SegmentStream stream;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("segment stream line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object())
      throw FormatError("segment stream line " + std::to_string(line_no) + ": not an object");

    if (!have_header) {
      if (field<std::string>(j, "format", line_no) != "abbaseg")
        throw FormatError("not a segment stream");
      stream.header.format_version = field<int>(j, "format_version", line_no);
      if (stream.header.format_version != kSegmentFormatVersion)
        throw FormatError("unsupported segment stream version " +
                          std::to_string(stream.header.format_version));
      stream.header.dataset_name = field<std::string>(j, "dataset_name", line_no);
      stream.header.rt = field<double>(j, "rt", line_no);
      stream.header.sample_count = field<std::uint64_t>(j, "sample_count", line_no);
      have_header = true;
      continue;
    }

    SegmentSequence s;
    s.sample_id = field<std::uint64_t>(j, "sample_id", line_no);
    const auto label = j.find("label");
    if (label != j.end() && !label->is_null()) {
      if (!label->is_string())
        throw FormatError("segment stream line " + std::to_string(line_no) + ": bad 'label'");
      s.label = label->get<std::string>();
    }
    s.y0 = number(j.value("y0", json()), line_no);
    s.original_length = field<std::int64_t>(j, "original_length", line_no);
    const auto segs = j.find("segments");
    if (segs == j.end() || !segs->is_array())
      throw FormatError("segment stream line " + std::to_string(line_no) + ": bad 'segments'");
    s.segments.reserve(segs->size());
    for (const auto& pair : *segs) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer())
        throw FormatError("segment stream line " + std::to_string(line_no) + ": bad segment");
      s.segments.push_back({pair[0].get<std::int64_t>(), number(pair[1], line_no)});
    }
    validate(s);
    stream.sequences.push_back(std::move(s));
  }
  if (in.bad()) throw IoError("read failure on segment stream");
  if (!have_header) throw FormatError("segment stream has no header");
  if (stream.sequences.size() != stream.header.sample_count)
    throw FormatError("segment stream declares " + std::to_string(stream.header.sample_count) +
                      " samples but carries " + std::to_string(stream.sequences.size()));
  return stream;
}

SegmentStream read_segments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_segments(in);
}

bool looks_like_segment_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char c = 0;
  while (in.get(c))
    if (c != ' ' && c != '\n' && c != '\r' && c != '\t') return c == '{';
  return false;
}

}  // namespace abba
