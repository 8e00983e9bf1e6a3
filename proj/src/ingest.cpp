#include "abba_vsm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string_view>

#include "abba_vsm/error.hpp"
#include "abba_vsm/number_format.hpp"
#include "abba_vsm/rng.hpp"

namespace abba {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

Delimiter detect(std::string_view line) {
  if (line.find('\t') != std::string_view::npos) return Delimiter::Tab;
  if (line.find(',') != std::string_view::npos) return Delimiter::Comma;
  return Delimiter::Whitespace;
}

std::vector<std::string_view> split_fields(std::string_view line, Delimiter d) {
  std::vector<std::string_view> out;
  if (d == Delimiter::Whitespace) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  const char sep = d == Delimiter::Tab ? '\t' : ',';
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

}  // namespace

void Dataset::refresh_labels() {
  std::set<std::string> labels;
  for (const auto& s : samples)
    if (s.label) labels.insert(*s.label);
  class_labels.assign(labels.begin(), labels.end());
}

void validate_sample(const TimeSeriesSample& sample) {
  if (sample.values.size() < 2)
    throw InvalidInputError("sample " + std::to_string(sample.sample_id) +
                            " has fewer than 2 values");
  for (double v : sample.values)
    if (!std::isfinite(v))
      throw InvalidInputError("sample " + std::to_string(sample.sample_id) +
                              " contains a non-finite value");
}

Delimiter parse_delimiter(const std::string& name) {
  if (name == "auto") return Delimiter::Auto;
  if (name == "tab") return Delimiter::Tab;
  if (name == "comma") return Delimiter::Comma;
  if (name == "whitespace" || name == "space") return Delimiter::Whitespace;
  throw InvalidParamsError("unknown delimiter '" + name + "'");
}

Dataset load_ucr(const std::filesystem::path& path, Delimiter delimiter, bool labeled) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  Dataset ds;
  ds.name = path.stem().string();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (delimiter == Delimiter::Auto) delimiter = detect(line);

    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (delimiter == Delimiter::Tab && line.find(',') != std::string_view::npos)
      throw FormatError(where + ": comma in a tab-delimited file");
    if (delimiter == Delimiter::Comma && line.find('\t') != std::string_view::npos)
      throw FormatError(where + ": tab in a comma-delimited file");
    if (delimiter == Delimiter::Whitespace && line.find(',') != std::string_view::npos)
      throw FormatError(where + ": comma in a whitespace-delimited file");

    const auto fields = split_fields(line, delimiter);
    const std::size_t first_value = labeled ? 1 : 0;
    if (fields.size() < first_value + 2)
      throw FormatError(where + ": expected " + (labeled ? "a label and " : "") + "at least 2 values");

    TimeSeriesSample sample;
    sample.sample_id = ds.samples.size();
    if (labeled) sample.label = std::string(fields[0]);
    sample.values.reserve(fields.size() - first_value);
    for (std::size_t i = first_value; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v || !std::isfinite(*v))
        throw FormatError(where + ": bad value '" + std::string(fields[i]) + "'");
      sample.values.push_back(*v);
    }
    ds.samples.push_back(std::move(sample));
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  if (ds.samples.empty()) throw EmptyDatasetError(path.string() + " contains no samples");
  ds.refresh_labels();
  return ds;
}

void write_ucr(const Dataset& ds, const std::filesystem::path& path, Delimiter delimiter) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const char* sep = delimiter == Delimiter::Comma ? "," : delimiter == Delimiter::Whitespace ? " " : "\t";
  for (const auto& s : ds.samples) {
    out << s.label.value_or("");
    for (double v : s.values) out << sep << format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

Dataset concat(const Dataset& first, const Dataset& second, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  ds.samples.reserve(first.size() + second.size());
  for (const auto* part : {&first, &second}) {
    for (const auto& s : part->samples) {
      ds.samples.push_back(s);
      ds.samples.back().sample_id = ds.samples.size() - 1;
    }
  }
  ds.refresh_labels();
  return ds;
}

Dataset z_normalize(const Dataset& ds) {
  Dataset out = ds;
  for (auto& s : out.samples) {
    const double n = static_cast<double>(s.values.size());
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : s.values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    for (double& v : s.values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  }
  return out;
}

std::size_t test_count_for(std::size_t class_count, double test_fraction) {
  // 0.1 * 30 evaluates to 3.0000000000000004; shave rounding noise before ceil.
  const double exact = test_fraction * static_cast<double>(class_count);
  const auto raw = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::max<std::size_t>(1, raw);
}

SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw InvalidParamsError("test fraction must lie in (0, 1)");
  if (ds.samples.empty()) throw EmptyDatasetError("cannot split an empty dataset");

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    if (!s.label) throw MissingLabelError("sample " + std::to_string(s.sample_id) + " has no label");
    by_class[*s.label].push_back(i);
  }

  std::vector<bool> is_test(ds.samples.size(), false);
  for (auto& [label, members] : by_class) {
    const std::size_t n_test = test_count_for(members.size(), spec.test_fraction);
    if (n_test >= members.size())
      throw SplitInfeasibleError("class '" + label + "' has " + std::to_string(members.size()) +
                                 " samples; cannot keep both a train and a test sample");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
    keyed.reserve(members.size());
    for (std::size_t idx : members) {
      const std::uint64_t id = ds.samples[idx].sample_id;
      keyed.emplace_back(SplitMix64::mix(spec.seed ^ SplitMix64::mix(id)), idx);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < n_test; ++k) is_test[keyed[k].second] = true;
  }

  SplitIndices out;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) (is_test[i] ? out.test : out.train).push_back(i);
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(ds, spec);
  Dataset train, test;
  train.name = ds.name + "_train";
  test.name = ds.name + "_test";
  for (auto i : idx.train) train.samples.push_back(ds.samples[i]);
  for (auto i : idx.test) test.samples.push_back(ds.samples[i]);
  train.refresh_labels();
  test.refresh_labels();
  return {std::move(train), std::move(test)};
}

}  // namespace abba
