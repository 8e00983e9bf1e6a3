#include "abba_vsm/reducer.hpp"

#include <cmath>

#include "abba_vsm/error.hpp"

namespace abba {

void validate(const SegmentSequence& seq) {
  const std::string who = "segment sequence " + std::to_string(seq.sample_id);
  if (seq.original_length < 2) throw FormatError(who + ": original length below 2");
  if (seq.segments.empty()) throw FormatError(who + ": no segments");
  if (!std::isfinite(seq.y0)) throw FormatError(who + ": non-finite y0");
  std::int64_t total = 0;
  for (const auto& s : seq.segments) {
    if (s.len < 1) throw FormatError(who + ": segment length below 1");
    if (!std::isfinite(s.inc)) throw FormatError(who + ": non-finite increment");
    total += s.len;
  }
  if (total != seq.original_length - 1)
    throw FormatError(who + ": segment lengths sum to " + std::to_string(total) +
                      ", expected " + std::to_string(seq.original_length - 1));
}

double chord_squared_error(std::span<const double> values, std::size_t first, std::size_t last) {
  const double span = static_cast<double>(last - first);
  const double slope = (values[last] - values[first]) / span;
  double err = 0.0;
  for (std::size_t k = first + 1; k < last; ++k) {
    const double fit = values[first] + slope * static_cast<double>(k - first);
    const double d = fit - values[k];
    err += d * d;
  }
  return err;
}

SegmentSequence reduce(const TimeSeriesSample& sample, const ReductionParams& params) {
  if (!(params.rt > 0.0) || !std::isfinite(params.rt))
    throw InvalidParamsError("reduction tolerance must be positive and finite");
  validate_sample(sample);

  const std::span<const double> y(sample.values);
  const std::size_t n = y.size();
  const double budget_per_step = params.rt * params.rt;

  SegmentSequence seq;
  seq.sample_id = sample.sample_id;
  seq.label = sample.label;
  seq.y0 = y[0];
  seq.original_length = static_cast<std::int64_t>(n);

  std::size_t anchor = 0;
  while (anchor + 1 < n) {
    // Offsets t = k - anchor and rises z_t = y_k - y_anchor. For slope s the
    // chord error is s^2 * sum(t^2) - 2 s * sum(t z) + sum(z^2).
    const double base = y[anchor];
    double z = y[anchor + 1] - base;
    double sum_tz = z;
    double sum_zz = z * z;
    std::size_t end = anchor + 1;
    for (std::size_t cand = anchor + 2; cand < n; ++cand) {
      const double t = static_cast<double>(cand - anchor);
      z = y[cand] - base;
      sum_tz += t * z;
      sum_zz += z * z;
      const double slope = z / t;
      const double sum_tt = t * (t + 1.0) * (2.0 * t + 1.0) / 6.0;
      const double err = slope * slope * sum_tt - 2.0 * slope * sum_tz + sum_zz;
      if (err > t * budget_per_step) break;
      end = cand;
    }
    while (end > anchor + 1 &&
           chord_squared_error(y, anchor, end) > static_cast<double>(end - anchor) * budget_per_step)
      --end;

    seq.segments.push_back({static_cast<std::int64_t>(end - anchor), y[end] - y[anchor]});
    anchor = end;
  }
  return seq;
}

TimeSeriesSample reconstruct(const SegmentSequence& seq) {
  validate(seq);
  TimeSeriesSample out;
  out.sample_id = seq.sample_id;
  out.label = seq.label;
  out.values.reserve(static_cast<std::size_t>(seq.original_length));
  double start = seq.y0;
  out.values.push_back(start);
  for (const auto& s : seq.segments) {
    const double step = s.inc / static_cast<double>(s.len);
    for (std::int64_t k = 1; k < s.len; ++k) out.values.push_back(start + step * static_cast<double>(k));
    start += s.inc;
    out.values.push_back(start);
  }
  return out;
}

CompressionMetrics compression_ratio(const SegmentSequence& seq, std::size_t symbol_count) {
  const double n_raw = static_cast<double>(seq.original_length);
  CompressionMetrics m;
  m.compression_ratio = 1.0 - static_cast<double>(symbol_count) / (4.0 * n_raw);
  m.segment_fraction = static_cast<double>(seq.segments.size()) / (n_raw - 1.0);
  return m;
}

CompressionMetrics compression_ratio(const SegmentSequence& seq) {
  return compression_ratio(seq, seq.segments.size());
}

}  // namespace abba
