#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "abba_vsm/ingest.hpp"
#include "abba_vsm/reducer.hpp"
#include "abba_vsm/vsm.hpp"
#include "abba_vsm/wire.hpp"

namespace abba {

struct PipelineConfig {
  double rt = 0.1;
  ClusterMethod ctype = ClusterMethod::SortingBased;
  double ct = 0.1;
  int wsize = 3;
  int wstep = 1;
  int csize = 5;
  double tsize = 0.2;
  std::uint64_t seed = 0;
  /// Accept values outside the evaluated hyperparameter ranges.
  bool allow_out_of_range = false;
  /// Map unclassifiable samples to the largest training class.
  bool fallback = false;
};

/// Hard limits always apply (InvalidParamsError). The evaluated ranges
///   rt, ct in [0.001, 0.7], wsize in [2, 10], wstep in [1, 4],
///   csize in [2, 8], tsize in [0.05, 0.4]
/// apply unless allow_out_of_range is set; ct and csize are only checked for
/// the clustering method that uses them.
void validate(const PipelineConfig& config);

ModelConfig model_config(const PipelineConfig& config);
ClusteringParams clustering_params(const PipelineConfig& config);

nlohmann::json to_json(const PipelineConfig& config);

// ---------------------------------------------------------------- compress

std::vector<SegmentSequence> reduce_all(const Dataset& ds, double rt);

struct MeanCompression {
  double mean_cr = 0.0;
  double mean_segment_fraction = 0.0;
};
MeanCompression mean_compression(std::span<const SegmentSequence> seqs);

// ------------------------------------------------------------------- train

/// Segments plus where they came from. `rt` is the tolerance that produced
/// them: the stream header's value, or the configured one for raw input.
struct SegmentInput {
  std::string dataset_name;
  double rt = 0.0;
  bool from_stream = false;
  std::vector<SegmentSequence> sequences;
  std::vector<std::string> warnings;
};

/// Reads a segment stream or reduces a UCR file. For a stream, an explicit
/// `requested_rt` that disagrees with the header adds a warning; the
/// header's value wins because it describes the data.
SegmentInput load_segment_input(const std::filesystem::path& path, std::optional<double> requested_rt,
                                double default_rt, Delimiter delimiter = Delimiter::Auto,
                                bool znormalize = false);

struct TrainOutcome {
  VsmModel model;
  /// Total words per class document, parallel to model.class_labels().
  std::vector<std::uint64_t> document_sizes;
};

/// Fits codebook, symbolizes, windows and builds the class weights.
TrainOutcome train_model(std::span<const SegmentSequence> train, const PipelineConfig& config,
                         const std::string& dataset_name);

// ----------------------------------------------------------------- predict

struct PredictionRow {
  std::uint64_t sample_id = 0;
  std::optional<std::string> actual;
  Classification result;
};

std::vector<PredictionRow> predict(std::span<const SegmentSequence> seqs, const VsmModel& model,
                                   bool fallback);

/// Marker written in the `predicted` column for unclassifiable samples.
inline constexpr const char* kUnclassifiable = "UNCLASSIFIABLE";

/// `sample_id,predicted,score_<class>...`, plus a trailing `label` column when
/// any row carries its true label. Scores use shortest round-trip decimals.
void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows, const VsmModel& model);
void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows,
                           const VsmModel& model);

// ---------------------------------------------------------------- evaluate

struct EvalTiming {
  double compressor_seconds = 0.0;
  double classifier_train_seconds = 0.0;
  double classifier_test_seconds = 0.0;
  double classifier_seconds = 0.0;
  double total_seconds = 0.0;
};

struct EvalReport {
  PipelineConfig config;
  std::string dataset_name;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t correct = 0;
  std::size_t unclassifiable = 0;
  double accuracy = 0.0;
  double mean_cr = 0.0;
  double mean_segment_fraction = 0.0;
  std::size_t alphabet_size = 0;
  std::size_t vocabulary_size = 0;
  WireStats wire;
  EvalTiming timing;
};

nlohmann::json to_json(const EvalReport& report);

struct EvalOutcome {
  EvalReport report;
  std::vector<PredictionRow> predictions;
  std::optional<VsmModel> model;
  /// Train then test samples as they crossed the wire (filled by evaluate()).
  std::vector<SegmentSequence> segments;
};

/// Stratified split by config.tsize and config.seed, then train and test.
EvalOutcome evaluate(const Dataset& ds, const PipelineConfig& config);
/// Predefined train/test files; config.tsize is not used.
EvalOutcome evaluate(const Dataset& train, const Dataset& test, const PipelineConfig& config);

/// Classifier half of an evaluation over already reduced samples. Fills
/// every report field except dataset_name, wire and compressor timing, and
/// leaves `segments` empty.
EvalOutcome evaluate_reduced(std::span<const SegmentSequence> train, std::span<const SegmentSequence> test,
                             const PipelineConfig& config);

std::size_t count_correct(std::span<const PredictionRow> rows, const VsmModel& model);

struct SweepRow {
  double rt = 0.0;
  double mean_cr = 0.0;
  double mean_segment_fraction = 0.0;
};

std::vector<SweepRow> rt_sweep(const Dataset& ds, std::span<const double> rts);
/// Columns: rt, mean_cr, mean_segment_fraction.
void write_sweep_tsv(const std::filesystem::path& path, std::span<const SweepRow> rows);

// ------------------------------------------------------------- grid search

struct SearchSpace {
  std::vector<ClusterMethod> ctypes;
  std::vector<double> rt;
  std::vector<double> ct;
  std::vector<int> wsize;
  std::vector<int> wstep;
  std::vector<int> csize;
  std::vector<double> tsize;

  /// The full evaluated hyperparameter space, both clustering methods.
  static SearchSpace defaults();
};

/// Cross product in a fixed nesting order:
/// ctype > rt > (ct | csize) > wsize > wstep > tsize. Sorting-based configs
/// vary ct only and k-means configs vary csize only. Remaining fields come
/// from `base`.
std::vector<PipelineConfig> enumerate(const SearchSpace& space, const PipelineConfig& base);

struct GridOptions {
  /// 0 evaluates everything; otherwise the first `budget` enumerated configs.
  std::size_t budget = 0;
  double threshold = 0.8;
  bool parallel = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct GridRow {
  std::size_t index = 0;  // position in the enumeration
  PipelineConfig config;
  bool feasible = true;
  std::string error;
  EvalReport report;
};

struct GridResult {
  std::size_t enumerated = 0;
  std::size_t evaluated = 0;
  /// Configs with accuracy >= threshold.
  std::size_t passing = 0;
  double threshold = 0.8;
  /// Sorted by accuracy desc, mean CR desc, enumeration index asc;
  /// infeasible rows last.
  std::vector<GridRow> rows;

  const GridRow* best() const { return rows.empty() || !rows.front().feasible ? nullptr : &rows.front(); }
};

GridResult grid_search(const Dataset& ds, const SearchSpace& space, const PipelineConfig& base,
                       const GridOptions& options);

void write_grid_tsv(const std::filesystem::path& path, const GridResult& result);
nlohmann::json to_json(const GridResult& result);

}  // namespace abba
