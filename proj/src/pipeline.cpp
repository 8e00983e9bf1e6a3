#include "abba_vsm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "abba_vsm/error.hpp"
#include "abba_vsm/number_format.hpp"

namespace abba {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_range(double value, double lo, double hi, const char* name) {
  if (value < lo || value > hi)
    throw InvalidParamsError(std::string(name) + " = " + format_double(value) + " is outside [" +
                             format_double(lo) + ", " + format_double(hi) +
                             "]; pass --allow-out-of-range to use it anyway");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void validate(const PipelineConfig& c) {
  if (!(c.rt > 0.0) || !std::isfinite(c.rt)) throw InvalidParamsError("rt must be positive and finite");
  if (c.ctype == ClusterMethod::SortingBased && (!(c.ct > 0.0) || !std::isfinite(c.ct)))
    throw InvalidParamsError("ct must be positive and finite");
  if (c.ctype == ClusterMethod::KMeans && c.csize < 1) throw InvalidParamsError("csize must be at least 1");
  if (c.wsize < 1) throw InvalidParamsError("wsize must be at least 1");
  if (c.wstep < 1) throw InvalidParamsError("wstep must be at least 1");
  if (!(c.tsize > 0.0 && c.tsize < 1.0)) throw InvalidParamsError("tsize must lie in (0, 1)");
  if (c.allow_out_of_range) return;
  require_range(c.rt, 0.001, 0.7, "rt");
  if (c.ctype == ClusterMethod::SortingBased) require_range(c.ct, 0.001, 0.7, "ct");
  if (c.ctype == ClusterMethod::KMeans) require_range(c.csize, 2, 8, "csize");
  require_range(c.wsize, 2, 10, "wsize");
  require_range(c.wstep, 1, 4, "wstep");
  require_range(c.tsize, 0.05, 0.4, "tsize");
}

ClusteringParams clustering_params(const PipelineConfig& c) {
  ClusteringParams p;
  p.method = c.ctype;
  p.ct = c.ct;
  p.csize = c.csize;
  p.seed = c.seed;
  return p;
}

ModelConfig model_config(const PipelineConfig& c) {
  ModelConfig m;
  m.window = {c.wsize, c.wstep};
  m.rt = c.rt;
  m.clustering = clustering_params(c);
  return m;
}

json to_json(const PipelineConfig& c) {
  json j = {{"rt", c.rt}, {"ctype", to_string(c.ctype)}, {"wsize", c.wsize},
            {"wstep", c.wstep}, {"tsize", c.tsize}, {"seed", c.seed}};
  if (c.ctype == ClusterMethod::SortingBased)
    j["ct"] = c.ct;
  else
    j["csize"] = c.csize;
  return j;
}

std::vector<SegmentSequence> reduce_all(const Dataset& ds, double rt) {
  std::vector<SegmentSequence> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(reduce(s, {rt}));
  return out;
}

MeanCompression mean_compression(std::span<const SegmentSequence> seqs) {
  MeanCompression m;
  if (seqs.empty()) return m;
  for (const auto& s : seqs) {
    const auto c = compression_ratio(s);
    m.mean_cr += c.compression_ratio;
    m.mean_segment_fraction += c.segment_fraction;
  }
  m.mean_cr /= static_cast<double>(seqs.size());
  m.mean_segment_fraction /= static_cast<double>(seqs.size());
  return m;
}

SegmentInput load_segment_input(const std::filesystem::path& path, std::optional<double> requested_rt,
                                double default_rt, Delimiter delimiter, bool znormalize) {
  SegmentInput in;
  if (looks_like_segment_stream(path)) {
    auto stream = read_segments(path);
    in.dataset_name = stream.header.dataset_name;
    in.rt = stream.header.rt;
    in.from_stream = true;
    in.sequences = std::move(stream.sequences);
    if (requested_rt && *requested_rt != in.rt)
      in.warnings.push_back("requested rt " + format_double(*requested_rt) +
                            " differs from the segment stream's rt " + format_double(in.rt) +
                            "; using the stream's value");
    return in;
  }
  Dataset ds = load_ucr(path, delimiter);
  if (znormalize) ds = z_normalize(ds);
  in.dataset_name = ds.name;
  in.rt = requested_rt.value_or(default_rt);
  in.sequences = reduce_all(ds, in.rt);
  return in;
}

TrainOutcome train_model(std::span<const SegmentSequence> train, const PipelineConfig& config,
                         const std::string& dataset_name) {
  if (train.empty()) throw EmptyDatasetError("no training samples");
  for (const auto& s : train)
    if (!s.label) throw MissingLabelError("training sample " + std::to_string(s.sample_id) + " has no label");

  Codebook cb = fit_codebook(train, clustering_params(config));
  const CenterIndex index(cb.centers);
  const WindowParams window{config.wsize, config.wstep};

  std::vector<BagOfWords> bags;
  bags.reserve(train.size());
  for (const auto& s : train) bags.push_back(make_bag(symbolize(s, cb, index), window));
  Corpus corpus = build_corpus(bags);

  std::vector<std::uint64_t> document_sizes;
  for (const auto& doc : corpus.documents) {
    std::uint64_t total = 0;
    for (const auto& [w, n] : doc) total += n;
    document_sizes.push_back(total);
  }

  TfidfWeights tfidf = fit_tfidf(corpus);
  ModelConfig mc = model_config(config);
  mc.clustering = cb.params;
  TrainingInfo info{dataset_name, config.seed, corpus.sample_counts};
  return {VsmModel(std::move(cb), std::move(tfidf), mc, std::move(info)), std::move(document_sizes)};
}

std::vector<PredictionRow> predict(std::span<const SegmentSequence> seqs, const VsmModel& model,
                                   bool fallback) {
  std::vector<PredictionRow> rows;
  rows.reserve(seqs.size());
  for (const auto& s : seqs) {
    const SymbolString sym = symbolize(s, model.codebook(), model.center_index());
    rows.push_back({s.sample_id, s.label, classify(sym, model, fallback)});
  }
  return rows;
}

void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows, const VsmModel& model) {
  const bool with_labels = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.actual.has_value(); });
  out << "sample_id,predicted";
  for (const auto& c : model.class_labels()) out << ',' << csv_field("score_" + c);
  if (with_labels) out << ",label";
  out << '\n';
  for (const auto& r : rows) {
    out << r.sample_id << ','
        << (r.result.class_index ? csv_field(model.class_labels()[*r.result.class_index]) : kUnclassifiable);
    for (double s : r.result.scores) out << ',' << format_double(s);
    if (with_labels) out << ',' << csv_field(r.actual.value_or(""));
    out << '\n';
  }
}

void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows,
                           const VsmModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_predictions_csv(out, rows, model);
  if (!out) throw IoError("failed writing " + path.string());
}

std::size_t count_correct(std::span<const PredictionRow> rows, const VsmModel& model) {
  std::size_t correct = 0;
  for (const auto& r : rows)
    if (r.result.class_index && r.actual && model.class_labels()[*r.result.class_index] == *r.actual) ++correct;
  return correct;
}

json to_json(const EvalReport& r) {
  return json{
      {"dataset", r.dataset_name},
      {"config", to_json(r.config)},
      {"train_count", r.train_count},
      {"test_count", r.test_count},
      {"correct", r.correct},
      {"unclassifiable", r.unclassifiable},
      {"accuracy", r.accuracy},
      {"mean_cr", r.mean_cr},
      {"mean_segment_fraction", r.mean_segment_fraction},
      {"cr_byte_model_floor", kByteModelFloor},
      {"alphabet_size", r.alphabet_size},
      {"vocabulary_size", r.vocabulary_size},
      {"wire",
       {{"bytes_written", r.wire.bytes_written},
        {"raw_equivalent_bytes", r.wire.raw_equivalent_bytes},
        {"segment_payload_bytes", r.wire.segment_payload_bytes},
        {"reduction_percent", r.wire.reduction_percent}}},
      {"timing_seconds",
       {{"compressor", r.timing.compressor_seconds},
        {"classifier_train", r.timing.classifier_train_seconds},
        {"classifier_test", r.timing.classifier_test_seconds},
        {"classifier", r.timing.classifier_seconds},
        {"total", r.timing.total_seconds}}},
  };
}

EvalOutcome evaluate_reduced(std::span<const SegmentSequence> train, std::span<const SegmentSequence> test,
                             const PipelineConfig& config) {
  const auto t_train = Clock::now();
  TrainOutcome trained = train_model(train, config, "");
  const double train_s = seconds_since(t_train);

  const auto t_test = Clock::now();
  auto rows = predict(test, trained.model, config.fallback);
  const double test_s = seconds_since(t_test);

  EvalOutcome out;
  auto& r = out.report;
  r.config = config;
  r.train_count = train.size();
  r.test_count = test.size();
  r.correct = count_correct(rows, trained.model);
  r.unclassifiable = static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const auto& p) { return p.result.unclassifiable; }));
  r.accuracy = test.empty() ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(test.size());

  std::vector<SegmentSequence> all(train.begin(), train.end());
  all.insert(all.end(), test.begin(), test.end());
  const auto mc = mean_compression(all);
  r.mean_cr = mc.mean_cr;
  r.mean_segment_fraction = mc.mean_segment_fraction;
  r.alphabet_size = trained.model.codebook().size();
  r.vocabulary_size = trained.model.vocabulary_size();
  r.timing.classifier_train_seconds = train_s;
  r.timing.classifier_test_seconds = test_s;
  r.timing.classifier_seconds = train_s + test_s;
  out.predictions = std::move(rows);
  out.model = std::move(trained.model);
  return out;
}

EvalOutcome evaluate(const Dataset& train, const Dataset& test, const PipelineConfig& config) {
  validate(config);
  if (train.samples.empty() || test.samples.empty()) throw EmptyDatasetError("train and test must be non-empty");
  const auto t_total = Clock::now();

  const auto t_comp = Clock::now();
  auto train_seqs = reduce_all(train, config.rt);
  auto test_seqs = reduce_all(test, config.rt);
  std::vector<SegmentSequence> all(train_seqs);
  all.insert(all.end(), test_seqs.begin(), test_seqs.end());
  std::ostringstream sink;
  const WireStats wire = write_segments(all, StreamHeader{kSegmentFormatVersion, train.name, config.rt, 0}, sink);
  const double comp_s = seconds_since(t_comp);

  EvalOutcome out = evaluate_reduced(train_seqs, test_seqs, config);
  out.report.dataset_name = train.name;
  out.report.wire = wire;
  out.report.timing.compressor_seconds = comp_s;
  out.report.timing.total_seconds = seconds_since(t_total);
  out.segments = std::move(all);
  return out;
}

EvalOutcome evaluate(const Dataset& ds, const PipelineConfig& config) {
  validate(config);
  auto [train, test] = stratified_split(ds, {config.tsize, config.seed});
  train.name = ds.name;
  return evaluate(train, test, config);
}

std::vector<SweepRow> rt_sweep(const Dataset& ds, std::span<const double> rts) {
  std::vector<SweepRow> rows;
  for (double rt : rts) {
    const auto seqs = reduce_all(ds, rt);
    const auto mc = mean_compression(seqs);
    rows.push_back({rt, mc.mean_cr, mc.mean_segment_fraction});
  }
  return rows;
}

void write_sweep_tsv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "rt\tmean_cr\tmean_segment_fraction\n";
  for (const auto& r : rows)
    out << format_double(r.rt) << '\t' << format_double(r.mean_cr) << '\t'
        << format_double(r.mean_segment_fraction) << '\n';
}

SearchSpace SearchSpace::defaults() {
  SearchSpace s;
  s.ctypes = {ClusterMethod::SortingBased, ClusterMethod::KMeans};
  s.rt = {0.001, 0.005, 0.01, 0.05, 0.1, 0.3, 0.5, 0.7};
  s.ct = {0.001, 0.005, 0.01, 0.05, 0.1, 0.3, 0.5, 0.7};
  s.wsize = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  s.wstep = {1, 2, 3, 4};
  s.csize = {2, 3, 4, 5, 6, 7, 8};
  s.tsize = {0.05, 0.1, 0.2, 0.3, 0.4};
  return s;
}

std::vector<PipelineConfig> enumerate(const SearchSpace& space, const PipelineConfig& base) {
  std::vector<PipelineConfig> out;
  for (auto ctype : space.ctypes) {
    const bool sorting = ctype == ClusterMethod::SortingBased;
    const std::size_t n_cluster = sorting ? space.ct.size() : space.csize.size();
    for (double rt : space.rt)
      for (std::size_t ci = 0; ci < n_cluster; ++ci)
        for (int wsize : space.wsize)
          for (int wstep : space.wstep)
            for (double tsize : space.tsize) {
              PipelineConfig c = base;
              c.ctype = ctype;
              c.rt = rt;
              if (sorting)
                c.ct = space.ct[ci];
              else
                c.csize = space.csize[ci];
              c.wsize = wsize;
              c.wstep = wstep;
              c.tsize = tsize;
              out.push_back(c);
            }
  }
  return out;
}

GridResult grid_search(const Dataset& ds, const SearchSpace& space, const PipelineConfig& base,
                       const GridOptions& options) {
  auto configs = enumerate(space, base);
  if (configs.empty()) throw EmptySearchSpaceError("the search space is empty");
  GridResult result;
  result.enumerated = configs.size();
  result.threshold = options.threshold;
  if (options.budget > 0 && options.budget < configs.size()) configs.resize(options.budget);
  result.evaluated = configs.size();

  // Reduction depends only on rt and the split only on tsize, so both are
  // computed once and shared by every config.
  struct Reduced {
    std::vector<SegmentSequence> seqs;
    WireStats wire;
    MeanCompression compression;
    double seconds = 0.0;
  };
  std::map<double, Reduced> reduced;
  std::map<double, std::optional<SplitIndices>> splits;
  std::map<double, std::string> split_errors;
  for (const auto& c : configs) {
    if (!reduced.count(c.rt)) {
      const auto t = Clock::now();
      Reduced r;
      r.seqs = reduce_all(ds, c.rt);
      r.seconds = seconds_since(t);
      r.wire = payload_stats(r.seqs);
      r.compression = mean_compression(r.seqs);
      reduced.emplace(c.rt, std::move(r));
    }
    if (!splits.count(c.tsize)) {
      try {
        splits.emplace(c.tsize, split_indices(ds, {c.tsize, c.seed}));
      } catch (const SplitInfeasibleError& e) {
        splits.emplace(c.tsize, std::nullopt);
        split_errors.emplace(c.tsize, e.what());
      }
    }
  }

  std::vector<GridRow> rows(configs.size());
  const auto run_one = [&](std::size_t i) {
    GridRow& row = rows[i];
    row.index = i;
    row.config = configs[i];
    try {
      validate(row.config);
      const auto& split = splits.at(row.config.tsize);
      if (!split) throw SplitInfeasibleError(split_errors.at(row.config.tsize));
      const auto& red = reduced.at(row.config.rt);
      std::vector<SegmentSequence> train, test;
      train.reserve(split->train.size());
      test.reserve(split->test.size());
      for (auto k : split->train) train.push_back(red.seqs[k]);
      for (auto k : split->test) test.push_back(red.seqs[k]);
      auto outcome = evaluate_reduced(train, test, row.config);
      row.report = std::move(outcome.report);
      row.report.dataset_name = ds.name;
      row.report.wire = red.wire;
      row.report.mean_cr = red.compression.mean_cr;
      row.report.mean_segment_fraction = red.compression.mean_segment_fraction;
      row.report.timing.compressor_seconds = red.seconds;
      row.report.timing.total_seconds = red.seconds + row.report.timing.classifier_seconds;
    } catch (const Error& e) {
      row.feasible = false;
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
      row.report.config = row.config;
      row.report.dataset_name = ds.name;
    }
  };

  if (options.parallel) {
    unsigned n_threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < n_threads; ++t)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) run_one(i);
      });
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.report.accuracy != b.report.accuracy) return a.report.accuracy > b.report.accuracy;
    if (a.report.mean_cr != b.report.mean_cr) return a.report.mean_cr > b.report.mean_cr;
    return a.index < b.index;
  });
  result.passing = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const GridRow& r) {
    return r.feasible && r.report.accuracy >= options.threshold;
  }));
  result.rows = std::move(rows);
  return result;
}

void write_grid_tsv(const std::filesystem::path& path, const GridResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "rank\tindex\tctype\trt\tct\tcsize\twsize\twstep\ttsize\taccuracy\tcorrect\ttest_count\t"
         "unclassifiable\tmean_cr\tmean_segment_fraction\talphabet_size\tvocabulary_size\tstatus\n";
  std::size_t rank = 0;
  for (const auto& row : result.rows) {
    const auto& c = row.config;
    const auto& r = row.report;
    const bool sorting = c.ctype == ClusterMethod::SortingBased;
    out << ++rank << '\t' << row.index << '\t' << to_string(c.ctype) << '\t' << format_double(c.rt) << '\t'
        << (sorting ? format_double(c.ct) : "-") << '\t' << (sorting ? "-" : std::to_string(c.csize)) << '\t'
        << c.wsize << '\t' << c.wstep << '\t' << format_double(c.tsize) << '\t';
    if (row.feasible) {
      out << format_double(r.accuracy) << '\t' << r.correct << '\t' << r.test_count << '\t' << r.unclassifiable
          << '\t' << format_double(r.mean_cr) << '\t' << format_double(r.mean_segment_fraction) << '\t'
          << r.alphabet_size << '\t' << r.vocabulary_size << "\tok\n";
    } else {
      out << "-\t-\t-\t-\t-\t-\t-\t-\t" << row.error << '\n';
    }
  }
}

json to_json(const GridResult& result) {
  json j = {{"enumerated", result.enumerated},
            {"evaluated", result.evaluated},
            {"threshold", result.threshold},
            {"passing", result.passing}};
  if (const auto* best = result.best())
    j["best"] = to_json(best->report);
  else
    j["best"] = nullptr;
  return j;
}

}  // namespace abba
