// abba-vsm: compress, train, predict, evaluate and grid-search from the
// command line. Exit codes: 0 success, 2 input error, 3 infeasible config.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abba_vsm/error.hpp"
#include "abba_vsm/ingest.hpp"
#include "abba_vsm/model_io.hpp"
#include "abba_vsm/number_format.hpp"
#include "abba_vsm/pipeline.hpp"
#include "abba_vsm/wire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigFlags {
  abba::PipelineConfig config;
  std::string ctype = "sorting_based";
  CLI::Option* rt = nullptr;
};

void add_config_flags(CLI::App& app, ConfigFlags& f) {
  auto& c = f.config;
  f.rt = app.add_option("--rt", c.rt, "Reduction tolerance")->capture_default_str();
  app.add_option("--ctype", f.ctype, "Clustering method: sorting_based or k_means")->capture_default_str();
  app.add_option("--ct", c.ct, "Clustering tolerance (sorting_based)")->capture_default_str();
  app.add_option("--wsize", c.wsize, "Word size")->capture_default_str();
  app.add_option("--wstep", c.wstep, "Window step")->capture_default_str();
  app.add_option("--csize", c.csize, "Cluster count (k_means)")->capture_default_str();
  app.add_option("--tsize", c.tsize, "Test fraction for the stratified split")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for the split and k-means initialization")->capture_default_str();
  app.add_flag("--allow-out-of-range", c.allow_out_of_range, "Accept values outside the evaluated ranges");
  app.add_flag("--fallback", c.fallback, "Assign unclassifiable samples to the largest training class");
}

abba::PipelineConfig resolve(const ConfigFlags& f) {
  abba::PipelineConfig c = f.config;
  c.ctype = abba::parse_cluster_method(f.ctype);
  return c;
}

abba::Dataset load_inputs(const std::vector<std::string>& paths, abba::Delimiter delim, bool znorm) {
  abba::Dataset ds = abba::load_ucr(paths.at(0), delim);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const std::string name = ds.name;
    ds = abba::concat(ds, abba::load_ucr(paths[i], delim), name);
  }
  if (paths.size() > 1) {
    // FOO_TRAIN + FOO_TEST -> FOO
    const auto cut = ds.name.rfind("_TRAIN");
    if (cut != std::string::npos) ds.name.resize(cut);
  }
  return znorm ? abba::z_normalize(ds) : ds;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto v = abba::parse_double(std::string_view(text).substr(start, end - start));
    if (!v) throw abba::InvalidParamsError(std::string("bad value in ") + what + ": '" + text + "'");
    out.push_back(*v);
    start = end + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    if (v != static_cast<int>(v)) throw abba::InvalidParamsError(std::string(what) + " must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void print_wire(const abba::WireStats& st) {
  std::cout << "bytes_written: " << st.bytes_written << '\n'
            << "raw_equivalent_bytes: " << st.raw_equivalent_bytes << '\n'
            << "segment_payload_bytes: " << st.segment_payload_bytes << '\n'
            << "reduction_percent: " << abba::format_double(st.reduction_percent) << '\n';
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw abba::IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ABBA-VSM symbolic time series compression and classification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  ConfigFlags flags;
  add_config_flags(app, flags);
  std::string delimiter = "auto";
  bool znorm = false;
  app.add_option("--delimiter", delimiter, "Input delimiter: auto, tab, comma, whitespace")->capture_default_str();
  app.add_flag("--znorm", znorm, "z-normalize every raw series after loading");

  // compress
  auto* compress = app.add_subcommand("compress", "Reduce a dataset to a segment stream");
  std::vector<std::string> compress_in;
  std::string compress_out;
  compress->add_option("-i,--input", compress_in, "UCR file(s)")->required();
  compress->add_option("-o,--output", compress_out, "Output .abbaseg file")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit a model on labeled data");
  std::vector<std::string> train_in;
  std::string train_model_path;
  train->add_option("-i,--input", train_in, "UCR file(s) or one .abbaseg stream")->required();
  train->add_option("-m,--model", train_model_path, "Output model file")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Classify samples with a trained model");
  std::string predict_model, predict_in, predict_out;
  bool predict_unlabeled = false;
  predict->add_option("-m,--model", predict_model, "Model file")->required();
  predict->add_option("-i,--input", predict_in, "UCR file or .abbaseg stream")->required();
  predict->add_option("-o,--output", predict_out, "Predictions CSV")->required();
  predict->add_flag("--unlabeled", predict_unlabeled, "Input rows carry no label field");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Split, train, test and report metrics");
  std::vector<std::string> eval_in;
  std::string eval_test_in, eval_report, eval_predictions, eval_segments, eval_sweep_out;
  std::optional<std::string> eval_sweep;
  evaluate->add_option("-i,--input", eval_in, "UCR file(s), concatenated then split by --tsize")->required();
  evaluate->add_option("--test-input", eval_test_in, "Use this predefined test file instead of splitting");
  evaluate->add_option("--report", eval_report, "Report JSON output");
  evaluate->add_option("--predictions", eval_predictions, "Predictions CSV output");
  evaluate->add_option("--segments-out", eval_segments, "Also write the segment stream here");
  evaluate->add_option("--rt-sweep", eval_sweep, "Comma-separated rt values for a CR sweep ('default' for the full grid)")
      ->expected(0, 1)
      ->default_str("default");
  evaluate->add_option("--sweep-output", eval_sweep_out, "CR-vs-RT TSV output")->capture_default_str();

  // grid-search
  auto* grid = app.add_subcommand("grid-search", "Exhaustive hyperparameter sweep");
  std::vector<std::string> grid_in;
  std::string grid_ctypes = "both", grid_rt, grid_ct, grid_wsize, grid_wstep, grid_csize, grid_tsize;
  std::string grid_out, grid_report;
  abba::GridOptions grid_opts;
  grid->add_option("-i,--input", grid_in, "UCR file(s), concatenated then split per config")->required();
  grid->add_option("--ctypes", grid_ctypes, "sorting_based, k_means or both")->capture_default_str();
  grid->add_option("--rt-values", grid_rt, "Comma-separated rt values");
  grid->add_option("--ct-values", grid_ct, "Comma-separated ct values");
  grid->add_option("--wsize-values", grid_wsize, "Comma-separated wsize values");
  grid->add_option("--wstep-values", grid_wstep, "Comma-separated wstep values");
  grid->add_option("--csize-values", grid_csize, "Comma-separated csize values");
  grid->add_option("--tsize-values", grid_tsize, "Comma-separated tsize values");
  grid->add_option("--budget", grid_opts.budget, "Evaluate only the first N configs (0 = all)")->capture_default_str();
  grid->add_option("--threshold", grid_opts.threshold, "Accuracy threshold for the passing count")->capture_default_str();
  grid->add_flag("--parallel", grid_opts.parallel, "Evaluate configs on several threads");
  grid->add_option("--threads", grid_opts.threads, "Thread count for --parallel (0 = all cores)");
  grid->add_option("-o,--output", grid_out, "Results TSV");
  grid->add_option("--report", grid_report, "Summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const abba::Delimiter delim = abba::parse_delimiter(delimiter);
    abba::PipelineConfig config = resolve(flags);

    if (*compress) {
      if (!(config.rt > 0.0)) throw abba::InvalidParamsError("rt must be positive");
      const abba::Dataset ds = load_inputs(compress_in, delim, znorm);
      const auto seqs = abba::reduce_all(ds, config.rt);
      const auto st = abba::write_segments(seqs, {abba::kSegmentFormatVersion, ds.name, config.rt, 0}, compress_out);
      std::cout << "samples: " << seqs.size() << '\n';
      print_wire(st);
      return 0;
    }

    if (*train) {
      abba::validate(config);
      abba::SegmentInput input;
      if (train_in.size() == 1) {
        std::optional<double> requested;
        if (flags.rt->count() > 0) requested = config.rt;
        input = abba::load_segment_input(train_in[0], requested, config.rt, delim, znorm);
      } else {
        const abba::Dataset ds = load_inputs(train_in, delim, znorm);
        input.dataset_name = ds.name;
        input.rt = config.rt;
        input.sequences = abba::reduce_all(ds, config.rt);
      }
      for (const auto& w : input.warnings) std::cerr << "warning: " << w << '\n';
      config.rt = input.rt;
      const auto outcome = abba::train_model(input.sequences, config, input.dataset_name);
      abba::save_model(outcome.model, train_model_path);
      std::cout << "training_samples: " << input.sequences.size() << '\n'
                << "alphabet_size: " << outcome.model.codebook().size() << '\n'
                << "vocabulary_size: " << outcome.model.vocabulary_size() << '\n';
      for (std::size_t c = 0; c < outcome.model.class_labels().size(); ++c)
        std::cout << "class " << outcome.model.class_labels()[c] << ": samples "
                  << outcome.model.info().class_sample_counts[c] << ", words " << outcome.document_sizes[c] << '\n';
      return 0;
    }

    if (*predict) {
      const abba::VsmModel model = abba::load_model(predict_model);
      std::vector<abba::SegmentSequence> seqs;
      if (abba::looks_like_segment_stream(predict_in)) {
        auto stream = abba::read_segments(predict_in);
        if (stream.header.rt != model.config().rt)
          std::cerr << "warning: stream rt " << abba::format_double(stream.header.rt) << " differs from model rt "
                    << abba::format_double(model.config().rt) << '\n';
        seqs = std::move(stream.sequences);
      } else {
        abba::Dataset ds = abba::load_ucr(predict_in, delim, !predict_unlabeled);
        if (znorm) ds = abba::z_normalize(ds);
        seqs = abba::reduce_all(ds, model.config().rt);
      }
      const auto rows = abba::predict(seqs, model, config.fallback);
      abba::write_predictions_csv(predict_out, rows, model);
      std::size_t unclassifiable = 0;
      for (const auto& r : rows) unclassifiable += r.result.unclassifiable ? 1 : 0;
      std::cout << "predicted: " << rows.size() << '\n' << "unclassifiable: " << unclassifiable << '\n';
      return 0;
    }

    if (*evaluate) {
      const abba::Dataset ds = load_inputs(eval_in, delim, znorm);
      abba::EvalOutcome outcome;
      if (!eval_test_in.empty()) {
        abba::Dataset test = abba::load_ucr(eval_test_in, delim);
        if (znorm) test = abba::z_normalize(test);
        outcome = abba::evaluate(ds, test, config);
      } else {
        outcome = abba::evaluate(ds, config);
      }
      json report = abba::to_json(outcome.report);
      if (eval_sweep) {
        std::vector<double> rts = abba::SearchSpace::defaults().rt;
        if (*eval_sweep != "default" && !eval_sweep->empty()) rts = parse_double_list(*eval_sweep, "--rt-sweep");
        const auto rows = abba::rt_sweep(ds, rts);
        const std::string out = eval_sweep_out.empty() ? "cr_vs_rt.tsv" : eval_sweep_out;
        abba::write_sweep_tsv(out, rows);
        report["rt_sweep_file"] = out;
      }
      if (!eval_report.empty()) write_json(eval_report, report);
      if (!eval_predictions.empty())
        abba::write_predictions_csv(eval_predictions, outcome.predictions, *outcome.model);
      if (!eval_segments.empty())
        abba::write_segments(outcome.segments, {abba::kSegmentFormatVersion, ds.name, config.rt, 0}, eval_segments);
      std::cout << report.dump(2) << '\n';
      return 0;
    }

    if (*grid) {
      const abba::Dataset ds = load_inputs(grid_in, delim, znorm);
      abba::SearchSpace space = abba::SearchSpace::defaults();
      if (grid_ctypes != "both") {
        space.ctypes.clear();
        std::size_t start = 0;
        while (start <= grid_ctypes.size()) {
          const auto end = std::min(grid_ctypes.find(',', start), grid_ctypes.size());
          space.ctypes.push_back(abba::parse_cluster_method(grid_ctypes.substr(start, end - start)));
          start = end + 1;
        }
      }
      if (grid->count("--rt-values")) space.rt = parse_double_list(grid_rt, "--rt-values");
      if (grid->count("--ct-values")) space.ct = parse_double_list(grid_ct, "--ct-values");
      if (grid->count("--wsize-values")) space.wsize = parse_int_list(grid_wsize, "--wsize-values");
      if (grid->count("--wstep-values")) space.wstep = parse_int_list(grid_wstep, "--wstep-values");
      if (grid->count("--csize-values")) space.csize = parse_int_list(grid_csize, "--csize-values");
      if (grid->count("--tsize-values")) space.tsize = parse_double_list(grid_tsize, "--tsize-values");

      const auto result = abba::grid_search(ds, space, config, grid_opts);
      if (!grid_out.empty()) abba::write_grid_tsv(grid_out, result);
      const json summary = abba::to_json(result);
      if (!grid_report.empty()) write_json(grid_report, summary);
      std::cout << summary.dump(2) << '\n';
      return 0;
    }
  } catch (const abba::Error& e) {
    std::cerr << "error (" << abba::to_string(e.kind()) << "): " << e.what() << '\n';
    return abba::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
