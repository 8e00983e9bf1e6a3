#include "abba_vsm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "abba_vsm/error.hpp"

namespace abba {

using nlohmann::json;

void save_model(const VsmModel& model, std::ostream& out) {
  const auto& cb = model.codebook();
  json centers = json::array();
  for (const auto& c : cb.centers) centers.push_back(json::array({c[0], c[1]}));
  json params;
  if (cb.params.method == ClusterMethod::SortingBased) {
    params = {{"ct", cb.params.ct}};
  } else {
    params = {{"csize", cb.params.csize}, {"seed", cb.params.seed}};
  }
  const auto& cfg = model.config();
  json doc = {
      {"format", "abba-vsm-model"},
      {"format_version", kModelFormatVersion},
      {"codebook",
       {{"sigma_len", cb.sigma_len},
        {"sigma_inc", cb.sigma_inc},
        {"centers", std::move(centers)},
        {"alphabet", cb.alphabet},
        {"method", to_string(cb.params.method)},
        {"params", std::move(params)}}},
      {"vocabulary", model.tfidf().vocabulary},
      {"class_labels", model.class_labels()},
      {"weights", model.tfidf().weights},
      {"config", {{"wsize", cfg.window.wsize}, {"wstep", cfg.window.wstep}, {"rt", cfg.rt}}},
      {"training",
       {{"dataset_name", model.info().dataset_name},
        {"seed", model.info().seed},
        {"class_sample_counts", model.info().class_sample_counts}}},
  };
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed writing model");
}

void save_model(const VsmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(model, out);
}

VsmModel load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "abba-vsm-model") throw FormatError("not a model file");
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw FormatError("unsupported model format version");

    const auto& jcb = doc.at("codebook");
    Codebook cb;
    cb.sigma_len = jcb.at("sigma_len").get<double>();
    cb.sigma_inc = jcb.at("sigma_inc").get<double>();
    for (const auto& c : jcb.at("centers")) {
      if (c.size() != 2) throw FormatError("codebook center is not a 2-vector");
      cb.centers.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    cb.alphabet = jcb.at("alphabet").get<std::vector<SymbolId>>();
    cb.params.method = parse_cluster_method(jcb.at("method").get<std::string>());
    const auto& jp = jcb.at("params");
    if (cb.params.method == ClusterMethod::SortingBased) {
      cb.params.ct = jp.at("ct").get<double>();
    } else {
      cb.params.csize = jp.at("csize").get<int>();
      cb.params.seed = jp.at("seed").get<std::uint64_t>();
    }
    if (!(cb.sigma_len > 0.0) || !(cb.sigma_inc > 0.0) || !std::isfinite(cb.sigma_len) ||
        !std::isfinite(cb.sigma_inc))
      throw FormatError("codebook scales must be positive and finite");
    if (cb.centers.empty() || cb.centers.size() != cb.alphabet.size())
      throw FormatError("codebook centers and alphabet disagree");

    TfidfWeights tfidf;
    tfidf.vocabulary = doc.at("vocabulary").get<std::vector<Word>>();
    tfidf.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    tfidf.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
    if (tfidf.class_labels.size() < 2) throw FormatError("model needs at least two classes");
    if (tfidf.weights.size() != tfidf.vocabulary.size())
      throw FormatError("weight matrix rows do not match the vocabulary");
    for (const auto& row : tfidf.weights) {
      if (row.size() != tfidf.class_labels.size())
        throw FormatError("weight matrix columns do not match the classes");
      for (double w : row)
        if (!(w >= 0.0) || !std::isfinite(w)) throw FormatError("weights must be finite and non-negative");
    }

    const auto& jc = doc.at("config");
    ModelConfig config;
    config.window.wsize = jc.at("wsize").get<int>();
    config.window.wstep = jc.at("wstep").get<int>();
    config.rt = jc.at("rt").get<double>();
    config.clustering = cb.params;
    if (config.window.wsize < 1 || config.window.wstep < 1 || !(config.rt > 0.0))
      throw FormatError("model config out of range");

    const auto& jt = doc.at("training");
    TrainingInfo info;
    info.dataset_name = jt.at("dataset_name").get<std::string>();
    info.seed = jt.at("seed").get<std::uint64_t>();
    info.class_sample_counts = jt.at("class_sample_counts").get<std::vector<std::size_t>>();
    if (info.class_sample_counts.size() != tfidf.class_labels.size())
      throw FormatError("class sample counts do not match the classes");

    return VsmModel(std::move(cb), std::move(tfidf), config, std::move(info));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const InvalidParamsError& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

VsmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace abba
