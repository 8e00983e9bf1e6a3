#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abba_vsm/quantizer.hpp"

namespace abba {

/// A fixed-length run of symbols cut out by the sliding window.
using Word = std::vector<SymbolId>;
using WordCounts = std::map<Word, std::uint64_t>;

struct WindowParams {
  int wsize = 3;
  int wstep = 1;

  friend bool operator==(const WindowParams&, const WindowParams&) = default;
};

/// Words s[i, i+wsize) for i = 0, wstep, 2*wstep, ... while they fit. A string
/// shorter than wsize yields itself as the only word.
std::vector<Word> window(std::span<const SymbolId> symbols, const WindowParams& params);

/// floor((n - wsize) / wstep) + 1 for n >= wsize, else 1.
std::size_t window_count(std::size_t n, const WindowParams& params);

struct BagOfWords {
  std::uint64_t sample_id = 0;
  std::optional<std::string> label;
  WordCounts counts;
};

BagOfWords make_bag(const SymbolString& s, const WindowParams& params);

/// One document per class, each the summed counts of that class's bags.
struct Corpus {
  std::vector<std::string> class_labels;  // sorted
  std::vector<WordCounts> documents;      // parallel to class_labels
  std::vector<std::size_t> sample_counts; // bags per class
};

Corpus build_corpus(std::span<const BagOfWords> bags);

/// The class weight matrix: one row per vocabulary word, one column per
/// class; weights[word][class] = tf * idf with
///   tf  = count of the word in the class document / terms in that document
///   idf = ln(|classes| / classes whose document contains the word).
struct TfidfWeights {
  std::vector<Word> vocabulary;  // sorted
  std::vector<std::string> class_labels;
  std::vector<std::vector<double>> weights;

  friend bool operator==(const TfidfWeights&, const TfidfWeights&) = default;
};

TfidfWeights fit_tfidf(const Corpus& corpus);

struct ModelConfig {
  WindowParams window;
  double rt = 0.1;
  ClusteringParams clustering;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainingInfo {
  std::string dataset_name;
  std::uint64_t seed = 0;
  std::vector<std::size_t> class_sample_counts;

  friend bool operator==(const TrainingInfo&, const TrainingInfo&) = default;
};

/// Codebook plus class weights. Immutable once built; lookup tables for
/// classification are derived in the constructor.
class VsmModel {
 public:
  VsmModel(Codebook codebook, TfidfWeights tfidf, ModelConfig config, TrainingInfo info);

  const Codebook& codebook() const { return codebook_; }
  const TfidfWeights& tfidf() const { return tfidf_; }
  const ModelConfig& config() const { return config_; }
  const TrainingInfo& info() const { return info_; }
  const std::vector<std::string>& class_labels() const { return tfidf_.class_labels; }
  std::size_t vocabulary_size() const { return tfidf_.vocabulary.size(); }

  const CenterIndex& center_index() const { return center_index_; }
  std::optional<std::size_t> word_index(const Word& w) const;
  /// Euclidean norm of each class column.
  const std::vector<double>& class_norms() const { return class_norms_; }
  /// Class with the most training samples, earliest label on ties.
  std::size_t largest_class() const;

  friend bool operator==(const VsmModel& a, const VsmModel& b) {
    return a.codebook_ == b.codebook_ && a.tfidf_ == b.tfidf_ && a.config_ == b.config_ &&
           a.info_ == b.info_;
  }

 private:
  Codebook codebook_;
  TfidfWeights tfidf_;
  ModelConfig config_;
  TrainingInfo info_;
  CenterIndex center_index_;
  std::map<Word, std::size_t> word_index_;
  std::vector<double> class_norms_;
};

struct Classification {
  /// Empty when the sample is unclassifiable and no fallback was requested.
  std::optional<std::size_t> class_index;
  std::vector<double> scores;
  /// Every test word was out of vocabulary, so the frequency vector is zero.
  bool unclassifiable = false;
  bool used_fallback = false;
};

/// Cosine similarity of a dense frequency vector (indexed by vocabulary)
/// against every class column. Zero-norm classes score 0.
std::vector<double> cosine_scores(std::span<const double> frequencies, const VsmModel& model);

/// Relative gap below which two cosine scores are treated as equal.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Argmax over cosine scores, ties (within kScoreTieTolerance) to the
/// earlier class. A zero frequency
/// vector is unclassifiable; with `fallback` it maps to largest_class().
Classification classify_frequencies(std::span<const double> frequencies, const VsmModel& model,
                                    bool fallback = false);

/// Raw word counts of `s` over the model vocabulary; out-of-vocabulary
/// words are dropped.
std::vector<double> frequency_vector(const SymbolString& s, const VsmModel& model);

Classification classify(const SymbolString& s, const VsmModel& model, bool fallback = false);

}  // namespace abba
