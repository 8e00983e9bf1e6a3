#include "abba_vsm/vsm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "abba_vsm/error.hpp"

namespace abba {

namespace {

void check(const WindowParams& p) {
  if (p.wsize < 1) throw InvalidParamsError("window size must be at least 1");
  if (p.wstep < 1) throw InvalidParamsError("window step must be at least 1");
}

}  // namespace

std::size_t window_count(std::size_t n, const WindowParams& params) {
  check(params);
  const auto size = static_cast<std::size_t>(params.wsize);
  if (n < size) return 1;
  return (n - size) / static_cast<std::size_t>(params.wstep) + 1;
}

std::vector<Word> window(std::span<const SymbolId> symbols, const WindowParams& params) {
  check(params);
  if (symbols.empty()) throw InvalidInputError("cannot window an empty symbol string");
  const auto size = static_cast<std::size_t>(params.wsize);
  const auto step = static_cast<std::size_t>(params.wstep);
  std::vector<Word> words;
  if (symbols.size() < size) {
    words.emplace_back(symbols.begin(), symbols.end());
    return words;
  }
  words.reserve(window_count(symbols.size(), params));
  for (std::size_t i = 0; i + size <= symbols.size(); i += step)
    words.emplace_back(symbols.begin() + static_cast<std::ptrdiff_t>(i),
                       symbols.begin() + static_cast<std::ptrdiff_t>(i + size));
  return words;
}

BagOfWords make_bag(const SymbolString& s, const WindowParams& params) {
  BagOfWords bag;
  bag.sample_id = s.sample_id;
  bag.label = s.label;
  for (auto& w : window(s.symbols, params)) ++bag.counts[std::move(w)];
  return bag;
}

Corpus build_corpus(std::span<const BagOfWords> bags) {
  std::map<std::string, std::pair<WordCounts, std::size_t>> docs;
  for (const auto& bag : bags) {
    if (!bag.label) throw MissingLabelError("bag of words for sample " +
                                            std::to_string(bag.sample_id) + " has no label");
    auto& [doc, n] = docs[*bag.label];
    for (const auto& [word, count] : bag.counts) doc[word] += count;
    ++n;
  }
  if (docs.size() < 2)
    throw SingleClassCorpusError("training data must contain at least two classes, found " +
                                 std::to_string(docs.size()));
  Corpus corpus;
  for (auto& [label, entry] : docs) {
    corpus.class_labels.push_back(label);
    corpus.documents.push_back(std::move(entry.first));
    corpus.sample_counts.push_back(entry.second);
  }
  return corpus;
}

TfidfWeights fit_tfidf(const Corpus& corpus) {
  const std::size_t n_classes = corpus.documents.size();
  if (n_classes < 2) throw SingleClassCorpusError("TF-IDF needs at least two class documents");

  std::map<Word, std::size_t> document_frequency;
  std::vector<double> totals(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c)
    for (const auto& [word, count] : corpus.documents[c]) {
      ++document_frequency[word];
      totals[c] += static_cast<double>(count);
    }

  TfidfWeights out;
  out.class_labels = corpus.class_labels;
  out.vocabulary.reserve(document_frequency.size());
  out.weights.reserve(document_frequency.size());
  const double n_docs = static_cast<double>(n_classes);
  for (const auto& [word, df] : document_frequency) {
    const double idf = std::log(n_docs / static_cast<double>(df));
    std::vector<double> row(n_classes, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
      const auto it = corpus.documents[c].find(word);
      if (it == corpus.documents[c].end()) continue;
      row[c] = static_cast<double>(it->second) / totals[c] * idf;
    }
    out.vocabulary.push_back(word);
    out.weights.push_back(std::move(row));
  }
  return out;
}

VsmModel::VsmModel(Codebook codebook, TfidfWeights tfidf, ModelConfig config, TrainingInfo info)
    : codebook_(std::move(codebook)),
      tfidf_(std::move(tfidf)),
      config_(config),
      info_(std::move(info)),
      center_index_(codebook_.centers) {
  const std::size_t n_classes = tfidf_.class_labels.size();
  class_norms_.assign(n_classes, 0.0);
  for (std::size_t j = 0; j < tfidf_.vocabulary.size(); ++j) {
    word_index_.emplace(tfidf_.vocabulary[j], j);
    for (std::size_t c = 0; c < n_classes; ++c) class_norms_[c] += tfidf_.weights[j][c] * tfidf_.weights[j][c];
  }
  for (auto& n : class_norms_) n = std::sqrt(n);
  if (info_.class_sample_counts.size() != n_classes) info_.class_sample_counts.assign(n_classes, 0);
}

std::optional<std::size_t> VsmModel::word_index(const Word& w) const {
  const auto it = word_index_.find(w);
  if (it == word_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VsmModel::largest_class() const {
  const auto& counts = info_.class_sample_counts;
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<double> cosine_scores(std::span<const double> frequencies, const VsmModel& model) {
  const auto& weights = model.tfidf().weights;
  const std::size_t n_classes = model.class_labels().size();
  std::vector<double> dots(n_classes, 0.0);
  double w_norm = 0.0;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double f = frequencies[j];
    if (f == 0.0) continue;
    w_norm += f * f;
    for (std::size_t c = 0; c < n_classes; ++c) dots[c] += f * weights[j][c];
  }
  w_norm = std::sqrt(w_norm);
  std::vector<double> scores(n_classes, 0.0);
  if (w_norm == 0.0) return scores;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double v_norm = model.class_norms()[c];
    if (v_norm == 0.0) continue;
    scores[c] = std::clamp(dots[c] / (w_norm * v_norm), 0.0, 1.0);
  }
  return scores;
}

Classification classify_frequencies(std::span<const double> frequencies, const VsmModel& model,
                                    bool fallback) {
  Classification out;
  out.scores = cosine_scores(frequencies, model);
  const bool zero = std::all_of(frequencies.begin(), frequencies.end(), [](double f) { return f == 0.0; });
  if (zero) {
    out.unclassifiable = true;
    if (fallback) {
      out.class_index = model.largest_class();
      out.used_fallback = true;
    }
    return out;
  }
  // Scores within rounding of the maximum count as tied, so that
  // mathematically equal cosines resolve to the earlier class however the
  // frequency vector happens to be scaled.
  const double top = *std::max_element(out.scores.begin(), out.scores.end());
  std::size_t best = 0;
  while (out.scores[best] < top * (1.0 - kScoreTieTolerance)) ++best;
  out.class_index = best;
  return out;
}

std::vector<double> frequency_vector(const SymbolString& s, const VsmModel& model) {
  std::vector<double> freq(model.vocabulary_size(), 0.0);
  for (const auto& w : window(s.symbols, model.config().window))
    if (const auto j = model.word_index(w)) freq[*j] += 1.0;
  return freq;
}

Classification classify(const SymbolString& s, const VsmModel& model, bool fallback) {
  const auto freq = frequency_vector(s, model);
  return classify_frequencies(freq, model, fallback);
}

}  // namespace abba
