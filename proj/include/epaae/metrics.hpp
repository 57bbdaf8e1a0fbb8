#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "epaae/corpus.hpp"
#include "epaae/model.hpp"
#include "epaae/tensor.hpp"
#include "epaae/toy.hpp"
#include "epaae/transfer.hpp"

namespace epaae {

using TokenSeq = std::vector<std::string>;

TokenSeq split_tokens(const std::string& sentence);

// Corpus-level BLEU-2: clipped unigram/bigram precisions, equal weights,
// brevity penalty exp(1 - r/c) for short hypotheses, no smoothing (any zero
// precision zeroes the score).
double bleu2(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs);

// LCS F-measure with beta = 1.2, averaged over pairs.
double rouge_l(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs);

// tf-idf n-gram cosines for n = 1..4 averaged and scaled by 10; document
// frequencies come from the reference side. No length penalty.
double cider(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs);

// Token-level edit distance, unit costs.
int64_t levenshtein(const TokenSeq& a, const TokenSeq& b);
double levenshtein_mean(std::span<const TokenSeq> hyps,
                        std::span<const TokenSeq> refs);

// Word vectors with an unk fallback row.
class EmbeddingTable {
 public:
  static EmbeddingTable from_model(const Model& model);
  // One `token v_1 ... v_E` line per word.
  static EmbeddingTable from_text_file(const std::string& path);

  std::span<const double> vector(const std::string& token) const;
  int64_t dim() const { return dim_; }
  size_t vocab_size() const { return offsets_.size(); }

 private:
  int64_t dim_ = 0;
  std::vector<double> storage_;
  std::unordered_map<std::string, size_t> offsets_;
  size_t unk_offset_ = 0;
};

struct EmbeddingMetrics {
  double average = 0.0;  // cosine of mean word vectors
  double extrema = 0.0;  // cosine of signed-max-magnitude vectors
  double greedy = 0.0;   // symmetric best-match cosine
};

EmbeddingMetrics embedding_metrics(std::span<const TokenSeq> hyps,
                                   std::span<const TokenSeq> refs,
                                   const EmbeddingTable& table);

// Style assignment; nullopt when the sentence gives no verdict.
class StyleClassifier {
 public:
  virtual ~StyleClassifier() = default;
  virtual std::optional<int> classify(const TokenSeq& tokens) const = 0;
};

// Exact decision on the synthetic corpus: class-token membership per
// attribute. Ties or absent evidence stay unresolved.
class RuleToyClassifier : public StyleClassifier {
 public:
  RuleToyClassifier(ToySpec spec, StyleAttr attr);
  std::optional<int> classify(const TokenSeq& tokens) const override;

 private:
  std::optional<int> bit_of(const TokenSeq& tokens,
                            const std::vector<std::string>& zero,
                            const std::vector<std::string>& one) const;
  ToySpec spec_;
  StyleAttr attr_;
};

// Mean bag-of-embeddings into one softmax layer; features stay frozen.
class LinearStyleClassifier : public StyleClassifier {
 public:
  LinearStyleClassifier(const EmbeddingTable* table, int n_classes, Rng& rng);
  std::optional<int> classify(const TokenSeq& tokens) const override;
  int n_classes() const { return n_classes_; }

  Tensor weights() { return w_; }
  Tensor bias() { return b_; }
  std::vector<double> features(const TokenSeq& tokens) const;

 private:
  const EmbeddingTable* table_;
  int n_classes_;
  Tensor w_, b_;
};

struct ClassifierReport {
  double dev_accuracy = 0.0;
  int steps = 0;
};

// Adam on the linear layer until the dev split stops improving.
std::unique_ptr<LinearStyleClassifier> train_style_classifier(
    const Corpus& train, const Corpus* dev, const EmbeddingTable& table,
    Rng& rng, ClassifierReport* report = nullptr);

double classifier_accuracy(const StyleClassifier& clf, const Corpus& corpus);

struct TstResult {
  double accuracy = 0.0;
  int64_t hits = 0;
  int64_t total = 0;
  // (source style, target style) -> {hits, total}
  std::map<std::pair<int, int>, std::pair<int64_t, int64_t>> per_direction;
};

TstResult tst_accuracy(std::span<const TransferEntry> entries,
                       const StyleClassifier& clf);

struct MetricsReport {
  std::optional<double> tst_accuracy;
  std::optional<double> bleu2;
  std::optional<double> rouge_l;
  std::optional<double> cider;
  std::optional<double> levenshtein_mean;
  std::optional<double> embedding_average;
  std::optional<double> vector_extrema;
  std::optional<double> greedy_matching;
  std::map<std::string, double> per_direction;  // "src->tgt" accuracy
  std::map<std::string, std::string> config_echo;
};

// Content metrics between aligned hypothesis/reference corpora; embedding
// metrics only when a table is supplied.
MetricsReport evaluate_pairs(std::span<const TokenSeq> hyps,
                             std::span<const TokenSeq> refs,
                             const EmbeddingTable* table);

std::string metrics_report_to_json(const MetricsReport& report);

}  // namespace epaae
