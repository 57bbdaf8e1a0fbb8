#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "epaae/rng.hpp"

namespace epaae {

// Raised for bad user input (paths, config, malformed files); the CLI maps
// it to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LabeledSentence {
  std::vector<std::string> tokens;  // content tokens only, no bos/eos
  int label = -1;                   // -1 means unlabeled
};

struct Corpus {
  std::vector<LabeledSentence> sentences;

  bool labeled() const {
    return !sentences.empty() && sentences.front().label >= 0;
  }
  size_t size() const { return sentences.size(); }
};

// Token/id bijection with fixed reserved ids. The unk surface form is the
// bare string "unk" so decoded output reads naturally.
class Vocab {
 public:
  static constexpr int32_t kPad = 0;
  static constexpr int32_t kBos = 1;
  static constexpr int32_t kEos = 2;
  static constexpr int32_t kUnk = 3;
  static constexpr int32_t kNumReserved = 4;

  Vocab();

  // Frequency-ranked, ties broken by first occurrence, truncated to
  // max_size ids including the reserved four.
  static Vocab build(const Corpus& corpus, size_t max_size = 25000);
  // Rebuild from a serialized token list (reserved tokens included).
  static Vocab from_tokens(const std::vector<std::string>& id2tok);

  int32_t encode_token(const std::string& tok) const;
  const std::string& token(int32_t id) const;
  std::vector<int32_t> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int32_t> ids) const;
  std::string decode_string(std::span<const int32_t> ids) const;

  int32_t size() const { return static_cast<int32_t>(id2tok_.size()); }
  const std::vector<std::string>& tokens() const { return id2tok_; }

 private:
  std::vector<std::string> id2tok_;
  std::unordered_map<std::string, int32_t> tok2id_;
};

// Lowercase, keep [a-z0-9'] and whitespace, drop everything else, then
// split on whitespace.
std::vector<std::string> clean_tokenize(const std::string& line);

// One whitespace-tokenized sentence per line; optional line-aligned label
// file. Lines that clean to nothing are skipped together with their label.
Corpus load_corpus(const std::string& text_path,
                   const std::optional<std::string>& label_path = std::nullopt);

void save_corpus(const Corpus& corpus, const std::string& text_path,
                 const std::optional<std::string>& label_path = std::nullopt);

struct Splits {
  Corpus train, dev, test;
};

// Deterministic seeded shuffle, 80/10/10.
Splits split_corpus(const Corpus& corpus, uint64_t seed);

// Padded batch of id rows: bos + tokens + eos, right-padded with pad.
struct Batch {
  std::vector<int32_t> ids;  // row-major rows x cols
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<int32_t> lengths;       // per row, pre-padding (bos+eos included)
  std::vector<size_t> corpus_index;   // row -> sentence index

  int32_t at(int64_t r, int64_t c) const {
    return ids[static_cast<size_t>(r * cols + c)];
  }
  std::vector<int32_t> column(int64_t c) const {
    std::vector<int32_t> out(static_cast<size_t>(rows));
    for (int64_t r = 0; r < rows; ++r) out[static_cast<size_t>(r)] = at(r, c);
    return out;
  }
};

Batch pack_batch(const Corpus& corpus, const Vocab& vocab,
                 std::span<const size_t> order);

// Shuffled per call via rng; same seed, same batch sequence.
std::vector<Batch> make_batches(const Corpus& corpus, const Vocab& vocab,
                                int batch_size, Rng& rng);
// Corpus order preserved (index building, evaluation).
std::vector<Batch> make_ordered_batches(const Corpus& corpus, const Vocab& vocab,
                                        int batch_size);

}  // namespace epaae
