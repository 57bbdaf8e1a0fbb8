#include "epaae/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace epaae {

Vocab::Vocab() {
  id2tok_ = {"<pad>", "<bos>", "<eos>", "unk"};
  for (size_t i = 0; i < id2tok_.size(); ++i)
    tok2id_[id2tok_[i]] = static_cast<int32_t>(i);
}

Vocab Vocab::build(const Corpus& corpus, size_t max_size) {
  if (corpus.sentences.empty()) throw UsageError("vocab: empty corpus");
  Vocab v;
  std::unordered_map<std::string, int64_t> freq;
  std::unordered_map<std::string, int64_t> first_seen;
  int64_t pos = 0;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) {
      auto [it, fresh] = freq.try_emplace(t, 0);
      it->second++;
      if (fresh) first_seen[t] = pos;
      ++pos;
    }
  }
  std::vector<std::string> toks;
  toks.reserve(freq.size());
  for (auto& [t, _] : freq)
    if (v.tok2id_.find(t) == v.tok2id_.end()) toks.push_back(t);
  std::sort(toks.begin(), toks.end(), [&](const auto& a, const auto& b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return first_seen[a] < first_seen[b];
  });
  for (const auto& t : toks) {
    if (v.id2tok_.size() >= max_size) break;
    v.tok2id_[t] = static_cast<int32_t>(v.id2tok_.size());
    v.id2tok_.push_back(t);
  }
  return v;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& id2tok) {
  if (id2tok.size() < kNumReserved)
    throw std::runtime_error("vocab: token list shorter than reserved set");
  Vocab v;
  for (int32_t i = 0; i < kNumReserved; ++i)
    if (id2tok[static_cast<size_t>(i)] != v.id2tok_[static_cast<size_t>(i)])
      throw std::runtime_error("vocab: reserved token mismatch");
  for (size_t i = kNumReserved; i < id2tok.size(); ++i) {
    v.tok2id_[id2tok[i]] = static_cast<int32_t>(v.id2tok_.size());
    v.id2tok_.push_back(id2tok[i]);
  }
  return v;
}

int32_t Vocab::encode_token(const std::string& tok) const {
  auto it = tok2id_.find(tok);
  return it == tok2id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int32_t id) const {
  if (id < 0 || id >= size()) throw std::runtime_error("vocab: id out of range");
  return id2tok_[static_cast<size_t>(id)];
}

std::vector<int32_t> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(encode_token(t));
  return out;
}

std::vector<std::string> Vocab::decode(std::span<const int32_t> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int32_t id : ids) out.push_back(token(id));
  return out;
}

std::string Vocab::decode_string(std::span<const int32_t> ids) const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += token(ids[i]);
  }
  return out;
}

std::vector<std::string> clean_tokenize(const std::string& line) {
  std::string cleaned;
  cleaned.reserve(line.size());
  for (char c : line) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 'A' && u <= 'Z') u = static_cast<unsigned char>(u - 'A' + 'a');
    if ((u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') || u == '\'') {
      cleaned += static_cast<char>(u);
    } else if (std::isspace(u)) {
      cleaned += ' ';
    }
    // anything else is dropped
  }
  std::vector<std::string> tokens;
  std::istringstream ss(cleaned);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

Corpus load_corpus(const std::string& text_path,
                   const std::optional<std::string>& label_path) {
  std::ifstream tf(text_path);
  if (!tf) throw UsageError("cannot read corpus file: " + text_path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(tf, line)) lines.push_back(line);

  std::vector<int> labels;
  if (label_path) {
    std::ifstream lf(*label_path);
    if (!lf) throw UsageError("cannot read label file: " + *label_path);
    while (std::getline(lf, line)) {
      if (line.empty() && lf.peek() == EOF) break;
      try {
        labels.push_back(std::stoi(line));
      } catch (const std::exception&) {
        throw UsageError("label file: not an integer: '" + line + "'");
      }
    }
    if (labels.size() != lines.size())
      throw UsageError("label/sentence line-count mismatch: " +
                       std::to_string(labels.size()) + " labels vs " +
                       std::to_string(lines.size()) + " sentences");
  }

  Corpus corpus;
  for (size_t i = 0; i < lines.size(); ++i) {
    LabeledSentence s;
    s.tokens = clean_tokenize(lines[i]);
    if (s.tokens.empty()) continue;  // skipped along with its label
    if (label_path) {
      if (labels[i] < 0) throw UsageError("label file: negative label");
      s.label = labels[i];
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& text_path,
                 const std::optional<std::string>& label_path) {
  std::ofstream tf(text_path);
  if (!tf) throw UsageError("cannot write corpus file: " + text_path);
  for (const auto& s : corpus.sentences) {
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) tf << ' ';
      tf << s.tokens[i];
    }
    tf << '\n';
  }
  if (label_path) {
    std::ofstream lf(*label_path);
    if (!lf) throw UsageError("cannot write label file: " + *label_path);
    for (const auto& s : corpus.sentences) lf << s.label << '\n';
  }
}

Splits split_corpus(const Corpus& corpus, uint64_t seed) {
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  const size_t n = order.size();
  const size_t n_train = n * 8 / 10;
  const size_t n_dev = n / 10;
  Splits sp;
  for (size_t i = 0; i < n; ++i) {
    const auto& s = corpus.sentences[order[i]];
    if (i < n_train)
      sp.train.sentences.push_back(s);
    else if (i < n_train + n_dev)
      sp.dev.sentences.push_back(s);
    else
      sp.test.sentences.push_back(s);
  }
  return sp;
}

Batch pack_batch(const Corpus& corpus, const Vocab& vocab,
                 std::span<const size_t> order) {
  Batch b;
  b.rows = static_cast<int64_t>(order.size());
  int64_t max_len = 0;
  for (size_t idx : order)
    max_len = std::max(
        max_len, static_cast<int64_t>(corpus.sentences[idx].tokens.size()) + 2);
  b.cols = max_len;
  b.ids.assign(static_cast<size_t>(b.rows * b.cols), Vocab::kPad);
  for (int64_t r = 0; r < b.rows; ++r) {
    const auto& s = corpus.sentences[order[static_cast<size_t>(r)]];
    auto enc = vocab.encode(s.tokens);
    int64_t c = 0;
    b.ids[static_cast<size_t>(r * b.cols + c++)] = Vocab::kBos;
    for (int32_t id : enc) b.ids[static_cast<size_t>(r * b.cols + c++)] = id;
    b.ids[static_cast<size_t>(r * b.cols + c++)] = Vocab::kEos;
    b.lengths.push_back(static_cast<int32_t>(c));
    b.corpus_index.push_back(order[static_cast<size_t>(r)]);
  }
  return b;
}

std::vector<Batch> make_batches(const Corpus& corpus, const Vocab& vocab,
                                int batch_size, Rng& rng) {
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  rng.shuffle(order);
  std::vector<Batch> out;
  for (size_t off = 0; off < order.size(); off += static_cast<size_t>(batch_size)) {
    size_t n = std::min(static_cast<size_t>(batch_size), order.size() - off);
    out.push_back(
        pack_batch(corpus, vocab, std::span(order).subspan(off, n)));
  }
  return out;
}

std::vector<Batch> make_ordered_batches(const Corpus& corpus, const Vocab& vocab,
                                        int batch_size) {
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<Batch> out;
  for (size_t off = 0; off < order.size(); off += static_cast<size_t>(batch_size)) {
    size_t n = std::min(static_cast<size_t>(batch_size), order.size() - off);
    out.push_back(
        pack_batch(corpus, vocab, std::span(order).subspan(off, n)));
  }
  return out;
}

}  // namespace epaae
