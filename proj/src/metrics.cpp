#include "epaae/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "epaae/adam.hpp"
#include "epaae/graph.hpp"

namespace epaae {

namespace {

void require_aligned(std::span<const TokenSeq> hyps,
                     std::span<const TokenSeq> refs) {
  if (hyps.empty()) throw UsageError("metrics: empty hypothesis set");
  if (hyps.size() != refs.size())
    throw UsageError("metrics: hypothesis/reference count mismatch");
}

using NgramCounts = std::map<std::vector<std::string>, int64_t>;

NgramCounts ngram_counts(const TokenSeq& toks, size_t n) {
  NgramCounts out;
  if (toks.size() < n) return out;
  for (size_t i = 0; i + n <= toks.size(); ++i)
    out[std::vector<std::string>(toks.begin() + static_cast<long>(i),
                                 toks.begin() + static_cast<long>(i + n))]++;
  return out;
}

int64_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int64_t> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TokenSeq split_tokens(const std::string& sentence) {
  TokenSeq out;
  std::istringstream ss(sentence);
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

double bleu2(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs) {
  require_aligned(hyps, refs);
  int64_t hyp_len = 0, ref_len = 0;
  double log_sum = 0.0;
  for (size_t n = 1; n <= 2; ++n) {
    int64_t matched = 0, total = 0;
    for (size_t i = 0; i < hyps.size(); ++i) {
      auto hc = ngram_counts(hyps[i], n);
      auto rc = ngram_counts(refs[i], n);
      for (const auto& [gram, cnt] : hc) {
        auto it = rc.find(gram);
        matched += std::min(cnt, it == rc.end() ? 0 : it->second);
        total += cnt;
      }
    }
    if (matched == 0 || total == 0) return 0.0;  // unsmoothed
    log_sum += 0.5 * std::log(static_cast<double>(matched) /
                              static_cast<double>(total));
  }
  for (size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += static_cast<int64_t>(hyps[i].size());
    ref_len += static_cast<int64_t>(refs[i].size());
  }
  double bp = 1.0;
  if (hyp_len < ref_len && hyp_len > 0)
    bp = std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
  return bp * std::exp(log_sum);
}

double rouge_l(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs) {
  require_aligned(hyps, refs);
  const double beta = 1.2;
  double sum = 0.0;
  for (size_t i = 0; i < hyps.size(); ++i) {
    const double lcs = static_cast<double>(lcs_length(hyps[i], refs[i]));
    if (lcs == 0.0 || hyps[i].empty() || refs[i].empty()) continue;
    const double p = lcs / static_cast<double>(hyps[i].size());
    const double r = lcs / static_cast<double>(refs[i].size());
    sum += (1.0 + beta * beta) * r * p / (r + beta * beta * p);
  }
  return sum / static_cast<double>(hyps.size());
}

double cider(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs) {
  require_aligned(hyps, refs);
  const double log_n_refs = std::log(static_cast<double>(refs.size()));
  double corpus_sum = 0.0;
  for (size_t n = 1; n <= 4; ++n) {
    // document frequency over the reference corpus
    NgramCounts df;
    for (const auto& r : refs)
      for (const auto& [gram, cnt] : ngram_counts(r, n)) df[gram]++;
    auto idf = [&](const std::vector<std::string>& gram) {
      auto it = df.find(gram);
      const double d = it == df.end() ? 1.0 : static_cast<double>(it->second);
      return log_n_refs - std::log(std::max(1.0, d));
    };
    for (size_t i = 0; i < hyps.size(); ++i) {
      auto hc = ngram_counts(hyps[i], n);
      auto rc = ngram_counts(refs[i], n);
      double dot = 0.0, nh = 0.0, nr = 0.0;
      for (const auto& [gram, cnt] : hc) {
        const double w = static_cast<double>(cnt) * idf(gram);
        nh += w * w;
        auto it = rc.find(gram);
        if (it != rc.end()) dot += w * static_cast<double>(it->second) * idf(gram);
      }
      for (const auto& [gram, cnt] : rc) {
        const double w = static_cast<double>(cnt) * idf(gram);
        nr += w * w;
      }
      if (nh > 0.0 && nr > 0.0)
        corpus_sum += dot / (std::sqrt(nh) * std::sqrt(nr));
    }
  }
  return 10.0 * corpus_sum / (4.0 * static_cast<double>(hyps.size()));
}

int64_t levenshtein(const TokenSeq& a, const TokenSeq& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double levenshtein_mean(std::span<const TokenSeq> hyps,
                        std::span<const TokenSeq> refs) {
  require_aligned(hyps, refs);
  double sum = 0.0;
  for (size_t i = 0; i < hyps.size(); ++i)
    sum += static_cast<double>(levenshtein(hyps[i], refs[i]));
  return sum / static_cast<double>(hyps.size());
}

EmbeddingTable EmbeddingTable::from_model(const Model& model) {
  EmbeddingTable t;
  Tensor emb = model.param("embedding");
  t.dim_ = emb.dim(1);
  t.storage_.assign(emb.data().begin(), emb.data().end());
  const auto& tokens = model.vocab().tokens();
  for (size_t i = 0; i < tokens.size(); ++i)
    t.offsets_[tokens[i]] = i * static_cast<size_t>(t.dim_);
  t.unk_offset_ = static_cast<size_t>(Vocab::kUnk) * static_cast<size_t>(t.dim_);
  return t;
}

EmbeddingTable EmbeddingTable::from_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read word-vector file: " + path);
  EmbeddingTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.empty()) throw UsageError("word-vector file: no values for " + tok);
    if (t.dim_ == 0) t.dim_ = static_cast<int64_t>(v.size());
    if (static_cast<int64_t>(v.size()) != t.dim_)
      throw UsageError("word-vector file: inconsistent dimension at " + tok);
    t.offsets_[tok] = t.storage_.size();
    t.storage_.insert(t.storage_.end(), v.begin(), v.end());
  }
  if (t.offsets_.empty()) throw UsageError("word-vector file: empty: " + path);
  auto it = t.offsets_.find("unk");
  if (it != t.offsets_.end()) {
    t.unk_offset_ = it->second;
  } else {
    // fallback: the zero vector
    t.unk_offset_ = t.storage_.size();
    t.storage_.insert(t.storage_.end(), static_cast<size_t>(t.dim_), 0.0);
    t.offsets_["unk"] = t.unk_offset_;
  }
  return t;
}

std::span<const double> EmbeddingTable::vector(const std::string& token) const {
  auto it = offsets_.find(token);
  const size_t off = it == offsets_.end() ? unk_offset_ : it->second;
  return std::span(storage_).subspan(off, static_cast<size_t>(dim_));
}

EmbeddingMetrics embedding_metrics(std::span<const TokenSeq> hyps,
                                   std::span<const TokenSeq> refs,
                                   const EmbeddingTable& table) {
  require_aligned(hyps, refs);
  const int64_t d = table.dim();

  auto mean_vec = [&](const TokenSeq& toks) {
    std::vector<double> m(static_cast<size_t>(d), 0.0);
    for (const auto& t : toks) {
      auto v = table.vector(t);
      for (int64_t j = 0; j < d; ++j) m[static_cast<size_t>(j)] += v[static_cast<size_t>(j)];
    }
    double norm = 0.0;
    for (double& x : m) {
      x /= static_cast<double>(toks.size());
      norm += x * x;
    }
    if (norm == 0.0)
      throw std::runtime_error("embedding metrics: zero-norm mean vector");
    return m;
  };
  auto extrema_vec = [&](const TokenSeq& toks) {
    std::vector<double> e(static_cast<size_t>(d), 0.0);
    for (const auto& t : toks) {
      auto v = table.vector(t);
      for (int64_t j = 0; j < d; ++j)
        if (std::abs(v[static_cast<size_t>(j)]) > std::abs(e[static_cast<size_t>(j)]))
          e[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
    }
    return e;
  };
  auto greedy_dir = [&](const TokenSeq& from, const TokenSeq& to) {
    double sum = 0.0;
    for (const auto& ft : from) {
      double best = -1.0;
      for (const auto& tt : to)
        best = std::max(best, cosine(table.vector(ft), table.vector(tt)));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };

  EmbeddingMetrics out;
  for (size_t i = 0; i < hyps.size(); ++i) {
    if (hyps[i].empty() || refs[i].empty())
      throw std::runtime_error("embedding metrics: empty sentence");
    out.average += cosine(mean_vec(hyps[i]), mean_vec(refs[i]));
    out.extrema += cosine(extrema_vec(hyps[i]), extrema_vec(refs[i]));
    out.greedy +=
        0.5 * (greedy_dir(hyps[i], refs[i]) + greedy_dir(refs[i], hyps[i]));
  }
  const double n = static_cast<double>(hyps.size());
  out.average /= n;
  out.extrema /= n;
  out.greedy /= n;
  return out;
}

RuleToyClassifier::RuleToyClassifier(ToySpec spec, StyleAttr attr)
    : spec_(std::move(spec)), attr_(attr) {}

std::optional<int> RuleToyClassifier::bit_of(
    const TokenSeq& tokens, const std::vector<std::string>& zero,
    const std::vector<std::string>& one) const {
  int c0 = 0, c1 = 0;
  for (const auto& t : tokens) {
    c0 += std::count(zero.begin(), zero.end(), t) > 0;
    c1 += std::count(one.begin(), one.end(), t) > 0;
  }
  if (c0 == c1) return std::nullopt;  // no evidence or a tie
  return c1 > c0 ? 1 : 0;
}

std::optional<int> RuleToyClassifier::classify(const TokenSeq& tokens) const {
  switch (attr_) {
    case StyleAttr::kIdentity:
      return bit_of(tokens, spec_.male, spec_.female);
    case StyleAttr::kSubject:
      return bit_of(tokens, spec_.food, spec_.others);
    case StyleAttr::kDecision:
      return bit_of(tokens, spec_.positive, spec_.negative);
    case StyleAttr::kLabel: {
      auto i = bit_of(tokens, spec_.male, spec_.female);
      auto s = bit_of(tokens, spec_.food, spec_.others);
      auto d = bit_of(tokens, spec_.positive, spec_.negative);
      if (!i || !s || !d) return std::nullopt;
      return *i * 4 + *s * 2 + *d;
    }
  }
  return std::nullopt;
}

LinearStyleClassifier::LinearStyleClassifier(const EmbeddingTable* table,
                                             int n_classes, Rng& rng)
    : table_(table), n_classes_(n_classes) {
  const int64_t d = table->dim();
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> wv(static_cast<size_t>(d * n_classes));
  for (double& x : wv) x = rng.uniform(-bound, bound);
  w_ = Tensor::from({d, n_classes}, std::move(wv), true);
  b_ = Tensor::from({n_classes}, std::vector<double>(static_cast<size_t>(n_classes), 0.0), true);
}

std::vector<double> LinearStyleClassifier::features(const TokenSeq& tokens) const {
  const int64_t d = table_->dim();
  std::vector<double> m(static_cast<size_t>(d), 0.0);
  if (tokens.empty()) return m;
  for (const auto& t : tokens) {
    auto v = table_->vector(t);
    for (int64_t j = 0; j < d; ++j) m[static_cast<size_t>(j)] += v[static_cast<size_t>(j)];
  }
  for (double& x : m) x /= static_cast<double>(tokens.size());
  return m;
}

std::optional<int> LinearStyleClassifier::classify(const TokenSeq& tokens) const {
  if (tokens.empty()) return std::nullopt;
  auto f = features(tokens);
  const int64_t d = table_->dim();
  int best = 0;
  double best_v = 0.0;
  for (int c = 0; c < n_classes_; ++c) {
    double s = b_.at(c);
    for (int64_t j = 0; j < d; ++j)
      s += f[static_cast<size_t>(j)] * w_.at(j, c);
    if (c == 0 || s > best_v) {
      best_v = s;
      best = c;
    }
  }
  return best;
}

std::unique_ptr<LinearStyleClassifier> train_style_classifier(
    const Corpus& train, const Corpus* dev, const EmbeddingTable& table,
    Rng& rng, ClassifierReport* report) {
  if (!train.labeled()) throw UsageError("classifier: corpus has no labels");
  int n_classes = 0;
  for (const auto& s : train.sentences) n_classes = std::max(n_classes, s.label + 1);
  {
    std::set<int> distinct;
    for (const auto& s : train.sentences) distinct.insert(s.label);
    if (distinct.size() < 2)
      throw UsageError("classifier: need at least two classes");
  }

  auto clf = std::make_unique<LinearStyleClassifier>(&table, n_classes, rng);

  const int64_t n = static_cast<int64_t>(train.size());
  const int64_t d = table.dim();
  std::vector<double> feats(static_cast<size_t>(n * d));
  std::vector<int32_t> targets(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    auto f = clf->features(train.sentences[static_cast<size_t>(i)].tokens);
    std::copy(f.begin(), f.end(), feats.begin() + i * d);
    targets[static_cast<size_t>(i)] =
        static_cast<int32_t>(train.sentences[static_cast<size_t>(i)].label);
  }
  Tensor x = Tensor::from({n, d}, std::move(feats));

  Adam opt({clf->weights(), clf->bias()}, 0.05, 0.9, 0.999);
  double best_dev = -1.0;
  int steps = 0;
  int stale = 0;
  for (int step = 0; step < 4000; ++step) {
    opt.zero_grad();
    Graph g;
    Tensor logits = g.add(g.matmul(x, clf->weights()), clf->bias());
    Tensor loss = g.softmax_cross_entropy(logits, targets);
    g.backward(loss);
    opt.step();
    ++steps;
    if (dev && step % 25 == 24) {
      double acc = classifier_accuracy(*clf, *dev);
      if (acc == 1.0) break;
      if (acc > best_dev + 1e-12) {
        best_dev = acc;
        stale = 0;
      } else if (++stale >= 40) {
        break;
      }
    }
  }
  if (report) {
    report->steps = steps;
    report->dev_accuracy = dev ? classifier_accuracy(*clf, *dev) : 0.0;
  }
  return clf;
}

double classifier_accuracy(const StyleClassifier& clf, const Corpus& corpus) {
  if (corpus.sentences.empty()) return 0.0;
  int64_t hits = 0;
  for (const auto& s : corpus.sentences) {
    auto pred = clf.classify(s.tokens);
    hits += pred && *pred == s.label;
  }
  return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

TstResult tst_accuracy(std::span<const TransferEntry> entries,
                       const StyleClassifier& clf) {
  TstResult out;
  for (const auto& e : entries) {
    auto pred = clf.classify(split_tokens(e.converted_sentence));
    const bool hit = pred && *pred == e.target_label;
    auto& dir = out.per_direction[{e.source_label, e.target_label}];
    dir.first += hit;
    dir.second += 1;
    out.hits += hit;
    out.total += 1;
  }
  out.accuracy = out.total == 0
                     ? 0.0
                     : static_cast<double>(out.hits) / static_cast<double>(out.total);
  return out;
}

MetricsReport evaluate_pairs(std::span<const TokenSeq> hyps,
                             std::span<const TokenSeq> refs,
                             const EmbeddingTable* table) {
  MetricsReport r;
  r.bleu2 = bleu2(hyps, refs);
  r.rouge_l = rouge_l(hyps, refs);
  r.cider = cider(hyps, refs);
  r.levenshtein_mean = levenshtein_mean(hyps, refs);
  if (table) {
    EmbeddingMetrics em = embedding_metrics(hyps, refs, *table);
    r.embedding_average = em.average;
    r.vector_extrema = em.extrema;
    r.greedy_matching = em.greedy;
  }
  return r;
}

std::string metrics_report_to_json(const MetricsReport& report) {
  nlohmann::json j = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("tst_accuracy", report.tst_accuracy);
  put("bleu2", report.bleu2);
  put("rouge_l", report.rouge_l);
  put("cider", report.cider);
  put("levenshtein_mean", report.levenshtein_mean);
  put("embedding_average", report.embedding_average);
  put("vector_extrema", report.vector_extrema);
  put("greedy_matching", report.greedy_matching);
  if (!report.per_direction.empty()) j["per_direction"] = report.per_direction;
  if (!report.config_echo.empty()) j["config"] = report.config_echo;
  return j.dump(2);
}

}  // namespace epaae
