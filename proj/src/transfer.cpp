#include "epaae/transfer.hpp"

#include <fstream>
#include <sstream>

namespace epaae {

StyleStats style_means(const LatentIndex& index, StyleAttr attr) {
  StyleStats stats;
  stats.dim = index.dim;
  for (int64_t r = 0; r < index.rows; ++r) {
    if (index.labels[static_cast<size_t>(r)] < 0)
      throw UsageError("style means: corpus has no labels");
    int style = style_value(index.labels[static_cast<size_t>(r)], attr);
    auto [it, fresh] = stats.means.try_emplace(
        style, std::vector<double>(static_cast<size_t>(index.dim), 0.0));
    auto row = index.row(r);
    for (int64_t j = 0; j < index.dim; ++j)
      it->second[static_cast<size_t>(j)] += row[static_cast<size_t>(j)];
    stats.counts[style]++;
  }
  for (auto& [style, mean] : stats.means) {
    const double inv = 1.0 / static_cast<double>(stats.counts[style]);
    for (double& v : mean) v *= inv;
  }
  return stats;
}

std::vector<double> transfer_vector(std::span<const double> z, int source_style,
                                    int target_style, double k,
                                    const StyleStats& stats) {
  auto src = stats.means.find(source_style);
  auto tgt = stats.means.find(target_style);
  if (src == stats.means.end())
    throw UsageError("transfer: unknown source style " + std::to_string(source_style));
  if (tgt == stats.means.end())
    throw UsageError("transfer: unknown target style " + std::to_string(target_style));
  if (static_cast<int64_t>(z.size()) != stats.dim)
    throw UsageError("transfer: latent dimension mismatch");
  std::vector<double> out(z.begin(), z.end());
  for (size_t j = 0; j < out.size(); ++j)
    out[j] += k * (tgt->second[j] - src->second[j]);
  return out;
}

std::vector<InterpolationPoint> interpolate(Model& model,
                                            std::span<const double> z_start,
                                            std::span<const double> direction,
                                            double step_size, int steps) {
  if (steps < 1) throw UsageError("interpolate: steps must be >= 1");
  if (direction.size() != z_start.size())
    throw UsageError("interpolate: direction dimension mismatch");
  double norm2 = 0.0;
  for (double v : direction) norm2 += v * v;
  if (norm2 == 0.0) throw UsageError("interpolate: zero direction vector");

  std::vector<InterpolationPoint> out;
  for (int j = 0; j <= steps; ++j) {
    InterpolationPoint p;
    p.z.assign(z_start.begin(), z_start.end());
    for (size_t i = 0; i < p.z.size(); ++i)
      p.z[i] += static_cast<double>(j) * step_size * direction[i];
    p.sentence = model.greedy_decode_string(p.z);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<TransferEntry> transfer_corpus(const Corpus& corpus, Model& model,
                                           StyleAttr attr, double k) {
  if (!corpus.labeled()) throw UsageError("transfer: corpus has no labels");
  LatentIndex index = build_index(corpus, model);
  StyleStats stats = style_means(index, attr);
  if (stats.means.size() < 2)
    throw UsageError("transfer: need at least two style values");

  std::vector<TransferEntry> out;
  for (int64_t r = 0; r < index.rows; ++r) {
    const int src = style_value(index.labels[static_cast<size_t>(r)], attr);
    for (const auto& [tgt, mean] : stats.means) {
      if (tgt == src) continue;
      TransferEntry e;
      e.source_label = src;
      e.target_label = tgt;
      e.k = k;
      e.source_sentence = index.sentences[static_cast<size_t>(r)];
      auto z = transfer_vector(index.row(r), src, tgt, k, stats);
      e.converted_sentence = model.greedy_decode_string(z);
      out.push_back(std::move(e));
    }
  }
  return out;
}

void write_transfer_tsv(std::span<const TransferEntry> entries, std::ostream& out) {
  out << "source_label\ttarget_label\tk\tsource_sentence\tconverted_sentence\n";
  for (const auto& e : entries)
    out << e.source_label << '\t' << e.target_label << '\t' << e.k << '\t'
        << e.source_sentence << '\t' << e.converted_sentence << '\n';
}

std::vector<TransferEntry> read_transfer_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read transfer file: " + path);
  std::vector<TransferEntry> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;  // header
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    TransferEntry e;
    std::string field;
    if (!std::getline(ss, field, '\t')) throw UsageError("transfer tsv: bad row");
    e.source_label = std::stoi(field);
    if (!std::getline(ss, field, '\t')) throw UsageError("transfer tsv: bad row");
    e.target_label = std::stoi(field);
    if (!std::getline(ss, field, '\t')) throw UsageError("transfer tsv: bad row");
    e.k = std::stod(field);
    if (!std::getline(ss, e.source_sentence, '\t'))
      throw UsageError("transfer tsv: bad row");
    std::getline(ss, e.converted_sentence, '\t');
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace epaae
