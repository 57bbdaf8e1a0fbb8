#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "epaae/latent.hpp"

namespace epaae {

// Per-style latent centroids backing the vector-arithmetic edit
// z' = z + k * (mean_target - mean_source).
struct StyleStats {
  int64_t dim = 0;
  std::map<int, std::vector<double>> means;
  std::map<int, int64_t> counts;
};

StyleStats style_means(const LatentIndex& index, StyleAttr attr);

std::vector<double> transfer_vector(std::span<const double> z, int source_style,
                                    int target_style, double k,
                                    const StyleStats& stats);

struct InterpolationPoint {
  std::vector<double> z;
  std::string sentence;
};

// point_j = z_start + j * step_size * direction, j = 0..steps, each greedily
// decoded; j = 0 is the plain reconstruction.
std::vector<InterpolationPoint> interpolate(Model& model,
                                            std::span<const double> z_start,
                                            std::span<const double> direction,
                                            double step_size, int steps);

struct TransferEntry {
  int source_label = 0;  // style value of the input
  int target_label = 0;  // style value aimed for
  double k = 0.0;
  std::string source_sentence;
  std::string converted_sentence;
};

// Every sentence converted to every other style value present. Stats are
// computed over the same corpus.
std::vector<TransferEntry> transfer_corpus(const Corpus& corpus, Model& model,
                                           StyleAttr attr, double k);

void write_transfer_tsv(std::span<const TransferEntry> entries, std::ostream& out);
std::vector<TransferEntry> read_transfer_tsv(const std::string& path);

}  // namespace epaae
