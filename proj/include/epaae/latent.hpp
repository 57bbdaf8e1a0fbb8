#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "epaae/model.hpp"
#include "epaae/toy.hpp"

namespace epaae {

// Row-aligned store of encoded sentences: vectors, style labels and the
// source text. Immutable once built; queries are exhaustive scans.
struct LatentIndex {
  int64_t rows = 0;
  int64_t dim = 0;
  std::vector<double> z;          // row-major rows x dim
  std::vector<int> labels;        // -1 when unlabeled
  std::vector<std::string> sentences;

  std::span<const double> row(int64_t r) const {
    return std::span(z).subspan(static_cast<size_t>(r * dim),
                                static_cast<size_t>(dim));
  }
};

// Deterministic order-preserving encoding of the whole corpus, noise off.
LatentIndex build_index(const Corpus& corpus, Model& model);

struct Neighbour {
  int64_t row;
  double distance;
};

// Exhaustive scan, ascending L2, ties broken by row id. A query equal to a
// stored vector reports that row first at distance zero.
std::vector<Neighbour> knn(const LatentIndex& index,
                           std::span<const double> query, int k);

struct FlipMetrics {
  double mean_l2 = 0.0;    // distance to the first different-style neighbour
  double mean_hops = 0.0;  // its 1-based rank, self excluded
  int64_t counted_rows = 0;
};

// For every row, walk its full ascending neighbour list (self excluded) and
// record the first neighbour whose style differs. Rows whose style class is
// alone in the index are skipped; an index with a single style errors.
FlipMetrics label_flip_metrics(const LatentIndex& index, StyleAttr attr);

struct PcaResult {
  std::vector<double> coords;  // rows x dims, zero-filled beyond found axes
  int components_found = 0;
  std::vector<double> eigenvalues;
};

// Mean-centered power iteration with deflation.
PcaResult pca_project(const LatentIndex& index, int dims = 2, uint64_t seed = 0);

// CSV exports: `sentence,label,z_0..z_{d-1}` and `x,y,label`.
void export_index_csv(const LatentIndex& index, std::ostream& out);
void export_pca_csv(const LatentIndex& index, const PcaResult& pca,
                    std::ostream& out);

}  // namespace epaae
