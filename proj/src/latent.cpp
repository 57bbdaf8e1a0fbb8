#include "epaae/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epaae {

namespace {

double l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

LatentIndex build_index(const Corpus& corpus, Model& model) {
  if (corpus.sentences.empty()) throw UsageError("index: empty corpus");
  LatentIndex index;
  index.rows = static_cast<int64_t>(corpus.size());
  index.dim = model.config().latent_dim;
  index.z.reserve(static_cast<size_t>(index.rows * index.dim));

  auto batches = make_ordered_batches(corpus, model.vocab(), 128);
  for (const Batch& b : batches) {
    Graph g(false);
    auto rows = Model::content_rows(corpus, model.vocab(), b.corpus_index);
    Tensor mu = model.encode_rows(g, rows).mu;
    index.z.insert(index.z.end(), mu.data().begin(), mu.data().end());
  }
  for (const auto& s : corpus.sentences) {
    index.labels.push_back(s.label);
    std::string text;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) text += ' ';
      text += s.tokens[i];
    }
    index.sentences.push_back(std::move(text));
  }
  return index;
}

std::vector<Neighbour> knn(const LatentIndex& index,
                           std::span<const double> query, int k) {
  if (static_cast<int64_t>(query.size()) != index.dim)
    throw UsageError("knn: query dimension mismatch");
  if (k < 1 || k > index.rows)
    throw UsageError("knn: k must be in [1, index size]");
  std::vector<Neighbour> all(static_cast<size_t>(index.rows));
  for (int64_t r = 0; r < index.rows; ++r)
    all[static_cast<size_t>(r)] = {r, l2(index.row(r), query)};
  std::sort(all.begin(), all.end(), [](const Neighbour& a, const Neighbour& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.row < b.row;
  });
  all.resize(static_cast<size_t>(k));
  return all;
}

FlipMetrics label_flip_metrics(const LatentIndex& index, StyleAttr attr) {
  if (index.rows < 2) throw UsageError("flip metrics: need at least two rows");
  std::vector<int> styles(static_cast<size_t>(index.rows));
  for (int64_t r = 0; r < index.rows; ++r) {
    if (index.labels[static_cast<size_t>(r)] < 0)
      throw UsageError("flip metrics: corpus has no labels");
    styles[static_cast<size_t>(r)] =
        style_value(index.labels[static_cast<size_t>(r)], attr);
  }

  FlipMetrics out;
  double sum_l2 = 0.0, sum_hops = 0.0;
  std::vector<Neighbour> others;
  others.reserve(static_cast<size_t>(index.rows));
  for (int64_t r = 0; r < index.rows; ++r) {
    const int my_style = styles[static_cast<size_t>(r)];
    bool flippable = false;
    for (int64_t o = 0; o < index.rows; ++o)
      if (styles[static_cast<size_t>(o)] != my_style) {
        flippable = true;
        break;
      }
    if (!flippable) continue;  // this row's style class is the only one

    others.clear();
    for (int64_t o = 0; o < index.rows; ++o) {
      if (o == r) continue;
      others.push_back({o, l2(index.row(o), index.row(r))});
    }
    std::sort(others.begin(), others.end(),
              [](const Neighbour& a, const Neighbour& b) {
                if (a.distance != b.distance) return a.distance < b.distance;
                return a.row < b.row;
              });
    for (size_t rank = 0; rank < others.size(); ++rank) {
      if (styles[static_cast<size_t>(others[rank].row)] != my_style) {
        sum_l2 += others[rank].distance;
        sum_hops += static_cast<double>(rank + 1);
        ++out.counted_rows;
        break;
      }
    }
  }
  if (out.counted_rows == 0)
    throw UsageError("flip metrics: a single style covers the whole index");
  out.mean_l2 = sum_l2 / static_cast<double>(out.counted_rows);
  out.mean_hops = sum_hops / static_cast<double>(out.counted_rows);
  return out;
}

PcaResult pca_project(const LatentIndex& index, int dims, uint64_t seed) {
  if (index.rows <= dims)
    throw UsageError("pca: need more rows than requested dimensions");
  const int64_t n = index.rows, d = index.dim;

  std::vector<double> centered(index.z);
  std::vector<double> mean(static_cast<size_t>(d), 0.0);
  for (int64_t r = 0; r < n; ++r)
    for (int64_t j = 0; j < d; ++j)
      mean[static_cast<size_t>(j)] += centered[static_cast<size_t>(r * d + j)];
  for (double& m : mean) m /= static_cast<double>(n);
  for (int64_t r = 0; r < n; ++r)
    for (int64_t j = 0; j < d; ++j)
      centered[static_cast<size_t>(r * d + j)] -= mean[static_cast<size_t>(j)];

  // covariance (times n-1), deflated in place after each component
  std::vector<double> cov(static_cast<size_t>(d * d), 0.0);
  for (int64_t r = 0; r < n; ++r)
    for (int64_t i = 0; i < d; ++i)
      for (int64_t j = 0; j < d; ++j)
        cov[static_cast<size_t>(i * d + j)] +=
            centered[static_cast<size_t>(r * d + i)] *
            centered[static_cast<size_t>(r * d + j)];

  double total_var = 0.0;
  for (int64_t i = 0; i < d; ++i) total_var += cov[static_cast<size_t>(i * d + i)];

  PcaResult out;
  out.coords.assign(static_cast<size_t>(n * dims), 0.0);
  Rng rng(seed);
  std::vector<std::vector<double>> axes;
  for (int comp = 0; comp < dims; ++comp) {
    std::vector<double> v(static_cast<size_t>(d));
    for (double& x : v) x = rng.normal();
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;

    double eig = 0.0;
    std::vector<double> w(static_cast<size_t>(d));
    for (int iter = 0; iter < 1000; ++iter) {
      for (int64_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (int64_t j = 0; j < d; ++j)
          s += cov[static_cast<size_t>(i * d + j)] * v[static_cast<size_t>(j)];
        w[static_cast<size_t>(i)] = s;
      }
      double wn = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
      if (wn <= total_var * 1e-14) {
        eig = 0.0;
        break;  // remaining spectrum is numerically zero
      }
      double dot = 0.0;
      for (int64_t i = 0; i < d; ++i)
        dot += v[static_cast<size_t>(i)] * w[static_cast<size_t>(i)] / wn;
      for (int64_t i = 0; i < d; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / wn;
      eig = wn;
      if (std::abs(std::abs(dot) - 1.0) < 1e-13) break;
    }
    if (eig <= total_var * 1e-12) break;  // rank exhausted

    out.eigenvalues.push_back(eig);
    axes.push_back(v);
    ++out.components_found;
    for (int64_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (int64_t j = 0; j < d; ++j)
        s += centered[static_cast<size_t>(r * d + j)] * v[static_cast<size_t>(j)];
      out.coords[static_cast<size_t>(r * dims + comp)] = s;
    }
    for (int64_t i = 0; i < d; ++i)
      for (int64_t j = 0; j < d; ++j)
        cov[static_cast<size_t>(i * d + j)] -=
            eig * v[static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
  }
  return out;
}

void export_index_csv(const LatentIndex& index, std::ostream& out) {
  out << "sentence,label";
  for (int64_t j = 0; j < index.dim; ++j) out << ",z_" << j;
  out << '\n';
  for (int64_t r = 0; r < index.rows; ++r) {
    out << '"' << index.sentences[static_cast<size_t>(r)] << '"' << ','
        << index.labels[static_cast<size_t>(r)];
    auto row = index.row(r);
    for (double v : row) out << ',' << v;
    out << '\n';
  }
}

void export_pca_csv(const LatentIndex& index, const PcaResult& pca,
                    std::ostream& out) {
  out << "x,y,label\n";
  const int dims = static_cast<int>(pca.coords.size() / static_cast<size_t>(index.rows));
  for (int64_t r = 0; r < index.rows; ++r) {
    double x = pca.coords[static_cast<size_t>(r * dims)];
    double y = dims > 1 ? pca.coords[static_cast<size_t>(r * dims + 1)] : 0.0;
    out << x << ',' << y << ',' << index.labels[static_cast<size_t>(r)] << '\n';
  }
}

}  // namespace epaae
