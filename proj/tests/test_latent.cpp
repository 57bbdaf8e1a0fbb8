#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epaae/latent.hpp"
#include "epaae/toy.hpp"

using namespace epaae;

namespace {

LatentIndex hand_index(int64_t dim, const std::vector<std::vector<double>>& rows,
                       const std::vector<int>& labels) {
  LatentIndex idx;
  idx.dim = dim;
  idx.rows = static_cast<int64_t>(rows.size());
  for (const auto& r : rows) idx.z.insert(idx.z.end(), r.begin(), r.end());
  idx.labels = labels;
  idx.sentences.resize(rows.size(), "s");
  return idx;
}

// Independent oracle: plain exhaustive scan with its own sort.
std::vector<std::pair<double, int64_t>> brute_knn(
    const LatentIndex& idx, std::span<const double> q, int k) {
  std::vector<std::pair<double, int64_t>> d;
  for (int64_t r = 0; r < idx.rows; ++r) {
    double s = 0.0;
    for (int64_t j = 0; j < idx.dim; ++j) {
      double diff = idx.z[static_cast<size_t>(r * idx.dim + j)] - q[static_cast<size_t>(j)];
      s += diff * diff;
    }
    d.emplace_back(std::sqrt(s), r);
  }
  std::sort(d.begin(), d.end());
  d.resize(static_cast<size_t>(k));
  return d;
}

// Cyclic Jacobi eigendecomposition for small symmetric matrices; the exact
// oracle the power-iteration path is checked against.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[static_cast<size_t>(i * n + j)] * a[static_cast<size_t>(i * n + j)];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = a[static_cast<size_t>(p * n + q)];
        if (std::abs(apq) < 1e-30) continue;
        double app = a[static_cast<size_t>(p * n + p)];
        double aqq = a[static_cast<size_t>(q * n + q)];
        double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        double c = std::cos(theta), s = std::sin(theta);
        for (int i = 0; i < n; ++i) {
          double aip = a[static_cast<size_t>(i * n + p)];
          double aiq = a[static_cast<size_t>(i * n + q)];
          a[static_cast<size_t>(i * n + p)] = c * aip - s * aiq;
          a[static_cast<size_t>(i * n + q)] = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          double api = a[static_cast<size_t>(p * n + i)];
          double aqi = a[static_cast<size_t>(q * n + i)];
          a[static_cast<size_t>(p * n + i)] = c * api - s * aqi;
          a[static_cast<size_t>(q * n + i)] = s * api + c * aqi;
        }
      }
  }
  std::vector<double> eig(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = a[static_cast<size_t>(i * n + i)];
  std::sort(eig.rbegin(), eig.rend());
  return eig;
}

}  // namespace

TEST_SUITE("latent") {

TEST_CASE("knn reports a stored query first at distance zero") {
  LatentIndex idx = hand_index(2, {{0, 0}, {1, 0}, {0, 2}, {3, 3}}, {0, 0, 1, 1});
  auto hits = knn(idx, idx.row(2), 3);
  CHECK(hits[0].row == 2);
  CHECK(hits[0].distance == 0.0);
  CHECK(hits[1].distance <= hits[2].distance);
}

TEST_CASE("knn matches the brute-force oracle on hand-placed points") {
  LatentIndex idx = hand_index(
      2, {{0.0, 0.0}, {1.0, 1.0}, {-2.0, 0.5}, {0.3, -0.7}, {2.5, 2.5}},
      {0, 1, 0, 1, 0});
  std::vector<double> q{0.2, 0.1};
  auto mine = knn(idx, q, 5);
  auto oracle = brute_knn(idx, q, 5);
  for (size_t i = 0; i < 5; ++i) {
    CHECK(mine[i].row == oracle[i].second);
    CHECK(mine[i].distance == doctest::Approx(oracle[i].first).epsilon(1e-12));
  }
}

TEST_CASE("knn distances ascend and ties break by row id") {
  LatentIndex idx = hand_index(1, {{5.0}, {1.0}, {3.0}, {1.0}}, {0, 0, 0, 0});
  auto hits = knn(idx, std::vector<double>{1.0}, 4);
  CHECK(hits[0].row == 1);  // tie at distance 0 between rows 1 and 3
  CHECK(hits[1].row == 3);
  for (size_t i = 1; i < hits.size(); ++i)
    CHECK(hits[i].distance >= hits[i - 1].distance);
}

TEST_CASE("knn is invariant to index row permutation") {
  std::vector<std::vector<double>> rows{{0.1, 2}, {1, 1}, {2, 0.3}, {3, 3}};
  LatentIndex a = hand_index(2, rows, {0, 1, 2, 3});
  std::vector<std::vector<double>> shuffled{rows[2], rows[0], rows[3], rows[1]};
  LatentIndex b = hand_index(2, shuffled, {2, 0, 3, 1});
  std::vector<double> q{0.5, 0.5};
  auto ha = knn(a, q, 4);
  auto hb = knn(b, q, 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(ha[i].distance == doctest::Approx(hb[i].distance));
    // identify points by their stored label
    CHECK(a.labels[static_cast<size_t>(ha[i].row)] ==
          b.labels[static_cast<size_t>(hb[i].row)]);
  }
  CHECK_THROWS_AS(knn(a, q, 0), UsageError);
  CHECK_THROWS_AS(knn(a, q, 5), UsageError);
}

TEST_CASE("flip metrics follow the first differing neighbour") {
  // query row 0; neighbours at distances 2, 3, 5 with styles same/same/diff
  LatentIndex idx =
      hand_index(1, {{0.0}, {2.0}, {-3.0}, {5.0}}, {0, 0, 0, 1});
  FlipMetrics fm = label_flip_metrics(idx, StyleAttr::kLabel);
  // rows contribute: row0 -> (5,3); row1 -> (3,2); row2 -> (8,3); row3 -> (3,1)
  CHECK(fm.counted_rows == 4);
  CHECK(fm.mean_l2 == doctest::Approx((5.0 + 3.0 + 8.0 + 3.0) / 4.0));
  CHECK(fm.mean_hops == doctest::Approx((3.0 + 2.0 + 3.0 + 1.0) / 4.0));
}

TEST_CASE("two opposite-label points give mean hops one") {
  LatentIndex idx = hand_index(2, {{0, 0}, {1, 1}}, {0, 1});
  FlipMetrics fm = label_flip_metrics(idx, StyleAttr::kLabel);
  CHECK(fm.mean_hops == 1.0);
  CHECK(fm.mean_l2 == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("perfectly alternating labels give mean hops one") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(i % 2);
  }
  LatentIndex idx = hand_index(1, rows, labels);
  FlipMetrics fm = label_flip_metrics(idx, StyleAttr::kLabel);
  CHECK(fm.mean_hops == 1.0);
}

TEST_CASE("flip metrics exclusions and errors") {
  LatentIndex solo = hand_index(1, {{0.0}, {1.0}}, {3, 3});
  CHECK_THROWS_AS(label_flip_metrics(solo, StyleAttr::kLabel), UsageError);

  // decision attr: labels 4 and 5 differ only in the decision bit
  LatentIndex idx = hand_index(1, {{0.0}, {1.0}, {9.0}}, {4, 5, 4});
  FlipMetrics fm = label_flip_metrics(idx, StyleAttr::kDecision);
  CHECK(fm.counted_rows == 3);
  // identity bit is 1 for labels 4 and 5 alike -> no flips possible
  CHECK_THROWS_AS(label_flip_metrics(idx, StyleAttr::kIdentity), UsageError);
}

TEST_CASE("pca recovers a plane embedded in higher dimensions") {
  Rng rng(31);
  const int64_t n = 60, d = 16;
  // random orthogonal-ish 2-D basis in 16-D
  std::vector<double> b1(d), b2(d);
  for (auto& v : b1) v = rng.normal();
  for (auto& v : b2) v = rng.normal();
  double n1 = std::sqrt(std::inner_product(b1.begin(), b1.end(), b1.begin(), 0.0));
  for (auto& v : b1) v /= n1;
  double dot = std::inner_product(b1.begin(), b1.end(), b2.begin(), 0.0);
  for (int64_t i = 0; i < d; ++i) b2[static_cast<size_t>(i)] -= dot * b1[static_cast<size_t>(i)];
  double n2 = std::sqrt(std::inner_product(b2.begin(), b2.end(), b2.begin(), 0.0));
  for (auto& v : b2) v /= n2;

  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> plane;
  for (int64_t r = 0; r < n; ++r) {
    double u = rng.normal() * 3.0, w = rng.normal();
    plane.emplace_back(u, w);
    std::vector<double> x(d);
    for (int64_t j = 0; j < d; ++j)
      x[static_cast<size_t>(j)] = u * b1[static_cast<size_t>(j)] + w * b2[static_cast<size_t>(j)];
    rows.push_back(std::move(x));
  }
  LatentIndex idx = hand_index(d, rows, std::vector<int>(static_cast<size_t>(n), 0));
  PcaResult pca = pca_project(idx, 2, 7);
  REQUIRE(pca.components_found == 2);
  CHECK(pca.coords.size() == static_cast<size_t>(n * 2));

  // pairwise distances survive the projection (the set is 2-D already)
  for (int64_t a = 0; a < 10; ++a)
    for (int64_t b = a + 1; b < 10; ++b) {
      double du = plane[static_cast<size_t>(a)].first - plane[static_cast<size_t>(b)].first;
      double dw = plane[static_cast<size_t>(a)].second - plane[static_cast<size_t>(b)].second;
      double orig = std::sqrt(du * du + dw * dw);
      double px = pca.coords[static_cast<size_t>(a * 2)] - pca.coords[static_cast<size_t>(b * 2)];
      double py = pca.coords[static_cast<size_t>(a * 2 + 1)] - pca.coords[static_cast<size_t>(b * 2 + 1)];
      double proj = std::sqrt(px * px + py * py);
      CHECK(proj == doctest::Approx(orig).epsilon(1e-6));
    }
}

TEST_CASE("pca eigenvalues match a jacobi oracle on a 5-d case") {
  Rng rng(32);
  const int64_t n = 40, d = 5;
  std::vector<std::vector<double>> rows;
  for (int64_t r = 0; r < n; ++r) {
    std::vector<double> x(d);
    for (auto& v : x) v = rng.normal();
    x[1] *= 3.0;  // stretch one axis
    x[3] *= 0.2;
    rows.push_back(std::move(x));
  }
  LatentIndex idx = hand_index(d, rows, std::vector<int>(static_cast<size_t>(n), 0));

  // oracle: centered covariance, full jacobi spectrum
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows)
    for (int64_t j = 0; j < d; ++j) mean[static_cast<size_t>(j)] += r[static_cast<size_t>(j)];
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<double> cov(static_cast<size_t>(d * d), 0.0);
  for (const auto& r : rows)
    for (int64_t i = 0; i < d; ++i)
      for (int64_t j = 0; j < d; ++j)
        cov[static_cast<size_t>(i * d + j)] +=
            (r[static_cast<size_t>(i)] - mean[static_cast<size_t>(i)]) *
            (r[static_cast<size_t>(j)] - mean[static_cast<size_t>(j)]);
  auto oracle = jacobi_eigenvalues(cov, static_cast<int>(d));

  PcaResult pca = pca_project(idx, 2, 3);
  REQUIRE(pca.components_found == 2);
  CHECK(pca.eigenvalues[0] == doctest::Approx(oracle[0]).epsilon(1e-9));
  CHECK(pca.eigenvalues[1] == doctest::Approx(oracle[1]).epsilon(1e-9));
}

TEST_CASE("pca is deterministic given a seed and handles rank deficiency") {
  LatentIndex idx = hand_index(
      3, {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}}, {0, 0, 0, 0});
  PcaResult a = pca_project(idx, 2, 11);
  PcaResult b = pca_project(idx, 2, 11);
  CHECK(a.coords == b.coords);
  CHECK(a.components_found == 1);  // the data is a line
  for (int64_t r = 0; r < 4; ++r)
    CHECK(a.coords[static_cast<size_t>(r * 2 + 1)] == 0.0);
  CHECK_THROWS_AS(pca_project(idx, 4, 1), UsageError);
}

TEST_CASE("csv exports") {
  LatentIndex idx = hand_index(2, {{1.5, -2.0}, {0.0, 3.0}}, {0, 1});
  idx.sentences = {"alpha beta", "gamma"};
  std::ostringstream os;
  export_index_csv(idx, os);
  CHECK(os.str() ==
        "sentence,label,z_0,z_1\n\"alpha beta\",0,1.5,-2\n\"gamma\",1,0,3\n");
  PcaResult pca;
  pca.coords = {1.0, 2.0, 3.0, 4.0};
  pca.components_found = 2;
  std::ostringstream os2;
  export_pca_csv(idx, pca, os2);
  CHECK(os2.str() == "x,y,label\n1,2,0\n3,4,1\n");
}

}  // TEST_SUITE
