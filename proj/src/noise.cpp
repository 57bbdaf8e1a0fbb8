#include "epaae/noise.hpp"

#include <algorithm>
#include <cmath>

namespace epaae {

ScaleDist parse_scale_dist(const std::string& name) {
  if (name == "gaussian") return ScaleDist::kGaussian;
  if (name == "uniform") return ScaleDist::kUniform;
  throw UsageError("unknown scale_dist '" + name +
                   "' (expected gaussian|uniform)");
}

std::string scale_dist_name(ScaleDist d) {
  return d == ScaleDist::kGaussian ? "gaussian" : "uniform";
}

void NoiseSpec::validate() const {
  if (zeta < 0.0) throw UsageError("noise: zeta must be >= 0");
  if (drop_p < 0.0 || drop_p > 1.0)
    throw UsageError("noise: drop_p must be in [0,1]");
}

std::vector<int32_t> drop_tokens(std::span<const int32_t> tokens, double drop_p,
                                 Rng& rng) {
  if (tokens.empty()) throw std::runtime_error("drop_tokens: empty sequence");
  auto is_protected = [](int32_t id) {
    return id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos;
  };
  std::vector<int32_t> out;
  out.reserve(tokens.size());
  std::vector<size_t> content_positions;
  std::vector<bool> keep(tokens.size(), true);
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (is_protected(tokens[i])) continue;
    content_positions.push_back(i);
    if (rng.uniform() < drop_p) keep[i] = false;
  }
  bool any_content_kept = false;
  for (size_t i : content_positions) any_content_kept |= keep[i];
  if (!content_positions.empty() && !any_content_kept) {
    size_t survivor =
        content_positions[rng.below(content_positions.size())];
    keep[survivor] = true;
  }
  for (size_t i = 0; i < tokens.size(); ++i)
    if (keep[i]) out.push_back(tokens[i]);
  return out;
}

std::vector<double> sample_noise_directions(int64_t n, int64_t dim,
                                            const NoiseSpec& spec, Rng& rng,
                                            std::span<const uint8_t> row_mask) {
  spec.validate();
  std::vector<double> c(static_cast<size_t>(n * dim), 0.0);
  if (spec.zeta == 0.0) return c;
  const double sigma = spec.zeta / 3.0;
  std::vector<double> z(static_cast<size_t>(dim));
  for (int64_t i = 0; i < n; ++i) {
    if (!row_mask.empty() && !row_mask[static_cast<size_t>(i)]) continue;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& v : z) {
        v = rng.normal();
        norm2 += v * v;
      }
    } while (norm2 == 0.0);  // degenerate draw: resample
    const double inv_norm = 1.0 / std::sqrt(norm2);
    double s = spec.scale_dist == ScaleDist::kGaussian
                   ? rng.normal(0.0, sigma)
                   : rng.uniform(-spec.zeta, spec.zeta);
    if (spec.clamp_scale) s = std::clamp(s, -spec.zeta, spec.zeta);
    for (int64_t j = 0; j < dim; ++j)
      c[static_cast<size_t>(i * dim + j)] = s * z[static_cast<size_t>(j)] * inv_norm;
  }
  return c;
}

Tensor perturb_embeddings(Graph& g, const Tensor& e, const NoiseSpec& spec,
                          Rng& rng, std::span<const uint8_t> row_mask) {
  spec.validate();
  if (e.rank() != 2 || e.dim(1) < 1)
    throw std::runtime_error("perturb_embeddings: need (n, dim) block");
  if (spec.zeta == 0.0) return e;
  const int64_t n = e.dim(0), dim = e.dim(1);
  Tensor dirs = Tensor::from(
      {n, dim}, sample_noise_directions(n, dim, spec, rng, row_mask));
  Tensor row_norm = g.reshape(g.sqrt(g.sum_axis(g.mul(e, e), 1)), {n, 1});
  return g.add(e, g.mul(dirs, row_norm));
}

Tensor apply_input_noise(Graph& g, std::span<const int32_t> tokens,
                         const Tensor& embedding_table, const NoiseSpec& spec,
                         Rng& rng) {
  std::vector<int32_t> kept = drop_tokens(tokens, spec.drop_p, rng);
  Tensor e = g.gather_rows(embedding_table, kept);
  return perturb_embeddings(g, e, spec, rng);
}

std::vector<double> expected_radii(const Tensor& e, double zeta) {
  const int64_t n = e.dim(0), dim = e.dim(1);
  std::vector<double> out(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < dim; ++j) s += e.at(i, j) * e.at(i, j);
    out[static_cast<size_t>(i)] = zeta * std::sqrt(s);
  }
  return out;
}

}  // namespace epaae
