#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epaae/corpus.hpp"
#include "epaae/graph.hpp"
#include "epaae/rng.hpp"
#include "epaae/tensor.hpp"

namespace epaae {

enum class ScaleDist { kGaussian, kUniform };

ScaleDist parse_scale_dist(const std::string& name);
std::string scale_dist_name(ScaleDist d);

// Input-perturbation settings. zeta couples the noise hypersphere radius to
// each embedding's norm (sigma of the gaussian scale = zeta/3); drop_p is
// the per-token deletion probability.
struct NoiseSpec {
  double zeta = 0.0;
  double drop_p = 0.0;
  ScaleDist scale_dist = ScaleDist::kGaussian;
  uint64_t seed = 0;
  bool clamp_scale = false;  // optionally clamp |s| <= zeta; off by default

  void validate() const;
  bool active() const { return zeta > 0.0 || drop_p > 0.0; }
};

// Independently deletes each content token with probability drop_p.
// bos/eos/pad survive untouched; if every content token would go, one kept
// uniformly at random so the encoder never sees an empty sentence.
std::vector<int32_t> drop_tokens(std::span<const int32_t> tokens, double drop_p,
                                 Rng& rng);

// Scale factors s_i * zhat_i for a block of n vectors, one row per vector;
// rows where mask (if given) is zero stay zero.
std::vector<double> sample_noise_directions(int64_t n, int64_t dim,
                                            const NoiseSpec& spec, Rng& rng,
                                            std::span<const uint8_t> row_mask = {});

// e'_i = e_i + s_i * |e_i| * zhat_i over all rows of e at once. Gradients
// flow through the row norms, so the perturbed forward stays an exact
// function of the embedding values.
Tensor perturb_embeddings(Graph& g, const Tensor& e, const NoiseSpec& spec,
                          Rng& rng, std::span<const uint8_t> row_mask = {});

// Token deletion first, then embedding perturbation of the survivors.
// Training-time path for one sentence; inference disables it entirely.
Tensor apply_input_noise(Graph& g, std::span<const int32_t> tokens,
                         const Tensor& embedding_table, const NoiseSpec& spec,
                         Rng& rng);

// Diagnostic only: expected hypersphere radius zeta*|e_i| per row.
std::vector<double> expected_radii(const Tensor& e, double zeta);

}  // namespace epaae
