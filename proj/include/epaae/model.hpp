#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epaae/corpus.hpp"
#include "epaae/graph.hpp"
#include "epaae/noise.hpp"
#include "epaae/rng.hpp"
#include "epaae/tensor.hpp"

namespace epaae {

enum class ModelKind { kAae, kLaae, kBetaVae };

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind k);

struct ModelConfig {
  int64_t emb_dim = 300;
  int64_t hidden_dim = 256;
  int64_t latent_dim = 128;
  int64_t disc_hidden = 512;
  double lambda_adv = 10.0;
  double lr = 0.001;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  int epochs = 30;
  ModelKind model_kind = ModelKind::kAae;
  double beta = 0.15;     // beta-vae KL weight
  double lambda1 = 0.05;  // laae log-variance penalty weight
  NoiseSpec noise;
  int batch_size = 32;
  int max_len = 40;  // greedy decoding cap

  // Small dimensions for single-core experiments.
  static ModelConfig desk();
  void validate() const;

  bool has_discriminator() const { return model_kind != ModelKind::kBetaVae; }
  bool has_logvar_head() const { return model_kind != ModelKind::kAae; }
};

// Bi-GRU encoder to a latent code, GRU decoder conditioned on it, and a
// latent discriminator. One class covers the whole family; the training
// objective, not the architecture, changes with model_kind.
class Model {
 public:
  Model(ModelConfig config, Vocab vocab, Rng& init_rng);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }

  struct EncodeOut {
    Tensor mu;      // (B, latent)
    Tensor logvar;  // defined only when the model has a log-variance head
  };

  // Padded content-token rows (no bos/eos); pad positions are skipped by
  // state masking. When noise is given, survivors of token deletion must
  // already be reflected in rows; perturbation happens here per step.
  EncodeOut encode_rows(Graph& g, const std::vector<std::vector<int32_t>>& rows,
                        const NoiseSpec* noise = nullptr, Rng* noise_rng = nullptr);

  // Deterministic encoding of one sentence, noise off.
  std::vector<double> encode_sentence(std::span<const std::string> tokens);

  // Teacher-forced logits over a bos+...+eos padded batch, step-major
  // ((cols-1)*B, vocab), plus the aligned flattened targets.
  Tensor decode_teacher_forced(Graph& g, const Tensor& z, const Batch& batch);
  static std::vector<int32_t> teacher_targets(const Batch& batch);

  Tensor reconstruction_loss(Graph& g, const Tensor& logits,
                             std::span<const int32_t> targets);

  // Greedy decode of one latent vector into content tokens.
  std::vector<int32_t> greedy_decode(std::span<const double> z_values,
                                     int max_len = -1);
  std::string greedy_decode_string(std::span<const double> z_values,
                                   int max_len = -1);

  // D(z) in (0,1), shape (B,1).
  Tensor discriminator_prob(Graph& g, const Tensor& z);

  // Eq.-style adversarial pair: the discriminator side scores fresh prior
  // samples against the detached posterior; the encoder side is the
  // non-saturating -log D(z).
  Tensor disc_loss(Graph& g, const Tensor& z_posterior_detached,
                   const Tensor& z_prior);
  Tensor enc_adv_loss(Graph& g, const Tensor& z_posterior);
  std::pair<Tensor, Tensor> adversarial_losses(Graph& g, const Tensor& z_posterior,
                                               Rng& rng);

  // 0.5 * sum_dims(mu^2 + sigma^2 - 1 - log sigma^2), meaned over the batch.
  Tensor kl_loss(Graph& g, const Tensor& mu, const Tensor& logvar);

  // z + sigma .* eps with a penalty that punishes vanishing variance:
  // lambda1 * mean(-log sigma^2), active only while the mean is positive.
  std::pair<Tensor, Tensor> laae_latent_noise(Graph& g, const Tensor& z,
                                              const Tensor& logvar, double lambda1,
                                              Rng& rng,
                                              const Tensor* eps_override = nullptr);

  Tensor reparam_sample(Graph& g, const Tensor& mu, const Tensor& logvar,
                        Rng& rng);

  Tensor sample_prior(int64_t batch, Rng& rng) const;

  const std::vector<std::pair<std::string, Tensor>>& named_params() const {
    return params_;
  }
  Tensor param(const std::string& name) const;
  std::vector<Tensor> encoder_decoder_params() const;
  std::vector<Tensor> discriminator_params() const;
  void set_discriminator_trainable(bool trainable);

  static std::vector<std::vector<int32_t>> content_rows(const Corpus& corpus,
                                                        const Vocab& vocab,
                                                        std::span<const size_t> idx);

 private:
  struct Gru {
    Tensor w_ir, w_iz, w_in, w_hr, w_hz, w_hn;
    Tensor b_ir, b_iz, b_in, b_hr, b_hz, b_hn;
  };

  Tensor make_param(const std::string& name, Shape shape, Rng& rng, double fan_in);
  Gru make_gru(const std::string& prefix, int64_t in_dim, int64_t hidden, Rng& rng);
  Tensor gru_step(Graph& g, const Gru& cell, const Tensor& x, const Tensor& h);

  ModelConfig config_;
  Vocab vocab_;
  Tensor embedding_;
  Gru enc_fwd_, enc_bwd_;
  Tensor w_mu_, b_mu_;
  Tensor w_logvar_, b_logvar_;
  Gru dec_;
  Tensor w_init_, b_init_;
  Tensor w_out_, b_out_;
  Tensor w_d1_, b_d1_, w_d2_, b_d2_;
  std::vector<std::pair<std::string, Tensor>> params_;

  friend class Checkpoint;
};

// Constant copy of a tensor's values, detached from any gradient path.
Tensor detach(const Tensor& t);

}  // namespace epaae
