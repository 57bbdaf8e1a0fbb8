#include "epaae/model.hpp"

#include <algorithm>
#include <cmath>

namespace epaae {

namespace {
constexpr double kProbEps = 1e-7;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "aae") return ModelKind::kAae;
  if (name == "laae") return ModelKind::kLaae;
  if (name == "betavae") return ModelKind::kBetaVae;
  throw UsageError("unknown model_kind '" + name +
                   "' (expected aae|laae|betavae)");
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kAae: return "aae";
    case ModelKind::kLaae: return "laae";
    case ModelKind::kBetaVae: return "betavae";
  }
  return "?";
}

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.emb_dim = 64;
  c.hidden_dim = 64;
  c.latent_dim = 16;
  return c;
}

void ModelConfig::validate() const {
  if (emb_dim < 1 || hidden_dim < 1 || latent_dim < 1 || disc_hidden < 1)
    throw UsageError("model config: dimensions must be positive");
  if (lambda_adv < 0.0) throw UsageError("model config: lambda_adv must be >= 0");
  if (beta < 0.0) throw UsageError("model config: beta must be >= 0");
  if (lr <= 0.0) throw UsageError("model config: lr must be positive");
  if (epochs < 0) throw UsageError("model config: epochs must be >= 0");
  if (batch_size < 1) throw UsageError("model config: batch_size must be >= 1");
  if (max_len < 1) throw UsageError("model config: max_len must be >= 1");
  noise.validate();
}

Tensor detach(const Tensor& t) {
  return Tensor::from(t.shape(),
                      std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor Model::make_param(const std::string& name, Shape shape, Rng& rng,
                         double fan_in) {
  const double bound = 1.0 / std::sqrt(std::max(1.0, fan_in));
  std::vector<double> v(static_cast<size_t>(shape_size(shape)));
  for (double& x : v) x = rng.uniform(-bound, bound);
  Tensor t = Tensor::from(std::move(shape), std::move(v), true);
  params_.emplace_back(name, t);
  return t;
}

Model::Gru Model::make_gru(const std::string& prefix, int64_t in_dim,
                           int64_t hidden, Rng& rng) {
  Gru c;
  c.w_ir = make_param(prefix + ".w_ir", {in_dim, hidden}, rng, double(in_dim));
  c.w_iz = make_param(prefix + ".w_iz", {in_dim, hidden}, rng, double(in_dim));
  c.w_in = make_param(prefix + ".w_in", {in_dim, hidden}, rng, double(in_dim));
  c.w_hr = make_param(prefix + ".w_hr", {hidden, hidden}, rng, double(hidden));
  c.w_hz = make_param(prefix + ".w_hz", {hidden, hidden}, rng, double(hidden));
  c.w_hn = make_param(prefix + ".w_hn", {hidden, hidden}, rng, double(hidden));
  c.b_ir = make_param(prefix + ".b_ir", {hidden}, rng, double(hidden));
  c.b_iz = make_param(prefix + ".b_iz", {hidden}, rng, double(hidden));
  c.b_in = make_param(prefix + ".b_in", {hidden}, rng, double(hidden));
  c.b_hr = make_param(prefix + ".b_hr", {hidden}, rng, double(hidden));
  c.b_hz = make_param(prefix + ".b_hz", {hidden}, rng, double(hidden));
  c.b_hn = make_param(prefix + ".b_hn", {hidden}, rng, double(hidden));
  return c;
}

Model::Model(ModelConfig config, Vocab vocab, Rng& init_rng)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  const int64_t V = vocab_.size();
  const int64_t E = config_.emb_dim;
  const int64_t H = config_.hidden_dim;
  const int64_t Z = config_.latent_dim;
  const int64_t D = config_.disc_hidden;

  embedding_ = make_param("embedding", {V, E}, init_rng, double(E));
  enc_fwd_ = make_gru("enc_fwd", E, H, init_rng);
  enc_bwd_ = make_gru("enc_bwd", E, H, init_rng);
  w_mu_ = make_param("latent.w_mu", {2 * H, Z}, init_rng, double(2 * H));
  b_mu_ = make_param("latent.b_mu", {Z}, init_rng, double(2 * H));
  if (config_.has_logvar_head()) {
    w_logvar_ = make_param("latent.w_logvar", {2 * H, Z}, init_rng, double(2 * H));
    b_logvar_ = make_param("latent.b_logvar", {Z}, init_rng, double(2 * H));
  }
  dec_ = make_gru("dec", E + Z, H, init_rng);
  w_init_ = make_param("dec.w_init", {Z, H}, init_rng, double(Z));
  b_init_ = make_param("dec.b_init", {H}, init_rng, double(Z));
  w_out_ = make_param("out.w", {H, V}, init_rng, double(H));
  b_out_ = make_param("out.b", {V}, init_rng, double(H));
  if (config_.has_discriminator()) {
    w_d1_ = make_param("disc.w1", {Z, D}, init_rng, double(Z));
    b_d1_ = make_param("disc.b1", {D}, init_rng, double(Z));
    w_d2_ = make_param("disc.w2", {D, 1}, init_rng, double(D));
    b_d2_ = make_param("disc.b2", {1}, init_rng, double(D));
  }
}

Tensor Model::param(const std::string& name) const {
  for (const auto& [n, t] : params_)
    if (n == name) return t;
  throw std::runtime_error("model: no parameter named " + name);
}

std::vector<Tensor> Model::encoder_decoder_params() const {
  std::vector<Tensor> out;
  for (const auto& [n, t] : params_)
    if (n.rfind("disc.", 0) != 0) out.push_back(t);
  return out;
}

std::vector<Tensor> Model::discriminator_params() const {
  std::vector<Tensor> out;
  for (const auto& [n, t] : params_)
    if (n.rfind("disc.", 0) == 0) out.push_back(t);
  return out;
}

void Model::set_discriminator_trainable(bool trainable) {
  for (auto& [n, t] : params_)
    if (n.rfind("disc.", 0) == 0) t.set_requires_grad(trainable);
}

Tensor Model::gru_step(Graph& g, const Gru& c, const Tensor& x, const Tensor& h) {
  Tensor r = g.sigmoid(g.add(g.add(g.matmul(x, c.w_ir), c.b_ir),
                             g.add(g.matmul(h, c.w_hr), c.b_hr)));
  Tensor z = g.sigmoid(g.add(g.add(g.matmul(x, c.w_iz), c.b_iz),
                             g.add(g.matmul(h, c.w_hz), c.b_hz)));
  Tensor n = g.tanh(g.add(g.add(g.matmul(x, c.w_in), c.b_in),
                          g.mul(r, g.add(g.matmul(h, c.w_hn), c.b_hn))));
  // h' = (1-z) .* n + z .* h
  return g.add(n, g.mul(z, g.sub(h, n)));
}

Model::EncodeOut Model::encode_rows(Graph& g,
                                    const std::vector<std::vector<int32_t>>& rows,
                                    const NoiseSpec* noise, Rng* noise_rng) {
  if (rows.empty()) throw std::runtime_error("encode: empty batch");
  const int64_t B = static_cast<int64_t>(rows.size());
  const int64_t H = config_.hidden_dim;
  int64_t T = 0;
  for (const auto& r : rows) {
    if (r.empty()) throw std::runtime_error("encode: empty input sequence");
    T = std::max(T, static_cast<int64_t>(r.size()));
  }

  auto ids_at = [&](int64_t t) {
    std::vector<int32_t> ids(static_cast<size_t>(B), Vocab::kPad);
    for (int64_t b = 0; b < B; ++b)
      if (t < static_cast<int64_t>(rows[static_cast<size_t>(b)].size()))
        ids[static_cast<size_t>(b)] = rows[static_cast<size_t>(b)][static_cast<size_t>(t)];
    return ids;
  };

  auto step_inputs = [&](int64_t t, std::vector<uint8_t>& mask) {
    auto ids = ids_at(t);
    mask.assign(static_cast<size_t>(B), 0);
    for (int64_t b = 0; b < B; ++b)
      mask[static_cast<size_t>(b)] = ids[static_cast<size_t>(b)] != Vocab::kPad;
    Tensor e = g.gather_rows(embedding_, ids);
    if (noise && noise->zeta > 0.0)
      e = perturb_embeddings(g, e, *noise, *noise_rng, mask);
    return e;
  };

  auto run_direction = [&](const Gru& cell, bool forward) {
    Tensor h = Tensor::zeros({B, H});
    std::vector<uint8_t> mask;
    for (int64_t i = 0; i < T; ++i) {
      const int64_t t = forward ? i : T - 1 - i;
      Tensor x = step_inputs(t, mask);
      Tensor h_new = gru_step(g, cell, x, h);
      std::vector<double> mcol(static_cast<size_t>(B));
      for (int64_t b = 0; b < B; ++b)
        mcol[static_cast<size_t>(b)] = mask[static_cast<size_t>(b)] ? 1.0 : 0.0;
      Tensor m = Tensor::from({B, 1}, std::move(mcol));
      h = g.add(h, g.mul(g.sub(h_new, h), m));  // padded rows carry h through
    }
    return h;
  };

  Tensor h_fwd = run_direction(enc_fwd_, true);
  Tensor h_bwd = run_direction(enc_bwd_, false);
  Tensor hcat = g.concat({h_fwd, h_bwd}, 1);

  EncodeOut out;
  out.mu = g.add(g.matmul(hcat, w_mu_), b_mu_);
  if (config_.has_logvar_head())
    out.logvar = g.add(g.matmul(hcat, w_logvar_), b_logvar_);
  return out;
}

std::vector<double> Model::encode_sentence(std::span<const std::string> tokens) {
  if (tokens.empty()) throw UsageError("encode: empty sentence");
  Graph g(false);
  std::vector<std::vector<int32_t>> rows{vocab_.encode(tokens)};
  Tensor mu = encode_rows(g, rows).mu;
  return {mu.data().begin(), mu.data().end()};
}

std::vector<int32_t> Model::teacher_targets(const Batch& batch) {
  std::vector<int32_t> targets;
  targets.reserve(static_cast<size_t>((batch.cols - 1) * batch.rows));
  for (int64_t t = 0; t + 1 < batch.cols; ++t)
    for (int64_t b = 0; b < batch.rows; ++b) targets.push_back(batch.at(b, t + 1));
  return targets;
}

Tensor Model::decode_teacher_forced(Graph& g, const Tensor& z, const Batch& batch) {
  if (z.rank() != 2 || z.dim(0) != batch.rows || z.dim(1) != config_.latent_dim)
    throw std::runtime_error("decode: latent shape mismatch");
  Tensor h = g.add(g.matmul(z, w_init_), b_init_);
  std::vector<Tensor> step_logits;
  for (int64_t t = 0; t + 1 < batch.cols; ++t) {
    Tensor e = g.gather_rows(embedding_, batch.column(t));
    Tensor x = g.concat({e, z}, 1);
    h = gru_step(g, dec_, x, h);
    step_logits.push_back(g.add(g.matmul(h, w_out_), b_out_));
  }
  return g.concat(step_logits, 0);
}

Tensor Model::reconstruction_loss(Graph& g, const Tensor& logits,
                                  std::span<const int32_t> targets) {
  return g.softmax_cross_entropy(logits, targets, Vocab::kPad);
}

std::vector<int32_t> Model::greedy_decode(std::span<const double> z_values,
                                          int max_len) {
  if (max_len < 0) max_len = config_.max_len;
  if (max_len < 1) throw UsageError("greedy decode: max_len must be >= 1");
  const int64_t Z = config_.latent_dim;
  if (static_cast<int64_t>(z_values.size()) != Z)
    throw std::runtime_error("greedy decode: latent size mismatch");
  Graph g(false);
  Tensor z = Tensor::from({1, Z}, {z_values.begin(), z_values.end()});
  Tensor h = g.add(g.matmul(z, w_init_), b_init_);
  std::vector<int32_t> out;
  int32_t cur = Vocab::kBos;
  for (int step = 0; step < max_len; ++step) {
    std::vector<int32_t> ids{cur};
    Tensor e = g.gather_rows(embedding_, ids);
    Tensor x = g.concat({e, z}, 1);
    h = gru_step(g, dec_, x, h);
    Tensor logits = g.add(g.matmul(h, w_out_), b_out_);
    int32_t best = -1;
    double best_v = 0.0;
    for (int32_t j = 0; j < vocab_.size(); ++j) {
      if (j == Vocab::kPad || j == Vocab::kBos) continue;
      double v = logits.at(0, j);
      if (best < 0 || v > best_v) {
        best = j;
        best_v = v;
      }
    }
    if (best == Vocab::kEos) break;
    out.push_back(best);
    cur = best;
  }
  return out;
}

std::string Model::greedy_decode_string(std::span<const double> z_values,
                                        int max_len) {
  return vocab_.decode_string(greedy_decode(z_values, max_len));
}

Tensor Model::discriminator_prob(Graph& g, const Tensor& z) {
  if (!config_.has_discriminator())
    throw std::runtime_error("model has no discriminator");
  Tensor h = g.tanh(g.add(g.matmul(z, w_d1_), b_d1_));
  return g.sigmoid(g.add(g.matmul(h, w_d2_), b_d2_));
}

Tensor Model::disc_loss(Graph& g, const Tensor& z_posterior_detached,
                        const Tensor& z_prior) {
  Tensor p_prior = g.clamp(discriminator_prob(g, z_prior), kProbEps, 1.0 - kProbEps);
  Tensor p_post = g.clamp(discriminator_prob(g, z_posterior_detached), kProbEps,
                          1.0 - kProbEps);
  Tensor ones = Tensor::full(p_post.shape(), 1.0);
  Tensor lhs = g.mean(g.log(p_prior));
  Tensor rhs = g.mean(g.log(g.sub(ones, p_post)));
  return g.sub(g.scale(lhs, -1.0), rhs);
}

Tensor Model::enc_adv_loss(Graph& g, const Tensor& z_posterior) {
  Tensor p = g.clamp(discriminator_prob(g, z_posterior), kProbEps, 1.0 - kProbEps);
  return g.scale(g.mean(g.log(p)), -1.0);
}

std::pair<Tensor, Tensor> Model::adversarial_losses(Graph& g,
                                                    const Tensor& z_posterior,
                                                    Rng& rng) {
  Tensor z_prior = sample_prior(z_posterior.dim(0), rng);
  Tensor dl = disc_loss(g, detach(z_posterior), z_prior);
  Tensor el = enc_adv_loss(g, z_posterior);
  return {dl, el};
}

Tensor Model::kl_loss(Graph& g, const Tensor& mu, const Tensor& logvar) {
  if (mu.shape() != logvar.shape())
    throw std::runtime_error("kl_loss: shape mismatch");
  Tensor ones = Tensor::full(mu.shape(), 1.0);
  Tensor t = g.sub(g.sub(g.add(g.mul(mu, mu), g.exp(logvar)), ones), logvar);
  Tensor row_sums = g.sum_axis(t, 1);
  return g.scale(g.mean(row_sums), 0.5);
}

Tensor Model::reparam_sample(Graph& g, const Tensor& mu, const Tensor& logvar,
                             Rng& rng) {
  std::vector<double> ev(static_cast<size_t>(mu.size()));
  for (double& x : ev) x = rng.normal();
  Tensor eps = Tensor::from(mu.shape(), std::move(ev));
  Tensor sigma = g.exp(g.scale(logvar, 0.5));
  return g.add(mu, g.mul(sigma, eps));
}

std::pair<Tensor, Tensor> Model::laae_latent_noise(Graph& g, const Tensor& z,
                                                   const Tensor& logvar,
                                                   double lambda1, Rng& rng,
                                                   const Tensor* eps_override) {
  Tensor eps;
  if (eps_override) {
    eps = *eps_override;
  } else {
    std::vector<double> ev(static_cast<size_t>(z.size()));
    for (double& x : ev) x = rng.normal();
    eps = Tensor::from(z.shape(), std::move(ev));
  }
  Tensor sigma = g.exp(g.scale(logvar, 0.5));
  Tensor z_noised = g.add(z, g.mul(sigma, eps));
  // Penalty active only while mean(log sigma^2) < 0; the branch happens at
  // build time, matching the subgradient of max(0, -mean).
  Tensor mean_logvar = g.mean(logvar);
  Tensor penalty = mean_logvar.value() < 0.0
                       ? g.scale(mean_logvar, -lambda1)
                       : Tensor::scalar(0.0);
  return {z_noised, penalty};
}

Tensor Model::sample_prior(int64_t batch, Rng& rng) const {
  std::vector<double> v(static_cast<size_t>(batch * config_.latent_dim));
  for (double& x : v) x = rng.normal();
  return Tensor::from({batch, config_.latent_dim}, std::move(v));
}

std::vector<std::vector<int32_t>> Model::content_rows(const Corpus& corpus,
                                                      const Vocab& vocab,
                                                      std::span<const size_t> idx) {
  std::vector<std::vector<int32_t>> rows;
  rows.reserve(idx.size());
  for (size_t i : idx) rows.push_back(vocab.encode(corpus.sentences[i].tokens));
  return rows;
}

}  // namespace epaae
