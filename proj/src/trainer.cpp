#include "epaae/trainer.hpp"

#include <algorithm>
#include <cmath>

namespace epaae {

Trainer::Trainer(Model& model, Rng rng) : model_(model), rng_(std::move(rng)) {
  const auto& c = model_.config();
  opt_encdec_ = std::make_unique<Adam>(model_.encoder_decoder_params(), c.lr,
                                       c.adam_beta1, c.adam_beta2);
  if (c.has_discriminator())
    opt_disc_ = std::make_unique<Adam>(model_.discriminator_params(), c.lr,
                                       c.adam_beta1, c.adam_beta2);
}

std::vector<std::vector<int32_t>> Trainer::noised_rows(const Batch& batch,
                                                       const Corpus& corpus) {
  const auto& cfg = model_.config();
  std::vector<std::vector<int32_t>> rows;
  rows.reserve(batch.corpus_index.size());
  for (size_t idx : batch.corpus_index) {
    auto ids = model_.vocab().encode(corpus.sentences[idx].tokens);
    if (cfg.noise.drop_p > 0.0)
      ids = drop_tokens(ids, cfg.noise.drop_p, rng_);
    rows.push_back(std::move(ids));
  }
  return rows;
}

double Trainer::discriminator_step(const Batch& batch, const Corpus& corpus) {
  const auto& cfg = model_.config();
  if (!opt_disc_) return 0.0;

  // Posterior samples from the clean input; constants for this update.
  Graph ng(false);
  auto rows = Model::content_rows(corpus, model_.vocab(), batch.corpus_index);
  auto enc = model_.encode_rows(ng, rows);
  Tensor z = enc.mu;
  if (cfg.model_kind == ModelKind::kLaae) {
    auto [zn, pen] =
        model_.laae_latent_noise(ng, z, enc.logvar, cfg.lambda1, rng_);
    z = zn;
  }

  Graph g;
  Tensor z_prior = model_.sample_prior(batch.rows, rng_);
  Tensor dl = model_.disc_loss(g, detach(z), z_prior);
  const double value = dl.value();
  opt_disc_->zero_grad();
  g.backward(dl);
  opt_disc_->step();
  return value;
}

StepStats Trainer::autoencoder_step(const Batch& batch, const Corpus& corpus) {
  const auto& cfg = model_.config();
  StepStats st;

  Graph g;
  auto rows = noised_rows(batch, corpus);
  const NoiseSpec* noise = cfg.noise.zeta > 0.0 ? &cfg.noise : nullptr;
  auto enc = model_.encode_rows(g, rows, noise, &rng_);

  Tensor z = enc.mu;
  Tensor penalty;
  if (cfg.model_kind == ModelKind::kBetaVae) {
    z = model_.reparam_sample(g, enc.mu, enc.logvar, rng_);
  } else if (cfg.model_kind == ModelKind::kLaae) {
    auto [zn, pen] =
        model_.laae_latent_noise(g, z, enc.logvar, cfg.lambda1, rng_);
    z = zn;
    penalty = pen;
  }

  Tensor logits = model_.decode_teacher_forced(g, z, batch);
  auto targets = Model::teacher_targets(batch);
  Tensor total = model_.reconstruction_loss(g, logits, targets);
  st.rec = total.value();

  if (cfg.has_discriminator() && cfg.lambda_adv > 0.0) {
    model_.set_discriminator_trainable(false);
    Tensor adv = model_.enc_adv_loss(g, z);
    st.adv_enc = adv.value();
    total = g.add(total, g.scale(adv, cfg.lambda_adv));
  }
  if (cfg.model_kind == ModelKind::kBetaVae) {
    Tensor kl = model_.kl_loss(g, enc.mu, enc.logvar);
    st.aux = kl.value();
    total = g.add(total, g.scale(kl, cfg.beta));
  }
  if (penalty.defined()) {
    st.aux = penalty.value();
    total = g.add(total, penalty);
  }

  opt_encdec_->zero_grad();
  g.backward(total);
  opt_encdec_->step();
  model_.set_discriminator_trainable(true);
  return st;
}

StepStats Trainer::train_batch(const Batch& batch, const Corpus& corpus) {
  StepStats st;
  st.adv_disc = discriminator_step(batch, corpus);
  StepStats enc = autoencoder_step(batch, corpus);
  st.rec = enc.rec;
  st.adv_enc = enc.adv_enc;
  st.aux = enc.aux;
  return st;
}

StepStats Trainer::run_epoch(const Corpus& train) {
  const auto& cfg = model_.config();
  auto batches = make_batches(train, model_.vocab(), cfg.batch_size, rng_);
  StepStats sum;
  for (const Batch& b : batches) {
    StepStats st = train_batch(b, train);
    sum.rec += st.rec;
    sum.adv_disc += st.adv_disc;
    sum.adv_enc += st.adv_enc;
    sum.aux += st.aux;
  }
  const double n = static_cast<double>(std::max<size_t>(1, batches.size()));
  sum.rec /= n;
  sum.adv_disc /= n;
  sum.adv_enc /= n;
  sum.aux /= n;
  return sum;
}

std::vector<StepStats> Trainer::train(const Corpus& train, std::ostream* loss_csv) {
  if (train.sentences.empty()) throw UsageError("train: empty corpus");
  if (loss_csv) (*loss_csv) << "epoch,rec,adv_disc,adv_enc,aux\n";
  std::vector<StepStats> log;
  for (int epoch = 1; epoch <= model_.config().epochs; ++epoch) {
    StepStats st = run_epoch(train);
    log.push_back(st);
    if (loss_csv)
      (*loss_csv) << epoch << ',' << st.rec << ',' << st.adv_disc << ','
                  << st.adv_enc << ',' << st.aux << '\n';
  }
  return log;
}

double teacher_forced_accuracy(Model& model, const Corpus& corpus) {
  auto batches = make_ordered_batches(corpus, model.vocab(), 64);
  int64_t hits = 0, total = 0;
  for (const Batch& b : batches) {
    Graph g(false);
    std::vector<std::vector<int32_t>> rows;
    rows.reserve(b.corpus_index.size());
    for (size_t idx : b.corpus_index)
      rows.push_back(model.vocab().encode(corpus.sentences[idx].tokens));
    Tensor z = model.encode_rows(g, rows).mu;
    Tensor logits = model.decode_teacher_forced(g, z, b);
    auto targets = Model::teacher_targets(b);
    const int64_t v = logits.dim(1);
    for (int64_t r = 0; r < logits.dim(0); ++r) {
      int32_t tgt = targets[static_cast<size_t>(r)];
      if (tgt == Vocab::kPad) continue;
      int64_t best = 0;
      double best_v = logits.at(r, 0);
      for (int64_t j = 1; j < v; ++j) {
        if (logits.at(r, j) > best_v) {
          best_v = logits.at(r, j);
          best = j;
        }
      }
      hits += best == tgt;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace epaae
