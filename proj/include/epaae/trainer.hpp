#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "epaae/adam.hpp"
#include "epaae/model.hpp"

namespace epaae {

struct StepStats {
  double rec = 0.0;
  double adv_disc = 0.0;
  double adv_enc = 0.0;
  double aux = 0.0;  // KL (betavae) or variance penalty (laae)
};

// Alternating per-batch updates: the discriminator fits fresh prior samples
// against detached clean encodings, then encoder+decoder descend the
// composed objective with input noise on. Loss composition is the only
// thing model_kind changes.
class Trainer {
 public:
  Trainer(Model& model, Rng rng);

  StepStats train_batch(const Batch& batch, const Corpus& corpus);
  StepStats run_epoch(const Corpus& train);
  // Full schedule; appends `epoch,rec,adv_disc,adv_enc,aux` lines when a
  // log stream is given.
  std::vector<StepStats> train(const Corpus& train, std::ostream* loss_csv = nullptr);

  // Exposed for inspection in tests.
  double discriminator_step(const Batch& batch, const Corpus& corpus);
  StepStats autoencoder_step(const Batch& batch, const Corpus& corpus);

 private:
  std::vector<std::vector<int32_t>> noised_rows(const Batch& batch,
                                                const Corpus& corpus);

  Model& model_;
  Rng rng_;
  std::unique_ptr<Adam> opt_encdec_;
  std::unique_ptr<Adam> opt_disc_;
};

// Fraction of non-pad target tokens reproduced by teacher-forced argmax.
double teacher_forced_accuracy(Model& model, const Corpus& corpus);

}  // namespace epaae
