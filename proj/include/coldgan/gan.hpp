#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coldgan/data.hpp"
#include "coldgan/eval.hpp"
#include "coldgan/nn.hpp"
#include "coldgan/rejuvenate.hpp"

namespace coldgan::gan {

struct ArchitectureConfig {
    std::vector<std::size_t> g_hidden = {256};
    std::vector<std::size_t> d_hidden = {128};
    nn::Activation hidden_activation = nn::Activation::relu;
};

struct TrainConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 64;
    double g_learning_rate = 1e-3;
    double d_learning_rate = 1e-3;
    std::size_t d_steps_per_g_step = 1;
    double relevant_loss_weight = 1.0;  // lambda; 0 disables the relevant-item term
    double rating_scale = 5.0;
    std::uint64_t seed = 0;
    std::size_t patience = 10;
    double validation_fraction = 0.1;
    // Generator adversarial term: -E[D(x^)] as printed, or the non-saturating
    // -E[log D(x^)] variant.
    bool log_adversarial = false;
    // Reuse one fixed corruption instead of re-sampling each epoch (ablation).
    bool freeze_corruption = false;
    std::size_t eval_cold_keep = 10;  // cold-input size for validation P@5

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double val_p_at_5 = 0.0;
};

// Generator (DAE, N -> hidden -> N, identity output) plus discriminator
// (MLP, N -> hidden -> 1, sigmoid output) with their optimizer states.
struct GanModel {
    nn::Mlp generator;
    nn::Mlp discriminator;
    nn::Adam g_opt;
    nn::Adam d_opt;
    std::vector<EpochRecord> history;

    std::size_t n_items() const { return generator.in_dim(); }
};

GanModel init_model(std::size_t n_items, const ArchitectureConfig& arch,
                    const TrainConfig& cfg);

// Nonzero ratings map r -> r/scale into (0,1]; zeros stay zero.
std::vector<double> normalize_ratings(const data::RatingVector& v, double scale = 5.0);

// w^ = G(c): raw scores, unbounded.
std::vector<double> generate(const nn::Mlp& generator, const std::vector<double>& cold);

// Discriminator loss: mean over the batch of -log D(w) - log(1 - D(w^)).
// When grads is non-null, receives d(loss)/d(D params); fake vectors are
// constants (no gradient flows back to the generator).
double d_loss(const nn::Mlp& discriminator,
              const std::vector<std::vector<double>>& real_batch,
              const std::vector<std::vector<double>>& fake_batch,
              std::vector<nn::LayerGrads>* grads = nullptr);

// bce(sigmoid(w^), relevance bits); grad (when non-null) is d(loss)/d(w^).
double relevant_loss(const std::vector<double>& generated,
                     const data::RelevanceVector& relevance,
                     std::vector<double>* grad = nullptr);

// Generator loss: adversarial term + lambda * mean relevant loss, D frozen.
double g_loss(const nn::Mlp& discriminator, const nn::Mlp& generator,
              const std::vector<std::vector<double>>& cold_batch,
              const std::vector<const data::RelevanceVector*>& relevance_batch,
              double lambda, bool log_adversarial = false,
              std::vector<nn::LayerGrads>* grads = nullptr);

// One Adam step on d_loss; the generator is untouched.
double train_step_d(GanModel& model, const std::vector<std::vector<double>>& real_batch,
                    const std::vector<std::vector<double>>& fake_batch);

// One Adam step on g_loss; the discriminator is untouched.
double train_step_g(GanModel& model, const std::vector<std::vector<double>>& cold_batch,
                    const std::vector<const data::RelevanceVector*>& relevance_batch,
                    double lambda, bool log_adversarial = false);

// Full alternating training loop: per epoch, re-sample rejuvenation for every
// train user, run d_steps_per_g_step D-steps then one G-step per batch, track
// validation P@5 on a held-out slice of train users, and return the
// best-validation snapshot.
GanModel train(const data::InteractionLog& log, const data::DatasetSplit& split,
               const rejuvenate::RejuvenationConfig& rej_cfg, const TrainConfig& cfg,
               const ArchitectureConfig& arch);

// Same loop over prebuilt warm vectors (what train() delegates to).
GanModel train_vectors(const std::vector<data::RatingVector>& warm_vectors,
                       const std::vector<std::size_t>& train_users,
                       const rejuvenate::RejuvenationConfig& rej_cfg, const TrainConfig& cfg,
                       const ArchitectureConfig& arch);

eval::Scorer generator_scorer(const nn::Mlp& generator, double rating_scale = 5.0);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace coldgan::gan
