#include "coldgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coldgan/errors.hpp"

namespace coldgan::gan {

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("training: batch_size must be >= 1");
    if (g_learning_rate <= 0.0 || d_learning_rate <= 0.0)
        throw ConfigError("training: learning rates must be > 0");
    if (d_steps_per_g_step < 1) throw ConfigError("training: d_steps_per_g_step must be >= 1");
    if (relevant_loss_weight < 0.0) throw ConfigError("training: lambda must be >= 0");
    if (rating_scale <= 0.0) throw ConfigError("training: rating_scale must be > 0");
    if (validation_fraction < 0.0 || validation_fraction > 0.5)
        throw ConfigError("training: validation_fraction must be in [0, 0.5]");
    if (eval_cold_keep < 1) throw ConfigError("training: eval_cold_keep must be >= 1");
}

namespace {

nn::Mlp build_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
                  nn::Activation hidden_act, nn::Activation out_act, Rng& rng) {
    nn::Mlp net;
    std::size_t prev = in;
    for (std::size_t h : hidden) {
        net.layers.push_back({nn::init_glorot(h, prev, rng), std::vector<double>(h, 0.0),
                              hidden_act});
        prev = h;
    }
    net.layers.push_back({nn::init_glorot(out, prev, rng), std::vector<double>(out, 0.0),
                          out_act});
    return net;
}

}  // namespace

GanModel init_model(std::size_t n_items, const ArchitectureConfig& arch,
                    const TrainConfig& cfg) {
    cfg.validate();
    if (n_items == 0) throw DataError("init_model: zero items");
    Rng rng(derive_seed(cfg.seed, "init"));
    GanModel model;
    model.generator = build_mlp(n_items, arch.g_hidden, n_items, arch.hidden_activation,
                                nn::Activation::identity, rng);
    model.discriminator = build_mlp(n_items, arch.d_hidden, 1, arch.hidden_activation,
                                    nn::Activation::sigmoid, rng);
    model.g_opt = nn::Adam(model.generator, {cfg.g_learning_rate});
    model.d_opt = nn::Adam(model.discriminator, {cfg.d_learning_rate});
    return model;
}

std::vector<double> normalize_ratings(const data::RatingVector& v, double scale) {
    std::vector<double> out(v.values.size(), 0.0);
    for (std::size_t j : v.rated_order) out[j] = v.values[j] / scale;
    return out;
}

std::vector<double> generate(const nn::Mlp& generator, const std::vector<double>& cold) {
    return generator.forward(cold).output;
}

double d_loss(const nn::Mlp& discriminator,
              const std::vector<std::vector<double>>& real_batch,
              const std::vector<std::vector<double>>& fake_batch,
              std::vector<nn::LayerGrads>* grads) {
    if (real_batch.empty() || fake_batch.empty()) throw DataError("d_loss: empty batch");
    if (real_batch.size() != fake_batch.size())
        throw DataError("d_loss: real/fake batch sizes differ");
    const double inv_b = 1.0 / static_cast<double>(real_batch.size());

    if (grads) *grads = nn::zero_grads(discriminator);
    double loss = 0.0;

    auto accumulate_term = [&](const std::vector<double>& x, bool real) {
        const nn::ForwardCache cache = discriminator.forward(x);
        const double d = nn::clamp_prob(cache.output[0]);
        loss += real ? -std::log(d) : -std::log(1.0 - d);
        if (!grads) return;
        // d/dD of -log D is -1/D; of -log(1-D) is 1/(1-D). Zero when clamped.
        double dd = 0.0;
        const double raw = cache.output[0];
        if (raw > nn::kEps && raw < 1.0 - nn::kEps)
            dd = real ? -1.0 / raw : 1.0 / (1.0 - raw);
        const std::vector<nn::LayerGrads> g =
            discriminator.backward(cache, {dd * inv_b});
        nn::accumulate(*grads, g);
    };

    for (const auto& w : real_batch) accumulate_term(w, true);
    for (const auto& w : fake_batch) accumulate_term(w, false);
    return loss * inv_b;
}

double relevant_loss(const std::vector<double>& generated,
                     const data::RelevanceVector& relevance, std::vector<double>* grad) {
    if (generated.size() != relevance.bits.size())
        throw DataError("relevant_loss: dimension mismatch");
    std::vector<double> probs(generated.size());
    std::vector<double> targets(generated.size());
    for (std::size_t j = 0; j < generated.size(); ++j) {
        probs[j] = nn::sigmoid(generated[j]);
        targets[j] = relevance.bits[j] ? 1.0 : 0.0;
    }
    const double loss = nn::bce(probs, targets);
    if (grad) {
        *grad = nn::bce_grad(probs, targets);
        for (std::size_t j = 0; j < grad->size(); ++j)
            (*grad)[j] *= probs[j] * (1.0 - probs[j]);  // chain through sigmoid
    }
    return loss;
}

double g_loss(const nn::Mlp& discriminator, const nn::Mlp& generator,
              const std::vector<std::vector<double>>& cold_batch,
              const std::vector<const data::RelevanceVector*>& relevance_batch,
              double lambda, bool log_adversarial, std::vector<nn::LayerGrads>* grads) {
    if (cold_batch.empty()) throw DataError("g_loss: empty batch");
    if (cold_batch.size() != relevance_batch.size())
        throw DataError("g_loss: batch sizes differ");
    const double inv_b = 1.0 / static_cast<double>(cold_batch.size());

    if (grads) *grads = nn::zero_grads(generator);
    double loss = 0.0;

    for (std::size_t b = 0; b < cold_batch.size(); ++b) {
        const nn::ForwardCache g_cache = generator.forward(cold_batch[b]);
        const std::vector<double>& generated = g_cache.output;

        const nn::ForwardCache d_cache = discriminator.forward(generated);
        const double d_out = d_cache.output[0];
        if (log_adversarial) {
            loss += -std::log(nn::clamp_prob(d_out));
        } else {
            loss += -d_out;
        }

        std::vector<double> rel_grad;
        const double rel =
            relevant_loss(generated, *relevance_batch[b], grads ? &rel_grad : nullptr);
        loss += lambda * rel;

        if (!grads) continue;

        // d(adversarial)/d(D output), then back through the frozen D to w^.
        double d_adv = -1.0;
        if (log_adversarial)
            d_adv = (d_out > nn::kEps && d_out < 1.0 - nn::kEps) ? -1.0 / d_out : 0.0;
        std::vector<double> d_generated;
        discriminator.backward(d_cache, {d_adv}, &d_generated);

        for (std::size_t j = 0; j < d_generated.size(); ++j)
            d_generated[j] = (d_generated[j] + lambda * rel_grad[j]) * inv_b;

        const std::vector<nn::LayerGrads> g = generator.backward(g_cache, d_generated);
        nn::accumulate(*grads, g);
    }
    return loss * inv_b;
}

double train_step_d(GanModel& model, const std::vector<std::vector<double>>& real_batch,
                    const std::vector<std::vector<double>>& fake_batch) {
    std::vector<nn::LayerGrads> grads;
    const double loss = d_loss(model.discriminator, real_batch, fake_batch, &grads);
    model.d_opt.step(model.discriminator, grads);
    return loss;
}

double train_step_g(GanModel& model, const std::vector<std::vector<double>>& cold_batch,
                    const std::vector<const data::RelevanceVector*>& relevance_batch,
                    double lambda, bool log_adversarial) {
    std::vector<nn::LayerGrads> grads;
    const double loss = g_loss(model.discriminator, model.generator, cold_batch,
                               relevance_batch, lambda, log_adversarial, &grads);
    model.g_opt.step(model.generator, grads);
    return loss;
}

eval::Scorer generator_scorer(const nn::Mlp& generator, double rating_scale) {
    return [&generator, rating_scale](const data::RatingVector& cold) {
        return generate(generator, normalize_ratings(cold, rating_scale));
    };
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::ostringstream os;
    os << "epoch,d_loss,g_loss,val_p_at_5\n";
    char buf[128];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.8f,%.8f,%.8f\n", r.epoch, r.d_loss, r.g_loss,
                      r.val_p_at_5);
        os << buf;
    }
    return os.str();
}

GanModel train(const data::InteractionLog& log, const data::DatasetSplit& split,
               const rejuvenate::RejuvenationConfig& rej_cfg, const TrainConfig& cfg,
               const ArchitectureConfig& arch) {
    const std::vector<data::RatingVector> warm = data::build_all_rating_vectors(log);
    return train_vectors(warm, split.train_users, rej_cfg, cfg, arch);
}

GanModel train_vectors(const std::vector<data::RatingVector>& warm_vectors,
                       const std::vector<std::size_t>& train_users,
                       const rejuvenate::RejuvenationConfig& rej_cfg, const TrainConfig& cfg,
                       const ArchitectureConfig& arch) {
    cfg.validate();
    rej_cfg.validate();
    if (train_users.empty()) throw DataError("train: empty training cohort");
    if (warm_vectors.empty()) throw DataError("train: no rating vectors");
    const std::size_t n_items = warm_vectors.front().values.size();

    GanModel model = init_model(n_items, arch, cfg);
    if (cfg.epochs == 0) return model;

    // Validation slice comes off the front of a seeded shuffle of train users.
    std::vector<std::size_t> pool = train_users;
    Rng val_rng(derive_seed(cfg.seed, "validation"));
    val_rng.shuffle(pool);
    const auto n_val = static_cast<std::size_t>(
        std::floor(cfg.validation_fraction * static_cast<double>(pool.size())));
    std::vector<std::size_t> val_users(pool.begin(), pool.begin() + n_val);
    std::vector<std::size_t> fit_users;
    for (auto it = pool.begin() + n_val; it != pool.end(); ++it)
        if (warm_vectors[*it].count() > 0) fit_users.push_back(*it);
    if (fit_users.empty()) throw DataError("train: no usable training users");

    // Precompute per-user normalized warm vectors and relevance targets.
    std::vector<std::vector<double>> warm_normalized(warm_vectors.size());
    std::vector<data::RelevanceVector> relevance(warm_vectors.size());
    for (std::size_t m : fit_users) {
        warm_normalized[m] = normalize_ratings(warm_vectors[m], cfg.rating_scale);
        relevance[m] = data::relevance_vector(warm_vectors[m]);
    }

    eval::EvalProtocol val_protocol;
    val_protocol.cold_keep = cfg.eval_cold_keep;
    val_protocol.ks = {5};

    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));

    GanModel best = model;
    double best_val = -1.0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fresh corruption each epoch supplies the DAE's stochastic noise; a
        // frozen corruption reuses the epoch-0 stream.
        const std::uint64_t rej_epoch = cfg.freeze_corruption ? 0 : epoch;
        Rng rej_rng(derive_seed(cfg.seed, "rejuvenation." + std::to_string(rej_epoch)));
        std::vector<std::vector<double>> cold_normalized(warm_vectors.size());
        for (std::size_t m : fit_users)
            cold_normalized[m] = normalize_ratings(
                rejuvenate::apply(warm_vectors[m], rej_cfg, rej_rng), cfg.rating_scale);

        std::vector<std::size_t> order = fit_users;
        shuffle_rng.shuffle(order);

        double epoch_d = 0.0, epoch_g = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<std::vector<double>> real_batch, cold_batch;
            std::vector<const data::RelevanceVector*> rel_batch;
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t m = order[i];
                real_batch.push_back(warm_normalized[m]);
                cold_batch.push_back(cold_normalized[m]);
                rel_batch.push_back(&relevance[m]);
            }

            double batch_d = 0.0;
            for (std::size_t s = 0; s < cfg.d_steps_per_g_step; ++s) {
                std::vector<std::vector<double>> fake_batch;
                fake_batch.reserve(cold_batch.size());
                for (const auto& c : cold_batch)
                    fake_batch.push_back(generate(model.generator, c));
                batch_d = train_step_d(model, real_batch, fake_batch);
            }
            const double batch_g = train_step_g(model, cold_batch, rel_batch,
                                                cfg.relevant_loss_weight,
                                                cfg.log_adversarial);
            if (!std::isfinite(batch_d) || !std::isfinite(batch_g))
                throw NumericError("train: non-finite loss at epoch " +
                                   std::to_string(epoch) + " batch " +
                                   std::to_string(n_batches) + " (d=" +
                                   std::to_string(batch_d) + " g=" +
                                   std::to_string(batch_g) + ")");
            epoch_d += batch_d;
            epoch_g += batch_g;
            ++n_batches;
        }

        double val_p5 = 0.0;
        if (!val_users.empty()) {
            try {
                const eval::MetricsReport r =
                    eval::evaluate(generator_scorer(model.generator, cfg.rating_scale),
                                   warm_vectors, val_users, val_protocol);
                val_p5 = r.means.at(5).precision;
            } catch (const DataError&) {
                val_p5 = 0.0;  // every validation user excluded
            }
        }

        model.history.push_back({epoch, epoch_d / static_cast<double>(n_batches),
                                 epoch_g / static_cast<double>(n_batches), val_p5});

        if (val_users.empty()) continue;
        if (val_p5 > best_val) {
            best_val = val_p5;
            best.generator = model.generator;
            best.discriminator = model.discriminator;
            best.g_opt = model.g_opt;
            best.d_opt = model.d_opt;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    if (val_users.empty()) return model;
    best.history = model.history;
    return best;
}

}  // namespace coldgan::gan
