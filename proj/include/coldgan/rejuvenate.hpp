#pragma once

#include <string>

#include "coldgan/data.hpp"
#include "coldgan/rng.hpp"

namespace coldgan::rejuvenate {

enum class Mode { time_based, random_uniform };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct RejuvenationConfig {
    double p_min = 0.1;
    double p_max = 0.9;
    double alpha = 2.0;
    Mode mode = Mode::time_based;
    double random_keep_prob = 0.5;  // random_uniform mode only

    void validate() const;  // 0 <= p_min < p_max <= 1, alpha > 0, 0 < keep prob <= 1
};

// Time-decayed retention probability for the item with 0-based rank i in
// ascending-timestamp order: p_min + (p_max - p_min) * exp(-alpha * i / count).
// The earliest-rated item (i = 0) has the highest retention.
double retention_probability(std::size_t rank, std::size_t count,
                             const RejuvenationConfig& cfg);

// Corrupt a warm vector into a simulated cold-start state by independent
// per-rank Bernoulli retention draws. If every entry is dropped, the
// earliest-rated entry is force-kept.
data::RatingVector rejuvenate(const data::RatingVector& w, const RejuvenationConfig& cfg,
                              Rng& rng);

// Uniform-dropout ablation variant: constant keep probability for every rank.
data::RatingVector rejuvenate_random(const data::RatingVector& w,
                                     const RejuvenationConfig& cfg, Rng& rng);

// Dispatch on cfg.mode.
data::RatingVector apply(const data::RatingVector& w, const RejuvenationConfig& cfg, Rng& rng);

}  // namespace coldgan::rejuvenate
