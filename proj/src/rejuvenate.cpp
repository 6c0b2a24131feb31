#include "coldgan/rejuvenate.hpp"

#include <cmath>

#include "coldgan/errors.hpp"

namespace coldgan::rejuvenate {

Mode mode_from_string(const std::string& s) {
    if (s == "time_based") return Mode::time_based;
    if (s == "random_uniform") return Mode::random_uniform;
    throw ConfigError("unknown rejuvenation mode: " + s);
}

std::string to_string(Mode m) {
    return m == Mode::time_based ? "time_based" : "random_uniform";
}

void RejuvenationConfig::validate() const {
    if (!(0.0 <= p_min && p_min < p_max && p_max <= 1.0))
        throw ConfigError("rejuvenation: need 0 <= p_min < p_max <= 1");
    if (!(alpha > 0.0)) throw ConfigError("rejuvenation: alpha must be > 0");
    if (!(random_keep_prob > 0.0 && random_keep_prob <= 1.0))
        throw ConfigError("rejuvenation: random_keep_prob must be in (0, 1]");
}

double retention_probability(std::size_t rank, std::size_t count,
                             const RejuvenationConfig& cfg) {
    cfg.validate();
    if (count == 0 || rank >= count)
        throw DataError("retention_probability: rank " + std::to_string(rank) +
                        " out of range for count " + std::to_string(count));
    const double x = static_cast<double>(rank) / static_cast<double>(count);
    return cfg.p_min + (cfg.p_max - cfg.p_min) * std::exp(-cfg.alpha * x);
}

namespace {

template <typename KeepProb>
data::RatingVector drop_entries(const data::RatingVector& w, Rng& rng, KeepProb keep_prob) {
    if (w.count() == 0) throw DataError("rejuvenate: empty rating vector");

    data::RatingVector c;
    c.values.assign(w.values.size(), 0.0);
    for (std::size_t i = 0; i < w.rated_order.size(); ++i) {
        if (rng.bernoulli(keep_prob(i))) {
            const std::size_t j = w.rated_order[i];
            c.rated_order.push_back(j);
            c.values[j] = w.values[j];
        }
    }
    if (c.rated_order.empty()) {
        // All dropped: force-keep the earliest-rated entry.
        const std::size_t j = w.rated_order.front();
        c.rated_order.push_back(j);
        c.values[j] = w.values[j];
    }
    return c;
}

}  // namespace

data::RatingVector rejuvenate(const data::RatingVector& w, const RejuvenationConfig& cfg,
                              Rng& rng) {
    cfg.validate();
    const std::size_t count = w.count();
    return drop_entries(w, rng,
                        [&](std::size_t i) { return retention_probability(i, count, cfg); });
}

data::RatingVector rejuvenate_random(const data::RatingVector& w,
                                     const RejuvenationConfig& cfg, Rng& rng) {
    cfg.validate();
    return drop_entries(w, rng, [&](std::size_t) { return cfg.random_keep_prob; });
}

data::RatingVector apply(const data::RatingVector& w, const RejuvenationConfig& cfg, Rng& rng) {
    return cfg.mode == Mode::time_based ? rejuvenate(w, cfg, rng)
                                        : rejuvenate_random(w, cfg, rng);
}

}  // namespace coldgan::rejuvenate
