#include "coldgan/synthetic.hpp"

#include <sstream>

#include "coldgan/errors.hpp"
#include "coldgan/rng.hpp"

namespace coldgan::synthetic {

data::InteractionLog planted_clusters(const ClusterDatasetConfig& cfg) {
    if (cfg.n_clusters == 0 || cfg.n_items % cfg.n_clusters != 0)
        throw ConfigError("planted_clusters: n_items must divide evenly into clusters");
    const std::size_t per_cluster = cfg.n_items / cfg.n_clusters;
    if (cfg.loved_per_cluster + cfg.early_filler + cfg.late_filler > per_cluster)
        throw ConfigError("planted_clusters: cluster too small for requested item counts");

    Rng rng(cfg.seed);
    std::ostringstream text;
    // A catalog user rating everything once pins the item vocabulary to the
    // full catalog in index order ("i<j>" gets item index j).
    for (std::size_t j = 0; j < cfg.n_items; ++j)
        text << "ucatalog,i" << j << "," << cfg.filler_rating << "," << j << "\n";

    for (std::size_t m = 0; m < cfg.n_users; ++m) {
        const std::size_t cluster = m % cfg.n_clusters;
        const std::size_t base = cluster * per_cluster;

        std::vector<std::size_t> filler;
        for (std::size_t j = base + cfg.loved_per_cluster; j < base + per_cluster; ++j)
            filler.push_back(j);
        rng.shuffle(filler);

        std::int64_t ts = static_cast<std::int64_t>(m + 1) * 100000;
        auto emit = [&](std::size_t item, double rating) {
            text << "u" << m << ",i" << item << "," << rating << "," << ts++ << "\n";
        };
        for (std::size_t i = 0; i < cfg.early_filler; ++i) emit(filler[i], cfg.filler_rating);
        for (std::size_t i = 0; i < cfg.loved_per_cluster; ++i)
            emit(base + i, cfg.loved_rating);
        for (std::size_t i = 0; i < cfg.late_filler; ++i)
            emit(filler[cfg.early_filler + i], cfg.filler_rating);
    }
    std::istringstream in(text.str());
    return data::parse_csv_ratings(in);
}

}  // namespace coldgan::synthetic
