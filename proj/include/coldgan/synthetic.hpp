#pragma once

#include <cstdint>

#include "coldgan/data.hpp"

namespace coldgan::synthetic {

// Planted-structure corpus: items are partitioned into clusters, each with a
// small "loved" set; every user belongs to one cluster, rates a few filler
// items first (the cold-start fingerprint), then the cluster's loved items
// high and more filler at the base rating. Relevance under the above-mean
// rule is exactly the loved set, so recoverable structure is known a priori.
struct ClusterDatasetConfig {
    std::size_t n_users = 50;
    std::size_t n_items = 30;
    std::size_t n_clusters = 2;
    std::size_t loved_per_cluster = 5;
    std::size_t early_filler = 2;  // earliest-rated items, kept by cold_input
    std::size_t late_filler = 6;
    double loved_rating = 5.0;
    double filler_rating = 3.0;
    std::uint64_t seed = 1;
};

data::InteractionLog planted_clusters(const ClusterDatasetConfig& cfg);

}  // namespace coldgan::synthetic
