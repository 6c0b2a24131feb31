#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "coldgan/data.hpp"

namespace coldgan::eval {

// Scores every item given a cold-start rating vector. Generator-backed,
// popularity-backed, and random scorers all go through the same path.
using Scorer = std::function<std::vector<double>(const data::RatingVector& cold)>;

struct RecommendationList {
    std::size_t user = 0;
    std::vector<std::size_t> items;   // ranked, cold-input items excluded
    std::vector<double> scores;       // aligned, non-increasing
};

// Rank all items by score descending (ties by ascending item index), mask out
// the cold input's support, return the top k. Throws DataError when k exceeds
// the maskable pool.
RecommendationList recommend(const std::vector<double>& scores,
                             const data::RatingVector& cold, std::size_t k,
                             std::size_t user = 0);

double precision_at_k(const std::vector<std::size_t>& ranked,
                      const std::unordered_set<std::size_t>& relevant, std::size_t k);
double recall_at_k(const std::vector<std::size_t>& ranked,
                   const std::unordered_set<std::size_t>& relevant, std::size_t k);
// Binary gains, log2(p+1) discount, IDCG over min(|relevant|, k) positions.
double ndcg_at_k(const std::vector<std::size_t>& ranked,
                 const std::unordered_set<std::size_t>& relevant, std::size_t k);

struct MetricsRow {
    double precision = 0.0;
    double recall = 0.0;
    double ndcg = 0.0;
};

struct PerUserMetrics {
    std::size_t user = 0;
    std::size_t k = 0;
    MetricsRow metrics;
};

struct MetricsReport {
    std::map<std::size_t, MetricsRow> means;  // k -> averaged metrics
    std::size_t evaluated = 0;
    std::size_t excluded = 0;  // users whose held-out relevant set is empty
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<PerUserMetrics> per_user;  // filled only when requested

    std::string to_json() const;
    std::string to_table() const;
    std::string per_user_csv() const;
};

struct EvalProtocol {
    std::size_t cold_keep = 10;
    std::vector<std::size_t> ks = {5, 10};
    bool keep_per_user = false;
};

// Cold-start evaluation protocol: per test user, cold input = keep earliest
// ratings, relevant set = above-mean items of the full warm vector minus the
// cold input; users with an empty relevant set are excluded from the means.
MetricsReport evaluate(const Scorer& scorer,
                       const std::vector<data::RatingVector>& warm_vectors,
                       const std::vector<std::size_t>& test_users,
                       const EvalProtocol& protocol);

// Scores every item by its rating count over the train cohort.
Scorer popularity_baseline(const std::vector<data::RatingVector>& warm_vectors,
                           const std::vector<std::size_t>& train_users);

// Analytic expectation of P@k for a uniformly random recommender under the
// same protocol: mean over evaluated users of |relevant| / (N - |cold|).
double random_baseline_p_at_k(const std::vector<data::RatingVector>& warm_vectors,
                              const std::vector<std::size_t>& test_users,
                              const EvalProtocol& protocol);

}  // namespace coldgan::eval
