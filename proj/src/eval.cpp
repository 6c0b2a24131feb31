#include "coldgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "coldgan/errors.hpp"

namespace coldgan::eval {

RecommendationList recommend(const std::vector<double>& scores,
                             const data::RatingVector& cold, std::size_t k,
                             std::size_t user) {
    if (k < 1) throw ConfigError("recommend: k must be >= 1");
    if (scores.size() != cold.values.size())
        throw DataError("recommend: score/vector length mismatch");

    std::vector<std::size_t> pool;
    pool.reserve(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j)
        if (cold.values[j] == 0.0) pool.push_back(j);
    if (k > pool.size())
        throw DataError("recommend: k=" + std::to_string(k) + " exceeds maskable pool of " +
                        std::to_string(pool.size()));

    // Score descending, ties by ascending item index.
    std::partial_sort(pool.begin(), pool.begin() + k, pool.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });

    RecommendationList recs;
    recs.user = user;
    recs.items.assign(pool.begin(), pool.begin() + k);
    recs.scores.reserve(k);
    for (std::size_t j : recs.items) recs.scores.push_back(scores[j]);
    return recs;
}

namespace {

std::size_t hits_at_k(const std::vector<std::size_t>& ranked,
                      const std::unordered_set<std::size_t>& relevant, std::size_t k) {
    std::size_t hits = 0;
    const std::size_t top = std::min(k, ranked.size());
    for (std::size_t p = 0; p < top; ++p) hits += relevant.count(ranked[p]);
    return hits;
}

}  // namespace

double precision_at_k(const std::vector<std::size_t>& ranked,
                      const std::unordered_set<std::size_t>& relevant, std::size_t k) {
    if (k < 1) throw ConfigError("precision_at_k: k must be >= 1");
    return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(const std::vector<std::size_t>& ranked,
                   const std::unordered_set<std::size_t>& relevant, std::size_t k) {
    if (relevant.empty()) throw DataError("recall_at_k: empty relevant set");
    return static_cast<double>(hits_at_k(ranked, relevant, k)) /
           static_cast<double>(relevant.size());
}

double ndcg_at_k(const std::vector<std::size_t>& ranked,
                 const std::unordered_set<std::size_t>& relevant, std::size_t k) {
    if (relevant.empty()) throw DataError("ndcg_at_k: empty relevant set");
    double dcg = 0.0;
    const std::size_t top = std::min(k, ranked.size());
    for (std::size_t p = 0; p < top; ++p)
        if (relevant.count(ranked[p])) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    double idcg = 0.0;
    const std::size_t ideal = std::min(relevant.size(), k);
    for (std::size_t p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    return dcg / idcg;
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["evaluated_users"] = evaluated;
    j["excluded_users"] = excluded;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    for (const auto& [k, row] : means) {
        nlohmann::json r;
        r["precision"] = row.precision;
        r["recall"] = row.recall;
        r["ndcg"] = row.ndcg;
        j["metrics"]["k=" + std::to_string(k)] = r;
    }
    return j.dump(2);
}

std::string MetricsReport::to_table() const {
    std::ostringstream os;
    os << "  k  precision     recall       ndcg\n";
    char buf[96];
    for (const auto& [k, row] : means) {
        std::snprintf(buf, sizeof(buf), "%3zu  %9.4f  %9.4f  %9.4f\n", k, row.precision,
                      row.recall, row.ndcg);
        os << buf;
    }
    os << "evaluated=" << evaluated << " excluded=" << excluded << "\n";
    return os.str();
}

std::string MetricsReport::per_user_csv() const {
    std::ostringstream os;
    os << "user,k,p,r,ndcg\n";
    char buf[128];
    for (const auto& pu : per_user) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f,%.6f,%.6f\n", pu.user, pu.k,
                      pu.metrics.precision, pu.metrics.recall, pu.metrics.ndcg);
        os << buf;
    }
    return os.str();
}

namespace {

std::unordered_set<std::size_t> held_out_relevant(const data::RatingVector& warm,
                                                  const data::RatingVector& cold) {
    const data::RelevanceVector rel = data::relevance_vector(warm);
    std::unordered_set<std::size_t> out;
    for (std::size_t j = 0; j < rel.bits.size(); ++j)
        if (rel.bits[j] && cold.values[j] == 0.0) out.insert(j);
    return out;
}

}  // namespace

MetricsReport evaluate(const Scorer& scorer,
                       const std::vector<data::RatingVector>& warm_vectors,
                       const std::vector<std::size_t>& test_users,
                       const EvalProtocol& protocol) {
    if (test_users.empty()) throw DataError("evaluate: empty test cohort");
    if (protocol.ks.empty()) throw ConfigError("evaluate: no k values");
    const std::size_t max_k = *std::max_element(protocol.ks.begin(), protocol.ks.end());

    MetricsReport report;
    std::map<std::size_t, MetricsRow> sums;
    for (std::size_t k : protocol.ks) sums[k] = {};

    for (std::size_t m : test_users) {
        const data::RatingVector& warm = warm_vectors[m];
        if (warm.count() == 0) {
            ++report.excluded;
            continue;
        }
        const data::RatingVector cold = data::cold_input(warm, protocol.cold_keep);
        const auto relevant = held_out_relevant(warm, cold);
        if (relevant.empty()) {
            ++report.excluded;
            continue;
        }
        const RecommendationList recs = recommend(scorer(cold), cold, max_k, m);
        ++report.evaluated;
        for (std::size_t k : protocol.ks) {
            MetricsRow row;
            row.precision = precision_at_k(recs.items, relevant, k);
            row.recall = recall_at_k(recs.items, relevant, k);
            row.ndcg = ndcg_at_k(recs.items, relevant, k);
            sums[k].precision += row.precision;
            sums[k].recall += row.recall;
            sums[k].ndcg += row.ndcg;
            if (protocol.keep_per_user) report.per_user.push_back({m, k, row});
        }
    }
    if (report.evaluated == 0)
        throw DataError("evaluate: zero evaluated users (" + std::to_string(report.excluded) +
                        " excluded for empty relevant sets)");
    const double n = static_cast<double>(report.evaluated);
    for (auto& [k, row] : sums)
        report.means[k] = {row.precision / n, row.recall / n, row.ndcg / n};
    return report;
}

Scorer popularity_baseline(const std::vector<data::RatingVector>& warm_vectors,
                           const std::vector<std::size_t>& train_users) {
    std::vector<double> counts;
    for (std::size_t m : train_users) {
        const auto& w = warm_vectors[m];
        if (counts.empty()) counts.assign(w.values.size(), 0.0);
        for (std::size_t j : w.rated_order) counts[j] += 1.0;
    }
    return [counts](const data::RatingVector&) { return counts; };
}

double random_baseline_p_at_k(const std::vector<data::RatingVector>& warm_vectors,
                              const std::vector<std::size_t>& test_users,
                              const EvalProtocol& protocol) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t m : test_users) {
        const data::RatingVector& warm = warm_vectors[m];
        if (warm.count() == 0) continue;
        const data::RatingVector cold = data::cold_input(warm, protocol.cold_keep);
        const auto relevant = held_out_relevant(warm, cold);
        if (relevant.empty()) continue;
        const double pool = static_cast<double>(warm.values.size() - cold.count());
        acc += static_cast<double>(relevant.size()) / pool;
        ++n;
    }
    if (n == 0) throw DataError("random_baseline_p_at_k: zero evaluated users");
    return acc / static_cast<double>(n);
}

}  // namespace coldgan::eval
