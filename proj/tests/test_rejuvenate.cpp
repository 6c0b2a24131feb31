#include <doctest.h>

#include <cmath>

#include "coldgan/errors.hpp"
#include "coldgan/rejuvenate.hpp"

using namespace coldgan::rejuvenate;
using coldgan::ConfigError;
using coldgan::DataError;
using coldgan::Rng;
namespace data = coldgan::data;

namespace {

data::RatingVector dense_vector(std::size_t count, std::size_t n = 0) {
    data::RatingVector w;
    if (n == 0) n = count;
    w.values.assign(n, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        w.values[j] = 3.0;
        w.rated_order.push_back(j);
    }
    return w;
}

}  // namespace

TEST_CASE("retention_probability") {
    SUBCASE("rank 0 equals p_max") {
        RejuvenationConfig cfg{.p_min = 0.1, .p_max = 0.9, .alpha = 2.0};
        CHECK(retention_probability(0, 1, cfg) == doctest::Approx(0.9));
        CHECK(retention_probability(0, 1000, cfg) == doctest::Approx(0.9));
    }
    SUBCASE("midpoint value") {
        RejuvenationConfig cfg{.p_min = 0.2, .p_max = 1.0, .alpha = 2.0};
        CHECK(retention_probability(5, 10, cfg) ==
              doctest::Approx(0.2 + 0.8 * std::exp(-1.0)).epsilon(1e-9));
        CHECK(retention_probability(5, 10, cfg) == doctest::Approx(0.49430).epsilon(1e-4));
    }
    SUBCASE("strictly decreasing in rank") {
        RejuvenationConfig cfg{.p_min = 0.1, .p_max = 0.9, .alpha = 2.0};
        for (std::size_t i = 0; i + 1 < 50; ++i)
            CHECK(retention_probability(i + 1, 50, cfg) < retention_probability(i, 50, cfg));
    }
    SUBCASE("domain errors") {
        RejuvenationConfig cfg;
        CHECK_THROWS_AS(retention_probability(5, 5, cfg), DataError);
        CHECK_THROWS_AS(retention_probability(0, 0, cfg), DataError);
    }
    SUBCASE("config validation") {
        RejuvenationConfig bad{.p_min = 0.9, .p_max = 0.1};
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        RejuvenationConfig bad_alpha{.p_min = 0.1, .p_max = 0.9, .alpha = 0.0};
        CHECK_THROWS_AS(bad_alpha.validate(), ConfigError);
    }
}

TEST_CASE("rejuvenate") {
    SUBCASE("keep probability ~1 returns the input") {
        RejuvenationConfig cfg{.p_min = 1.0 - 1e-12, .p_max = 1.0, .alpha = 1e-9};
        Rng rng(1);
        const data::RatingVector w = dense_vector(20);
        const data::RatingVector c = rejuvenate(w, cfg, rng);
        CHECK(c.values == w.values);
        CHECK(c.rated_order == w.rated_order);
    }
    SUBCASE("all draws failing force-keeps the earliest entry") {
        RejuvenationConfig cfg{.p_min = 0.0, .p_max = 1e-12, .alpha = 1.0};
        Rng rng(2);
        data::RatingVector w = dense_vector(10);
        w.rated_order = {7, 3, 0, 1, 2, 4, 5, 6, 8, 9};  // earliest is item 7
        const data::RatingVector c = rejuvenate(w, cfg, rng);
        CHECK(c.rated_order == std::vector<std::size_t>{7});
        CHECK(c.values[7] == 3.0);
    }
    SUBCASE("empty input rejected") {
        data::RatingVector empty;
        empty.values.assign(5, 0.0);
        RejuvenationConfig cfg;
        Rng rng(3);
        CHECK_THROWS_AS(rejuvenate(empty, cfg, rng), DataError);
    }
    SUBCASE("deterministic per seed") {
        RejuvenationConfig cfg;
        const data::RatingVector w = dense_vector(100);
        Rng a(42), b(42), c(43);
        CHECK(rejuvenate(w, cfg, a).rated_order == rejuvenate(w, cfg, b).rated_order);
        Rng a2(42);
        CHECK(rejuvenate(w, cfg, a2).rated_order != rejuvenate(w, cfg, c).rated_order);
    }
    SUBCASE("output support is a nonempty subset with unchanged values") {
        RejuvenationConfig cfg{.p_min = 0.05, .p_max = 0.5, .alpha = 3.0};
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            data::RatingVector w = dense_vector(1 + rng.below(40), 60);
            for (std::size_t j : w.rated_order)
                w.values[j] = 1.0 + static_cast<double>(rng.below(5));
            const data::RatingVector c = rejuvenate(w, cfg, rng);
            CHECK(c.count() >= 1);
            CHECK(c.count() <= w.count());
            for (std::size_t j : c.rated_order) CHECK(c.values[j] == w.values[j]);
            // kept order is a subsequence of the input order
            std::size_t pos = 0;
            for (std::size_t j : w.rated_order)
                if (pos < c.rated_order.size() && c.rated_order[pos] == j) ++pos;
            CHECK(pos == c.rated_order.size());
        }
    }
    SUBCASE("empirical per-rank retention tracks the closed form") {
        RejuvenationConfig cfg{.p_min = 0.1, .p_max = 0.9, .alpha = 2.0};
        const std::size_t count = 50;
        const int trials = 20000;
        const data::RatingVector w = dense_vector(count);
        std::vector<double> kept(count, 0.0);
        Rng rng(11);
        for (int t = 0; t < trials; ++t) {
            const data::RatingVector c = rejuvenate(w, cfg, rng);
            for (std::size_t j : c.rated_order) kept[j] += 1.0;
        }
        for (std::size_t i = 0; i < count; ++i) {
            const double expected = retention_probability(i, count, cfg);
            CHECK(std::abs(kept[i] / trials - expected) < 0.02);
        }
    }
}

TEST_CASE("rejuvenate_random") {
    SUBCASE("keep prob 1 is the identity") {
        RejuvenationConfig cfg{.random_keep_prob = 1.0};
        Rng rng(1);
        const data::RatingVector w = dense_vector(30);
        const data::RatingVector c = rejuvenate_random(w, cfg, rng);
        CHECK(c.values == w.values);
    }
    SUBCASE("kept count within 3 sigma of Binomial(1000, 0.5)") {
        RejuvenationConfig cfg{.random_keep_prob = 0.5};
        Rng rng(5);
        const data::RatingVector w = dense_vector(1000);
        const data::RatingVector c = rejuvenate_random(w, cfg, rng);
        const double sigma = std::sqrt(1000 * 0.5 * 0.5);
        CHECK(std::abs(static_cast<double>(c.count()) - 500.0) < 3.0 * sigma);
    }
    SUBCASE("single entry always survives") {
        RejuvenationConfig cfg{.random_keep_prob = 1e-12};
        // Mode-level keep prob of ~0 still returns the forced earliest entry.
        Rng rng(6);
        const data::RatingVector w = dense_vector(1);
        const data::RatingVector c = rejuvenate_random(w, cfg, rng);
        CHECK(c.rated_order == w.rated_order);
    }
}

TEST_CASE("apply dispatches on mode") {
    const data::RatingVector w = dense_vector(40);
    RejuvenationConfig cfg{.p_min = 0.1, .p_max = 0.9, .alpha = 2.0,
                           .mode = Mode::time_based, .random_keep_prob = 0.3};
    Rng a(9), b(9);
    CHECK(apply(w, cfg, a).rated_order == rejuvenate(w, cfg, b).rated_order);
    cfg.mode = Mode::random_uniform;
    Rng c(9), d(9);
    CHECK(apply(w, cfg, c).rated_order == rejuvenate_random(w, cfg, d).rated_order);
}

TEST_CASE("alpha -> 0 limit matches uniform dropout at p_max (marginals)") {
    // Same seed schedule, per-rank marginals agree within Monte Carlo noise.
    const std::size_t count = 30;
    const int trials = 20000;
    const data::RatingVector w = dense_vector(count);
    RejuvenationConfig time_cfg{.p_min = 0.0, .p_max = 0.7, .alpha = 1e-9};
    RejuvenationConfig rand_cfg{.random_keep_prob = 0.7};
    std::vector<double> kept_time(count, 0.0), kept_rand(count, 0.0);
    Rng rng_a(21), rng_b(21);
    for (int t = 0; t < trials; ++t) {
        for (std::size_t j : rejuvenate(w, time_cfg, rng_a).rated_order) kept_time[j] += 1.0;
        for (std::size_t j : rejuvenate_random(w, rand_cfg, rng_b).rated_order)
            kept_rand[j] += 1.0;
    }
    for (std::size_t i = 0; i < count; ++i)
        CHECK(std::abs(kept_time[i] - kept_rand[i]) / trials < 0.02);
}
