#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace coldgan::data {

struct Interaction {
    std::string user_id;
    std::string item_id;
    double rating = 0.0;       // [1, 5]
    std::int64_t timestamp = 0;
};

// The raw corpus: interaction records plus contiguous id<->index vocabularies.
// Duplicate (user, item) pairs collapse to the latest timestamp at ingestion.
struct InteractionLog {
    std::vector<Interaction> interactions;
    std::unordered_map<std::string, std::size_t> user_vocab;
    std::unordered_map<std::string, std::size_t> item_vocab;
    std::vector<std::string> user_ids;  // index -> id
    std::vector<std::string> item_ids;

    std::size_t num_users() const { return user_ids.size(); }
    std::size_t num_items() const { return item_ids.size(); }

    double sparsity() const;
};

// Dense length-N rating vector; 0 means unrated. rated_order holds the rated
// item indices in ascending (timestamp, item index) order.
struct RatingVector {
    std::vector<double> values;
    std::vector<std::size_t> rated_order;

    std::size_t count() const { return rated_order.size(); }
};

struct RelevanceVector {
    std::vector<std::uint8_t> bits;

    std::size_t count() const;
};

struct DatasetSplit {
    std::vector<std::size_t> train_users;
    std::vector<std::size_t> test_users;
    std::uint64_t seed = 0;
};

// MovieLens format: UserID::MovieID::Rating::Timestamp, one per line.
InteractionLog parse_movielens(std::istream& in);
// CSV format: user,item,rating,timestamp with an optional header line.
InteractionLog parse_csv_ratings(std::istream& in);

// Canonical internal dump: "#users=M items=N" header, then
// user_index<TAB>item_index<TAB>rating<TAB>timestamp lines.
void write_canonical(const InteractionLog& log, std::ostream& out);
InteractionLog parse_canonical(std::istream& in);

void write_movielens(const InteractionLog& log, std::ostream& out);
void write_csv_ratings(const InteractionLog& log, std::ostream& out);

// Single pass: drop users below min_user_interactions, then items below
// min_item_raters (counted over the user-filtered log); rebuild vocabularies.
InteractionLog filter_sparse(const InteractionLog& log,
                             std::size_t min_user_interactions = 15,
                             std::size_t min_item_raters = 3);

// Seeded shuffle of user indices; first floor(train_fraction * M) are train.
DatasetSplit split_users(const InteractionLog& log, double train_fraction,
                         std::uint64_t seed);

RatingVector build_rating_vector(const InteractionLog& log, std::size_t user_index);

// Vectors for all M users in one pass over the log.
std::vector<RatingVector> build_all_rating_vectors(const InteractionLog& log);

// Keep the min(keep, count) earliest-rated entries, zero the rest.
RatingVector cold_input(const RatingVector& w, std::size_t keep = 10);

// bits[j] = 1 iff rated and strictly above the user's mean rating.
RelevanceVector relevance_vector(const RatingVector& w);

}  // namespace coldgan::data
