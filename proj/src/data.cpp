#include "coldgan/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "coldgan/errors.hpp"
#include "coldgan/rng.hpp"

namespace coldgan::data {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_rating(const std::string& field, std::size_t line_no) {
    double r = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), r);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(line_no, "bad rating field '" + field + "'");
    if (r < 1.0 || r > 5.0)
        throw DataError("line " + std::to_string(line_no) + ": rating " + field +
                        " outside scale [1,5]");
    return r;
}

std::int64_t parse_timestamp(const std::string& field, std::size_t line_no) {
    std::int64_t t = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(line_no, "bad timestamp field '" + field + "'");
    if (t < 0) throw DataError("line " + std::to_string(line_no) + ": negative timestamp");
    return t;
}

bool is_numeric_field(const std::string& s) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string> split_on(const std::string& line, const std::string& delim) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(delim, pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + delim.size();
    }
    return fields;
}

// Assign vocabulary indices in first-appearance order and collapse duplicate
// (user, item) pairs to the latest timestamp.
InteractionLog finalize(std::vector<Interaction> raw) {
    InteractionLog log;
    std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> seen;
    for (auto& it : raw) {
        if (!log.user_vocab.contains(it.user_id)) {
            log.user_vocab.emplace(it.user_id, log.user_ids.size());
            log.user_ids.push_back(it.user_id);
        }
        if (!log.item_vocab.contains(it.item_id)) {
            log.item_vocab.emplace(it.item_id, log.item_ids.size());
            log.item_ids.push_back(it.item_id);
        }
        auto& per_user = seen[it.user_id];
        auto found = per_user.find(it.item_id);
        if (found == per_user.end()) {
            per_user.emplace(it.item_id, log.interactions.size());
            log.interactions.push_back(std::move(it));
        } else if (it.timestamp >= log.interactions[found->second].timestamp) {
            log.interactions[found->second] = std::move(it);
        }
    }
    return log;
}

}  // namespace

double InteractionLog::sparsity() const {
    if (num_users() == 0 || num_items() == 0) return 0.0;
    return 1.0 - static_cast<double>(interactions.size()) /
                     (static_cast<double>(num_users()) * static_cast<double>(num_items()));
}

std::size_t RelevanceVector::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

InteractionLog parse_movielens(std::istream& in) {
    std::vector<Interaction> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_on(line, "::");
        if (fields.size() != 4)
            throw ParseError(line_no, "expected UserID::MovieID::Rating::Timestamp");
        raw.push_back({fields[0], fields[1], parse_rating(fields[2], line_no),
                       parse_timestamp(fields[3], line_no)});
    }
    return finalize(std::move(raw));
}

InteractionLog parse_csv_ratings(std::istream& in) {
    std::vector<Interaction> raw;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_on(line, ",");
        if (fields.size() != 4) throw ParseError(line_no, "expected user,item,rating,timestamp");
        if (first && !is_numeric_field(fields[2])) {
            first = false;  // header line
            continue;
        }
        first = false;
        raw.push_back({fields[0], fields[1], parse_rating(fields[2], line_no),
                       parse_timestamp(fields[3], line_no)});
    }
    return finalize(std::move(raw));
}

namespace {

std::string format_rating(double r) {
    // Integral ratings print without a decimal point so round-trips are exact.
    if (r == std::floor(r)) return std::to_string(static_cast<long long>(r));
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace

void write_movielens(const InteractionLog& log, std::ostream& out) {
    for (const auto& it : log.interactions)
        out << it.user_id << "::" << it.item_id << "::" << format_rating(it.rating)
            << "::" << it.timestamp << "\n";
}

void write_csv_ratings(const InteractionLog& log, std::ostream& out) {
    for (const auto& it : log.interactions)
        out << it.user_id << "," << it.item_id << "," << format_rating(it.rating) << ","
            << it.timestamp << "\n";
}

void write_canonical(const InteractionLog& log, std::ostream& out) {
    out << "#users=" << log.num_users() << " items=" << log.num_items() << "\n";
    for (const auto& it : log.interactions)
        out << log.user_vocab.at(it.user_id) << "\t" << log.item_vocab.at(it.item_id) << "\t"
            << format_rating(it.rating) << "\t" << it.timestamp << "\n";
}

InteractionLog parse_canonical(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) return {};
    header = strip_cr(header);
    std::size_t users = 0, items = 0;
    if (std::sscanf(header.c_str(), "#users=%zu items=%zu", &users, &items) != 2)
        throw ParseError(1, "bad canonical header '" + header + "'");

    std::vector<Interaction> raw;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_on(line, "\t");
        if (fields.size() != 4) throw ParseError(line_no, "expected 4 tab-separated fields");
        raw.push_back({fields[0], fields[1], parse_rating(fields[2], line_no),
                       parse_timestamp(fields[3], line_no)});
    }
    InteractionLog log = finalize(std::move(raw));
    if (log.num_users() != users || log.num_items() != items)
        throw DataError("canonical dump header disagrees with body (" +
                        std::to_string(log.num_users()) + "/" +
                        std::to_string(log.num_items()) + " vs header " +
                        std::to_string(users) + "/" + std::to_string(items) + ")");
    return log;
}

InteractionLog filter_sparse(const InteractionLog& log, std::size_t min_user_interactions,
                             std::size_t min_item_raters) {
    if (min_user_interactions < 1 || min_item_raters < 1)
        throw ConfigError("filter_sparse: thresholds must be >= 1");

    std::unordered_map<std::string, std::size_t> user_counts;
    for (const auto& it : log.interactions) ++user_counts[it.user_id];

    std::unordered_map<std::string, std::size_t> item_counts;
    for (const auto& it : log.interactions)
        if (user_counts[it.user_id] >= min_user_interactions) ++item_counts[it.item_id];

    std::vector<Interaction> kept;
    for (const auto& it : log.interactions)
        if (user_counts[it.user_id] >= min_user_interactions &&
            item_counts[it.item_id] >= min_item_raters)
            kept.push_back(it);
    return finalize(std::move(kept));
}

DatasetSplit split_users(const InteractionLog& log, double train_fraction, std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("split_users: train_fraction must be in (0, 1)");
    if (log.num_users() == 0) throw DataError("split_users: empty dataset");

    std::vector<std::size_t> order(log.num_users());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(log.num_users())));
    DatasetSplit split;
    split.seed = seed;
    split.train_users.assign(order.begin(), order.begin() + n_train);
    split.test_users.assign(order.begin() + n_train, order.end());
    return split;
}

RatingVector build_rating_vector(const InteractionLog& log, std::size_t user_index) {
    if (user_index >= log.num_users())
        throw DataError("build_rating_vector: unknown user index " + std::to_string(user_index));
    const std::string& uid = log.user_ids[user_index];

    RatingVector w;
    w.values.assign(log.num_items(), 0.0);
    std::vector<std::pair<std::int64_t, std::size_t>> order;  // (timestamp, item index)
    for (const auto& it : log.interactions) {
        if (it.user_id != uid) continue;
        const std::size_t j = log.item_vocab.at(it.item_id);
        w.values[j] = it.rating;
        order.emplace_back(it.timestamp, j);
    }
    std::sort(order.begin(), order.end());
    w.rated_order.reserve(order.size());
    for (const auto& [ts, j] : order) w.rated_order.push_back(j);
    return w;
}

std::vector<RatingVector> build_all_rating_vectors(const InteractionLog& log) {
    const std::size_t n_items = log.num_items();
    std::vector<RatingVector> vectors(log.num_users());
    std::vector<std::vector<std::pair<std::int64_t, std::size_t>>> orders(log.num_users());
    for (auto& w : vectors) w.values.assign(n_items, 0.0);

    for (const auto& it : log.interactions) {
        const std::size_t m = log.user_vocab.at(it.user_id);
        const std::size_t j = log.item_vocab.at(it.item_id);
        vectors[m].values[j] = it.rating;
        orders[m].emplace_back(it.timestamp, j);
    }
    for (std::size_t m = 0; m < vectors.size(); ++m) {
        std::sort(orders[m].begin(), orders[m].end());
        vectors[m].rated_order.reserve(orders[m].size());
        for (const auto& [ts, j] : orders[m]) vectors[m].rated_order.push_back(j);
    }
    return vectors;
}

RatingVector cold_input(const RatingVector& w, std::size_t keep) {
    if (keep < 1) throw ConfigError("cold_input: keep must be >= 1");
    const std::size_t n_keep = std::min(keep, w.count());
    RatingVector c;
    c.values.assign(w.values.size(), 0.0);
    c.rated_order.assign(w.rated_order.begin(), w.rated_order.begin() + n_keep);
    for (std::size_t j : c.rated_order) c.values[j] = w.values[j];
    return c;
}

RelevanceVector relevance_vector(const RatingVector& w) {
    RelevanceVector rel;
    rel.bits.assign(w.values.size(), 0);
    if (w.count() == 0) return rel;
    double mean = 0.0;
    for (std::size_t j : w.rated_order) mean += w.values[j];
    mean /= static_cast<double>(w.count());
    for (std::size_t j : w.rated_order)
        if (w.values[j] > mean) rel.bits[j] = 1;
    return rel;
}

}  // namespace coldgan::data
