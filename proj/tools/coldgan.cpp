#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coldgan/checkpoint.hpp"
#include "coldgan/config.hpp"
#include "coldgan/data.hpp"
#include "coldgan/errors.hpp"
#include "coldgan/eval.hpp"
#include "coldgan/gan.hpp"
#include "coldgan/rejuvenate.hpp"

namespace fs = std::filesystem;
using namespace coldgan;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

// Load the config file, apply --set section.key=value patches (flags win over
// file values), then the COLDGAN_SEED env override, then --seed.
config::RunConfig load_config(const std::string& path, const std::vector<std::string>& sets,
                              std::optional<std::uint64_t> seed_flag) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + s);
        const std::string key = s.substr(0, eq);
        const std::string value = s.substr(eq + 1);
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception&) {
            parsed = value;  // bare string
        }
        nlohmann::json* node = &j;
        std::istringstream keys(key);
        std::string part, prev;
        std::vector<std::string> parts;
        while (std::getline(keys, part, '.')) parts.push_back(part);
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
        (*node)[parts.back()] = parsed;
    }
    config::RunConfig cfg = config::RunConfig::from_json(j);
    if (const char* env = std::getenv("COLDGAN_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (seed_flag) cfg.seed = *seed_flag;
    cfg.training.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

struct Dataset {
    data::InteractionLog log;
    std::string content_hash;
    std::size_t raw_records = 0;
};

Dataset load_dataset(const config::RunConfig& cfg) {
    const std::string bytes = read_file(cfg.dataset_path);
    std::istringstream in(bytes);
    Dataset ds;
    ds.content_hash = config::hash_bytes_hex(bytes);
    if (cfg.dataset_format == "movielens")
        ds.log = data::parse_movielens(in);
    else if (cfg.dataset_format == "csv")
        ds.log = data::parse_csv_ratings(in);
    else
        ds.log = data::parse_canonical(in);
    ds.raw_records = ds.log.interactions.size();
    ds.log = data::filter_sparse(ds.log, cfg.min_user_interactions, cfg.min_item_raters);
    return ds;
}

config::RunManifest base_manifest(const config::RunConfig& cfg, const Dataset* ds) {
    config::RunManifest m;
    m.config_hash = cfg.hash();
    m.seed = cfg.seed;
    if (ds) {
        m.dataset_records = ds->log.interactions.size();
        m.dataset_hash = ds->content_hash;
    }
    return m;
}

data::DatasetSplit make_split(const config::RunConfig& cfg, const data::InteractionLog& log) {
    return data::split_users(log, cfg.train_fraction, derive_seed(cfg.seed, "split"));
}

fs::path checkpoint_path(const config::RunConfig& cfg) {
    return fs::path(cfg.output_dir) / "checkpoints" / "model.cgan";
}

void save_item_vocab(const fs::path& dir, const data::InteractionLog& log) {
    std::ostringstream os;
    for (const auto& id : log.item_ids) os << id << "\n";
    write_file(dir / "items.txt", os.str());
}

std::vector<std::string> load_item_vocab(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open item vocabulary " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

int cmd_ingest(const config::RunConfig& cfg) {
    Timer timer;
    Dataset ds = load_dataset(cfg);

    nlohmann::json stats;
    stats["users"] = ds.log.num_users();
    stats["items"] = ds.log.num_items();
    stats["ratings"] = ds.log.interactions.size();
    stats["sparsity"] = ds.log.sparsity();
    stats["raw_records"] = ds.raw_records;
    std::cout << stats.dump(2) << "\n";

    std::ostringstream dump;
    data::write_canonical(ds.log, dump);
    write_file(fs::path(cfg.output_dir) / "canonical.tsv", dump.str());

    config::RunManifest m = base_manifest(cfg, &ds);
    m.timings.push_back({"ingest", timer.elapsed()});
    if (ds.log.interactions.empty()) m.status = "failed: empty dataset after filtering";
    fs::create_directories(fs::path(cfg.output_dir) / "manifest");
    config::write_manifest_atomic(fs::path(cfg.output_dir) / "manifest" / "ingest.json", m);
    return ds.log.interactions.empty() ? 3 : 0;
}

int cmd_train(const config::RunConfig& cfg) {
    Timer timer;
    config::RunManifest m = base_manifest(cfg, nullptr);
    const fs::path manifest_path = fs::path(cfg.output_dir) / "manifest" / "train.json";
    fs::create_directories(manifest_path.parent_path());
    try {
        Dataset ds = load_dataset(cfg);
        m = base_manifest(cfg, &ds);
        const data::DatasetSplit split = make_split(cfg, ds.log);
        m.timings.push_back({"load", timer.elapsed()});

        Timer train_timer;
        gan::GanModel model = gan::train(ds.log, split, cfg.rejuvenation, cfg.training,
                                         cfg.model);
        m.timings.push_back({"train", train_timer.elapsed()});

        const fs::path ckpt = checkpoint_path(cfg);
        fs::create_directories(ckpt.parent_path());
        checkpoint::save_model(ckpt, model, cfg.hash());
        save_item_vocab(ckpt.parent_path(), ds.log);
        write_file(fs::path(cfg.output_dir) / "history" / "history.csv",
                   gan::history_csv(model.history));

        m.timings.push_back({"total", timer.elapsed()});
        config::write_manifest_atomic(manifest_path, m);
        std::cout << "checkpoint written to " << ckpt.string() << " ("
                  << model.history.size() << " epochs)\n";
        return 0;
    } catch (const std::exception& e) {
        m.status = std::string("failed: ") + e.what();
        config::write_manifest_atomic(manifest_path, m);
        throw;
    }
}

int cmd_evaluate(const config::RunConfig& cfg, const std::string& checkpoint_override) {
    Timer timer;
    config::RunManifest m = base_manifest(cfg, nullptr);
    const fs::path manifest_path = fs::path(cfg.output_dir) / "manifest" / "evaluate.json";
    fs::create_directories(manifest_path.parent_path());
    try {
        Dataset ds = load_dataset(cfg);
        m = base_manifest(cfg, &ds);
        const data::DatasetSplit split = make_split(cfg, ds.log);

        const fs::path ckpt =
            checkpoint_override.empty() ? checkpoint_path(cfg) : fs::path(checkpoint_override);
        const gan::GanModel model = checkpoint::load_model(ckpt);
        if (model.n_items() != ds.log.num_items())
            throw DataError("checkpoint item dimension " + std::to_string(model.n_items()) +
                            " does not match dataset (" +
                            std::to_string(ds.log.num_items()) + ")");

        const auto warm = data::build_all_rating_vectors(ds.log);
        eval::MetricsReport report =
            eval::evaluate(gan::generator_scorer(model.generator, cfg.training.rating_scale),
                           warm, split.test_users, cfg.evaluation);
        report.seed = cfg.seed;
        report.config_hash = cfg.hash();

        std::cout << report.to_table();
        write_file(fs::path(cfg.output_dir) / "reports" / "metrics.json",
                   report.to_json() + "\n");
        write_file(fs::path(cfg.output_dir) / "reports" / "metrics.txt", report.to_table());
        if (cfg.evaluation.keep_per_user)
            write_file(fs::path(cfg.output_dir) / "reports" / "metrics_per_user.csv",
                       report.per_user_csv());

        m.timings.push_back({"evaluate", timer.elapsed()});
        config::write_manifest_atomic(manifest_path, m);
        return 0;
    } catch (const std::exception& e) {
        m.status = std::string("failed: ") + e.what();
        config::write_manifest_atomic(manifest_path, m);
        throw;
    }
}

int cmd_recommend(const config::RunConfig& cfg, const std::string& checkpoint_override,
                  const std::string& user_file, std::size_t k) {
    const fs::path ckpt =
        checkpoint_override.empty() ? checkpoint_path(cfg) : fs::path(checkpoint_override);
    const gan::GanModel model = checkpoint::load_model(ckpt);
    const std::vector<std::string> item_ids = load_item_vocab(ckpt.parent_path() / "items.txt");
    if (item_ids.size() != model.n_items())
        throw DataError("item vocabulary size does not match checkpoint");

    std::unordered_map<std::string, std::size_t> vocab;
    for (std::size_t j = 0; j < item_ids.size(); ++j) vocab.emplace(item_ids[j], j);

    // item_id,rating,timestamp lines for the single new user.
    data::RatingVector w;
    w.values.assign(item_ids.size(), 0.0);
    std::vector<std::pair<std::int64_t, std::size_t>> order;
    std::ifstream in(user_file);
    if (!in) throw DataError("cannot open " + user_file);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string item, rating, ts;
        if (!std::getline(ls, item, ',') || !std::getline(ls, rating, ',') ||
            !std::getline(ls, ts))
            throw ParseError(line_no, "expected item_id,rating,timestamp");
        const auto found = vocab.find(item);
        if (found == vocab.end()) continue;  // item unseen at training time
        w.values[found->second] = std::stod(rating);
        order.emplace_back(std::stoll(ts), found->second);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [ts, j] : order) w.rated_order.push_back(j);
    if (w.count() == 0) throw DataError("no known items in " + user_file);

    const data::RatingVector cold = data::cold_input(w, cfg.evaluation.cold_keep);
    const auto scores =
        gan::generate(model.generator, gan::normalize_ratings(cold, cfg.training.rating_scale));
    const eval::RecommendationList recs = eval::recommend(scores, cold, k);
    for (std::size_t r = 0; r < recs.items.size(); ++r)
        std::cout << (r + 1) << "," << item_ids[recs.items[r]] << "," << recs.scores[r] << "\n";
    return 0;
}

int cmd_ablate(const config::RunConfig& cfg) {
    Timer timer;
    config::RunManifest m = base_manifest(cfg, nullptr);
    const fs::path manifest_path = fs::path(cfg.output_dir) / "manifest" / "ablate.json";
    fs::create_directories(manifest_path.parent_path());
    try {
        Dataset ds = load_dataset(cfg);
        m = base_manifest(cfg, &ds);
        const auto warm = data::build_all_rating_vectors(ds.log);

        struct Variant {
            rejuvenate::Mode mode;
            double lambda;
        };
        const Variant grid[4] = {{rejuvenate::Mode::time_based, 1.0},
                                 {rejuvenate::Mode::time_based, 0.0},
                                 {rejuvenate::Mode::random_uniform, 1.0},
                                 {rejuvenate::Mode::random_uniform, 0.0}};

        std::ostringstream csv;
        csv << "seed,mode,lambda,config_hash";
        for (std::size_t k : cfg.evaluation.ks)
            csv << ",p@" << k << ",r@" << k << ",ndcg@" << k;
        csv << "\n";

        for (std::uint64_t seed : cfg.ablate_seeds) {
            // One split per seed, shared by all four variants.
            const data::DatasetSplit split =
                data::split_users(ds.log, cfg.train_fraction, derive_seed(seed, "split"));
            for (const Variant& v : grid) {
                config::RunConfig vc = cfg;
                vc.seed = seed;
                vc.training.seed = seed;
                vc.rejuvenation.mode = v.mode;
                vc.training.relevant_loss_weight = v.lambda;

                const gan::GanModel model = gan::train_vectors(
                    warm, split.train_users, vc.rejuvenation, vc.training, vc.model);
                const eval::MetricsReport report = eval::evaluate(
                    gan::generator_scorer(model.generator, vc.training.rating_scale), warm,
                    split.test_users, vc.evaluation);

                csv << seed << "," << rejuvenate::to_string(v.mode) << "," << v.lambda << ","
                    << vc.hash();
                char buf[64];
                for (std::size_t k : cfg.evaluation.ks) {
                    const auto& row = report.means.at(k);
                    std::snprintf(buf, sizeof(buf), ",%.4f,%.4f,%.4f", row.precision,
                                  row.recall, row.ndcg);
                    csv << buf;
                }
                csv << "\n";
            }
        }
        std::cout << csv.str();
        write_file(fs::path(cfg.output_dir) / "reports" / "ablation.csv", csv.str());
        m.timings.push_back({"ablate", timer.elapsed()});
        config::write_manifest_atomic(manifest_path, m);
        return 0;
    } catch (const std::exception& e) {
        m.status = std::string("failed: ") + e.what();
        config::write_manifest_atomic(manifest_path, m);
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ColdGAN: cold-start recommendation via adversarially trained DAE"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed_flag;
    std::string checkpoint_override;
    std::string user_file;
    std::size_t k = 10;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "run-config file (JSON, comments allowed)")
            ->required();
        sub->add_option("--set", sets, "override a config value, e.g. training.epochs=5");
        sub->add_option("-s,--seed", seed_flag, "override the root seed");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "parse + filter a dataset, dump stats");
    add_common(ingest);
    CLI::App* train = app.add_subcommand("train", "train ColdGAN end to end");
    add_common(train);
    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on the test cohort");
    add_common(evaluate);
    evaluate->add_option("--checkpoint", checkpoint_override, "checkpoint path override");
    CLI::App* recommend = app.add_subcommand("recommend", "top-k items for one new user");
    add_common(recommend);
    recommend->add_option("--checkpoint", checkpoint_override, "checkpoint path override");
    recommend->add_option("-u,--user-file", user_file, "CSV of item_id,rating,timestamp")
        ->required();
    recommend->add_option("-k", k, "list length");
    CLI::App* ablate = app.add_subcommand("ablate", "2x2 dropout-mode x relevant-loss grid");
    add_common(ablate);

    CLI11_PARSE(app, argc, argv);

    try {
        const config::RunConfig cfg = load_config(config_path, sets, seed_flag);
        if (app.got_subcommand(ingest)) return cmd_ingest(cfg);
        if (app.got_subcommand(train)) return cmd_train(cfg);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(cfg, checkpoint_override);
        if (app.got_subcommand(recommend))
            return cmd_recommend(cfg, checkpoint_override, user_file, k);
        if (app.got_subcommand(ablate)) return cmd_ablate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
