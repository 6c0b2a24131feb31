#include "coldgan/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coldgan/errors.hpp"
#include "coldgan/rng.hpp"

namespace coldgan::config {

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        read_field(d, "path", c.dataset_path);
        read_field(d, "format", c.dataset_format);
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        read_field(f, "min_user_interactions", c.min_user_interactions);
        read_field(f, "min_item_raters", c.min_item_raters);
    }
    if (j.contains("split")) read_field(j.at("split"), "train_fraction", c.train_fraction);
    read_field(j, "seed", c.seed);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "ablate_seeds", c.ablate_seeds);

    if (j.contains("rejuvenation")) {
        const auto& r = j.at("rejuvenation");
        read_field(r, "p_min", c.rejuvenation.p_min);
        read_field(r, "p_max", c.rejuvenation.p_max);
        read_field(r, "alpha", c.rejuvenation.alpha);
        read_field(r, "random_keep_prob", c.rejuvenation.random_keep_prob);
        if (r.contains("mode"))
            c.rejuvenation.mode = rejuvenate::mode_from_string(r.at("mode").get<std::string>());
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        read_field(m, "g_hidden", c.model.g_hidden);
        read_field(m, "d_hidden", c.model.d_hidden);
        if (m.contains("hidden_activation"))
            c.model.hidden_activation =
                nn::activation_from_string(m.at("hidden_activation").get<std::string>());
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        read_field(t, "epochs", c.training.epochs);
        read_field(t, "batch_size", c.training.batch_size);
        read_field(t, "g_learning_rate", c.training.g_learning_rate);
        read_field(t, "d_learning_rate", c.training.d_learning_rate);
        read_field(t, "d_steps_per_g_step", c.training.d_steps_per_g_step);
        read_field(t, "relevant_loss_weight", c.training.relevant_loss_weight);
        read_field(t, "rating_scale", c.training.rating_scale);
        read_field(t, "patience", c.training.patience);
        read_field(t, "validation_fraction", c.training.validation_fraction);
        read_field(t, "log_adversarial", c.training.log_adversarial);
        read_field(t, "freeze_corruption", c.training.freeze_corruption);
    }
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        read_field(e, "ks", c.evaluation.ks);
        read_field(e, "cold_keep", c.evaluation.cold_keep);
        read_field(e, "per_user_dump", c.evaluation.keep_per_user);
    }
    c.training.seed = c.seed;
    c.training.eval_cold_keep = c.evaluation.cold_keep;
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["dataset"]["path"] = dataset_path;
    j["dataset"]["format"] = dataset_format;
    j["filter"]["min_user_interactions"] = min_user_interactions;
    j["filter"]["min_item_raters"] = min_item_raters;
    j["split"]["train_fraction"] = train_fraction;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["ablate_seeds"] = ablate_seeds;

    j["rejuvenation"]["p_min"] = rejuvenation.p_min;
    j["rejuvenation"]["p_max"] = rejuvenation.p_max;
    j["rejuvenation"]["alpha"] = rejuvenation.alpha;
    j["rejuvenation"]["mode"] = rejuvenate::to_string(rejuvenation.mode);
    j["rejuvenation"]["random_keep_prob"] = rejuvenation.random_keep_prob;

    j["model"]["g_hidden"] = model.g_hidden;
    j["model"]["d_hidden"] = model.d_hidden;
    j["model"]["hidden_activation"] = nn::to_string(model.hidden_activation);

    j["training"]["epochs"] = training.epochs;
    j["training"]["batch_size"] = training.batch_size;
    j["training"]["g_learning_rate"] = training.g_learning_rate;
    j["training"]["d_learning_rate"] = training.d_learning_rate;
    j["training"]["d_steps_per_g_step"] = training.d_steps_per_g_step;
    j["training"]["relevant_loss_weight"] = training.relevant_loss_weight;
    j["training"]["rating_scale"] = training.rating_scale;
    j["training"]["patience"] = training.patience;
    j["training"]["validation_fraction"] = training.validation_fraction;
    j["training"]["log_adversarial"] = training.log_adversarial;
    j["training"]["freeze_corruption"] = training.freeze_corruption;

    j["evaluation"]["ks"] = evaluation.ks;
    j["evaluation"]["cold_keep"] = evaluation.cold_keep;
    j["evaluation"]["per_user_dump"] = evaluation.keep_per_user;
    return j;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    RunConfig c = from_json(j);
    if (const char* env = std::getenv("COLDGAN_SEED")) {
        c.seed = std::strtoull(env, nullptr, 10);
        c.training.seed = c.seed;
    }
    return c;
}

std::string hash_bytes_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string RunConfig::hash() const { return hash_bytes_hex(to_json().dump()); }

void RunConfig::validate() const {
    if (dataset_format != "movielens" && dataset_format != "csv" &&
        dataset_format != "canonical")
        throw ConfigError("unknown dataset format: " + dataset_format);
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("split.train_fraction must be in (0, 1)");
    rejuvenation.validate();
    training.validate();
    if (evaluation.ks.empty()) throw ConfigError("evaluation.ks must be nonempty");
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["toolkit_version"] = toolkit_version;
    j["seed"] = seed;
    j["dataset"]["records"] = dataset_records;
    j["dataset"]["hash"] = dataset_hash;
    for (const auto& t : timings) j["timings_seconds"][t.phase] = t.seconds;
    j["status"] = status;
    return j;
}

void write_manifest_atomic(const std::filesystem::path& path, const RunManifest& manifest) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot write manifest " + path.string());
        out << manifest.to_json().dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace coldgan::config
