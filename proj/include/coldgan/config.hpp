#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "coldgan/eval.hpp"
#include "coldgan/gan.hpp"
#include "coldgan/rejuvenate.hpp"

namespace coldgan::config {

constexpr const char* kToolkitVersion = "0.1.0";

// Structured run configuration. Files are JSON with // and /* */ comments
// allowed; every field has a documented default, and the file round-trips
// losslessly through to_json()/from_json().
struct RunConfig {
    std::string dataset_path;
    std::string dataset_format = "movielens";  // movielens | csv | canonical

    std::size_t min_user_interactions = 15;
    std::size_t min_item_raters = 3;

    double train_fraction = 0.8;
    std::uint64_t seed = 42;

    rejuvenate::RejuvenationConfig rejuvenation;
    gan::ArchitectureConfig model;
    gan::TrainConfig training;
    eval::EvalProtocol evaluation;

    std::string output_dir = "out";
    std::vector<std::uint64_t> ablate_seeds = {1, 2, 3};

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    // Parses the file (comments allowed); env COLDGAN_SEED overrides the seed.
    static RunConfig load(const std::filesystem::path& path);

    // FNV-1a over the canonical serialized form, hex-encoded.
    std::string hash() const;

    void validate() const;
};

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

struct RunManifest {
    std::string config_hash;
    std::string toolkit_version = kToolkitVersion;
    std::uint64_t seed = 0;
    std::size_t dataset_records = 0;
    std::string dataset_hash;
    std::vector<PhaseTiming> timings;
    std::string status = "ok";  // or "failed: <reason>"

    nlohmann::json to_json() const;
};

// Write-to-temp-then-rename so readers never observe a partial manifest.
void write_manifest_atomic(const std::filesystem::path& path, const RunManifest& manifest);

std::string hash_bytes_hex(const std::string& bytes);

}  // namespace coldgan::config
