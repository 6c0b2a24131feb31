#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "coldgan/checkpoint.hpp"
#include "coldgan/config.hpp"
#include "coldgan/errors.hpp"

using namespace coldgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "coldgan_test";
    fs::create_directories(dir);
    return dir;
}

gan::GanModel make_model(std::uint64_t seed) {
    gan::ArchitectureConfig arch;
    arch.g_hidden = {4};
    arch.d_hidden = {3};
    gan::TrainConfig cfg;
    cfg.seed = seed;
    return gan::init_model(6, arch, cfg);
}

}  // namespace

TEST_CASE("tensor file round trip") {
    const fs::path path = temp_dir() / "tensors.cgan";
    const std::vector<checkpoint::TensorRecord> tensors = {
        {"a", {2, 3}, {1, 2, 3, 4, 5, 6}},
        {"b", {4}, {0.5, -0.5, 1e-300, 3.14159}},
    };
    checkpoint::write_tensor_file(path, tensors);
    const auto back = checkpoint::read_tensor_file(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "a");
    CHECK(back[0].dims == std::vector<std::uint64_t>{2, 3});
    CHECK(back[0].data == tensors[0].data);
    CHECK(back[1].data == tensors[1].data);  // bit-exact doubles
}

TEST_CASE("tensor file rejects bad magic and truncation") {
    const fs::path path = temp_dir() / "bad.cgan";
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_AS(checkpoint::read_tensor_file(path), DataError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "CGAN";
        const std::uint32_t v = checkpoint::kFormatVersion;
        out.write(reinterpret_cast<const char*>(&v), 4);
        const std::uint32_t len = 99;
        out.write(reinterpret_cast<const char*>(&len), 4);
    }
    CHECK_THROWS_AS(checkpoint::read_tensor_file(path), DataError);
}

TEST_CASE("model save/load round trip") {
    const fs::path path = temp_dir() / "model.cgan";
    const gan::GanModel model = make_model(3);
    checkpoint::save_model(path, model, "deadbeef");
    const gan::GanModel back = checkpoint::load_model(path);
    CHECK(back.generator.flatten_params() == model.generator.flatten_params());
    CHECK(back.discriminator.flatten_params() == model.discriminator.flatten_params());
    REQUIRE(back.generator.layers.size() == model.generator.layers.size());
    for (std::size_t i = 0; i < back.generator.layers.size(); ++i)
        CHECK(back.generator.layers[i].activation == model.generator.layers[i].activation);

    SUBCASE("manifest exists and carries the config hash") {
        std::ifstream mf(path.string() + ".manifest.json");
        REQUIRE(mf.good());
        std::string content((std::istreambuf_iterator<char>(mf)),
                            std::istreambuf_iterator<char>());
        CHECK(content.find("deadbeef") != std::string::npos);
        CHECK(content.find("generator.layer0.weights") != std::string::npos);
    }
    SUBCASE("identical saves are byte-identical") {
        const fs::path other = temp_dir() / "model2.cgan";
        checkpoint::save_model(other, model, "deadbeef");
        std::ifstream a(path, std::ios::binary), b(other, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
}

TEST_CASE("run config") {
    SUBCASE("defaults validate") {
        config::RunConfig cfg;
        cfg.dataset_path = "x";
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("round trip preserves the hash") {
        config::RunConfig cfg;
        cfg.dataset_path = "data.csv";
        cfg.dataset_format = "csv";
        cfg.seed = 99;
        cfg.training.epochs = 17;
        cfg.rejuvenation.alpha = 3.5;
        const config::RunConfig back = config::RunConfig::from_json(cfg.to_json());
        CHECK(back.hash() == cfg.hash());
        CHECK(back.training.epochs == 17);
        CHECK(back.rejuvenation.alpha == 3.5);
        CHECK(back.seed == 99);
    }
    SUBCASE("hash is sensitive to every toggled dimension") {
        config::RunConfig cfg;
        cfg.dataset_path = "x";
        config::RunConfig other = cfg;
        other.training.relevant_loss_weight = 0.0;
        CHECK(cfg.hash() != other.hash());
        other = cfg;
        other.rejuvenation.mode = rejuvenate::Mode::random_uniform;
        CHECK(cfg.hash() != other.hash());
    }
    SUBCASE("file with comments parses; COLDGAN_SEED wins") {
        const fs::path path = temp_dir() / "config.json";
        {
            std::ofstream out(path);
            out << "{\n  // comment line\n  \"dataset\": {\"path\": \"d.csv\", \"format\": "
                   "\"csv\"},\n  \"seed\": 5\n}\n";
        }
        const config::RunConfig cfg = config::RunConfig::load(path);
        CHECK(cfg.dataset_path == "d.csv");
        CHECK(cfg.seed == 5);

        setenv("COLDGAN_SEED", "1234", 1);
        const config::RunConfig overridden = config::RunConfig::load(path);
        unsetenv("COLDGAN_SEED");
        CHECK(overridden.seed == 1234);
        CHECK(overridden.training.seed == 1234);
    }
    SUBCASE("bad values rejected") {
        config::RunConfig cfg;
        cfg.dataset_path = "x";
        cfg.dataset_format = "xml";
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.dataset_format = "csv";
        cfg.rejuvenation.p_min = 0.95;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("run manifest atomic write") {
    const fs::path path = temp_dir() / "manifest.json";
    config::RunManifest m;
    m.config_hash = "cafe";
    m.seed = 3;
    m.dataset_records = 100;
    m.timings.push_back({"train", 1.5});
    config::write_manifest_atomic(path, m);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.find("\"cafe\"") != std::string::npos);
    CHECK(content.find("\"train\"") != std::string::npos);
    CHECK(content.find("\"ok\"") != std::string::npos);
    CHECK(!fs::exists(path.string() + ".tmp"));
}
