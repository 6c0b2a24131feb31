#include "coldgan/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "coldgan/errors.hpp"

namespace coldgan::checkpoint {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'A', 'N'};

template <typename T>
void write_le(std::ostream& out, T value) {
    // Assumes a little-endian host; true for every supported target.
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw DataError("checkpoint: truncated file");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<TensorRecord>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("checkpoint: cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    write_le<std::uint32_t>(out, kFormatVersion);
    for (const auto& t : tensors) {
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
        std::uint64_t count = 1;
        for (std::uint64_t d : t.dims) {
            write_le<std::uint64_t>(out, d);
            count *= d;
        }
        if (count != t.data.size())
            throw DataError("checkpoint: tensor '" + t.name + "' dims disagree with payload");
        for (double x : t.data) write_le<double>(out, x);
    }
    if (!out) throw DataError("checkpoint: write failed for " + path.string());
}

std::vector<TensorRecord> read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("checkpoint: bad magic in " + path.string());
    const auto version = read_le<std::uint32_t>(in);
    if (version != kFormatVersion)
        throw DataError("checkpoint: unsupported format version " + std::to_string(version));

    std::vector<TensorRecord> tensors;
    while (in.peek() != std::char_traits<char>::eof()) {
        TensorRecord t;
        const auto name_len = read_le<std::uint32_t>(in);
        t.name.resize(name_len);
        in.read(t.name.data(), name_len);
        const auto rank = read_le<std::uint32_t>(in);
        std::uint64_t count = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            t.dims.push_back(read_le<std::uint64_t>(in));
            count *= t.dims.back();
        }
        t.data.resize(count);
        for (std::uint64_t i = 0; i < count; ++i) t.data[i] = read_le<double>(in);
        if (!in) throw DataError("checkpoint: truncated tensor '" + t.name + "'");
        tensors.push_back(std::move(t));
    }
    return tensors;
}

namespace {

void append_mlp_tensors(const nn::Mlp& net, const std::string& prefix,
                        std::vector<TensorRecord>& tensors) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        const std::string base = prefix + ".layer" + std::to_string(i);
        tensors.push_back({base + ".weights",
                           {l.weights.rows(), l.weights.cols()},
                           l.weights.raw()});
        tensors.push_back({base + ".bias", {l.bias.size()}, l.bias});
    }
}

nn::Mlp mlp_from_tensors(const std::vector<TensorRecord>& tensors, const std::string& prefix,
                         const std::vector<std::string>& activations) {
    nn::Mlp net;
    for (std::size_t i = 0; i < activations.size(); ++i) {
        const std::string base = prefix + ".layer" + std::to_string(i);
        const TensorRecord* w = nullptr;
        const TensorRecord* b = nullptr;
        for (const auto& t : tensors) {
            if (t.name == base + ".weights") w = &t;
            if (t.name == base + ".bias") b = &t;
        }
        if (!w || !b || w->dims.size() != 2 || b->dims.size() != 1)
            throw DataError("checkpoint: missing or malformed tensors for " + base);
        nn::DenseLayer layer;
        layer.weights = Matrix(w->dims[0], w->dims[1]);
        layer.weights.raw() = w->data;
        layer.bias = b->data;
        layer.activation = nn::activation_from_string(activations[i]);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace

void save_model(const std::filesystem::path& path, const gan::GanModel& model,
                const std::string& config_hash) {
    std::vector<TensorRecord> tensors;
    append_mlp_tensors(model.generator, "generator", tensors);
    append_mlp_tensors(model.discriminator, "discriminator", tensors);
    write_tensor_file(path, tensors);

    nlohmann::json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["config_hash"] = config_hash;
    for (const auto& t : tensors) manifest["tensors"][t.name] = t.dims;
    auto acts = [](const nn::Mlp& net) {
        std::vector<std::string> out;
        for (const auto& l : net.layers) out.push_back(nn::to_string(l.activation));
        return out;
    };
    manifest["generator_activations"] = acts(model.generator);
    manifest["discriminator_activations"] = acts(model.discriminator);

    std::ofstream mf(path.string() + ".manifest.json");
    if (!mf) throw DataError("checkpoint: cannot write manifest for " + path.string());
    mf << manifest.dump(2) << "\n";
}

gan::GanModel load_model(const std::filesystem::path& path) {
    std::ifstream mf(path.string() + ".manifest.json");
    if (!mf) throw DataError("checkpoint: missing manifest for " + path.string());
    nlohmann::json manifest = nlohmann::json::parse(mf);

    const std::vector<TensorRecord> tensors = read_tensor_file(path);
    gan::GanModel model;
    model.generator = mlp_from_tensors(
        tensors, "generator", manifest["generator_activations"].get<std::vector<std::string>>());
    model.discriminator = mlp_from_tensors(
        tensors, "discriminator",
        manifest["discriminator_activations"].get<std::vector<std::string>>());
    model.g_opt = nn::Adam(model.generator, {});
    model.d_opt = nn::Adam(model.discriminator, {});
    return model;
}

}  // namespace coldgan::checkpoint
