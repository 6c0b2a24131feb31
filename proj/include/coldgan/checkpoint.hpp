#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coldgan/gan.hpp"

namespace coldgan::checkpoint {

// Binary tensor container: magic "CGAN", format version u32, then per-tensor
// records (u32 name length, UTF-8 name, u32 rank, dims as u64, row-major f64
// payload). All integers and floats little-endian.
constexpr std::uint32_t kFormatVersion = 1;

struct TensorRecord {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
};

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<TensorRecord>& tensors);
std::vector<TensorRecord> read_tensor_file(const std::filesystem::path& path);

// Writes <path> plus a JSON manifest at <path>.manifest.json listing tensor
// names, shapes, layer activations, and the training config hash.
void save_model(const std::filesystem::path& path, const gan::GanModel& model,
                const std::string& config_hash);
gan::GanModel load_model(const std::filesystem::path& path);

}  // namespace coldgan::checkpoint
