#pragma once

#include "dbnt/autoencoder_fwd.hpp"
#include "dbnt/dbn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dbnt {

// Self-describing binary tensor container.
//
// Layout: magic "DBNT", format version (unsigned 64-bit little-endian), then
// a sequence of tensor records until end of file. Each record is
//   name length (u64 LE) | UTF-8 name | rank (u64 LE) | dims (u64 LE each) |
//   row-major payload (IEEE-754 binary64 LE).
inline constexpr char kContainerMagic[4] = {'D', 'B', 'N', 'T'};
inline constexpr std::uint64_t kContainerVersion = 1;

struct NamedTensor {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
};

void write_container(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_container(const std::string& path);

// DBN tensors: metadata `layer_sizes` and `kind_flags` (1 = multinomial,
// 0 = binary), then `layer{t}.W`, `layer{t}.vbias`, `layer{t}.hbias`.
std::vector<NamedTensor> dbn_to_tensors(const DbnModel& model);
DbnModel dbn_from_tensors(const std::vector<NamedTensor>& tensors);

// Autoencoder tensors: metadata `noise_config` = [enabled, mean, variance,
// seed], then `enc{t}.W`, `enc{t}.b`, `dec{t}.W`, `dec{t}.b`.
std::vector<NamedTensor> autoencoder_to_tensors(const AutoencoderModel& model);
AutoencoderModel autoencoder_from_tensors(const std::vector<NamedTensor>& tensors);

void save_dbn(const std::string& path, const DbnModel& model);
DbnModel load_dbn(const std::string& path);
void save_autoencoder(const std::string& path, const AutoencoderModel& model);
AutoencoderModel load_autoencoder(const std::string& path);

// Peek at a container to tell which model family it stores.
enum class ContainerKind { dbn, autoencoder };
ContainerKind container_kind(const std::vector<NamedTensor>& tensors);

} // namespace dbnt
