#pragma once

#include <string>
#include <utility>
#include <vector>

#include "helmnet/tensor.hpp"

namespace helmnet {

class CheckpointError : public DataError {
 public:
  explicit CheckpointError(const std::string& msg) : DataError(msg) {}
};

// Binary layout, little-endian throughout:
//   magic "HNET", u32 version,
//   u32 config length + key=value text block,
//   u32 tensor count, then per tensor:
//     u32 name length, name bytes, u32 rank, u32 dims..., f32 payload,
//   u32 CRC32 trailer over everything before it.
struct CheckpointData {
  std::vector<std::pair<std::string, std::string>> config;   // ordered
  std::vector<std::pair<std::string, Tensor>> tensors;       // ordered
};

constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const CheckpointData& data);

// Throws CheckpointError on bad magic/version/CRC or malformed structure.
CheckpointData load_checkpoint(const std::string& path);

}  // namespace helmnet
