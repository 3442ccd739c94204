#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "auvsim/rl/policies.hpp"

namespace auvsim::rl {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t config_hash = 0;
  int episode = 0;
  std::uint64_t seed = 0;
};

class CheckpointMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text dump: a header, then one "tensor <name> <count>" block per parameter
// array, values printed with 17 significant digits so they round-trip.
void save_checkpoint(const std::filesystem::path& path, const PolicySet& policies,
                     const CheckpointMeta& meta);

// Loads into `policies`, which must already have the saved architecture.
// Throws CheckpointMismatch if `expected_hash` is given and differs, or if
// any tensor name or size disagrees.
CheckpointMeta load_checkpoint(const std::filesystem::path& path, PolicySet& policies,
                               std::optional<std::uint64_t> expected_hash = std::nullopt);

}  // namespace auvsim::rl
