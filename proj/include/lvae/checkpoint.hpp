#pragma once

#include <optional>
#include <string>

#include "lvae/nn.hpp"

namespace lvae {

// Checkpoint file, little-endian:
//   magic "LVNN", version u32, layer count u32,
//   per layer: rows u32, cols u32, activation tag u32,
//              weights f32 (row-major), bias f32;
//   adam-present u32 (0/1); if present: step u32, then the first-moment
//   block and the second-moment block, each repeating the per-layer layout;
//   trailing CRC32 (of all preceding bytes).
// Round trips are bit-exact.
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Vae<float>& model,
                     const AdamState<float>* adam = nullptr);

struct LoadedCheckpoint {
    Vae<float> model;
    std::optional<AdamState<float>> adam;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace lvae
