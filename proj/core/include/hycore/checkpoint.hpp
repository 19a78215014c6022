#pragma once

#include <filesystem>

#include "hycore/model.hpp"

namespace hycore::nn {

struct CheckpointMeta {
  int epoch = -1;  // training epoch the parameters were captured at
};

/// Binary dump of every parameter tensor plus curvature, mode flag and
/// dimensions. Doubles are written raw (little-endian hosts), so
/// save -> load -> save reproduces the file byte for byte.
/// Format: "HYCK" magic, u32 version, u8 euclidean flag, f64 curvature,
/// five u64 dims (h1 h2 m f K), i32 epoch, u32 tensor count, then per tensor
/// a u32 name length, the name, u32 rank, u64 extents and the raw values.
void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const CheckpointMeta& meta = {});

struct Checkpoint {
  ModelState state;
  CheckpointMeta meta;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hycore::nn
