#pragma once

#include <filesystem>

#include "grex/nn.hpp"

namespace grex {

struct CheckpointMeta {
    double ema_coeff = 0.99;
    long long step = 0;
};

// Single-file checkpoint: magic, JSON manifest (names, shapes, dtype, EMA
// coefficient, optimizer step, blob offsets), then a raw little-endian
// column-major f64 blob. Round trip is bit-exact.
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const AdamState* adam, const CheckpointMeta& meta);

// The store must already hold identically named and shaped parameters
// (built from the run configuration); mismatches throw.
CheckpointMeta load_checkpoint(const std::filesystem::path& path, ParamStore& store,
                               AdamState* adam);

}  // namespace grex
