#pragma once

#include "pwfn/bayes.hpp"
#include "pwfn/clustering.hpp"
#include "pwfn/codebook.hpp"
#include "pwfn/network.hpp"
#include "pwfn/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pwfn {

// On-disk layout: "PWFN" magic, u32 version, u64 header length, UTF-8 JSON
// header, then per tensor (header order) raw little-endian arrays:
// float32 mu, float32 sigma, uint8 fixed, uint32 cluster_index.
// Everything the header stores is produced by one canonical serializer, so
// load(save(x)) and save(load(f)) are byte-identical.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    NetworkSpec network;
    WeightStore store; // mu/sigma already snapped to float32 values
    BaseSetConfig base;
    int achieved_omega = 0;
    UsedCenters used;
    RngState rng;
    std::string phase; // "pretrained" | "compress" | "final"
    std::size_t rounds_completed = 0;
    double pretrain_train_accuracy = -1.0;
    double pretrain_test_accuracy = -1.0;
    std::vector<double> entropy_by_round;
    std::vector<std::size_t> fixed_by_round;
    std::string config_json; // canonical echo of the run config
};

// Replaces every mu/sigma with the nearest float32 value. Round boundaries
// and checkpoints both pass through this, which is what makes resumed and
// uninterrupted runs bit-identical.
void snap_store_to_float32(WeightStore& store);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws IoError on missing file, bad magic, version mismatch, or truncation.
Checkpoint load_checkpoint(const std::string& path);

} // namespace pwfn
