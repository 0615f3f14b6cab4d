#pragma once

#include "pwfn/checkpoint.hpp"
#include "pwfn/config.hpp"
#include "pwfn/metrics.hpp"
#include "pwfn/optimizer.hpp"

#include <string>
#include <vector>

namespace pwfn {

// Builds the dataset named by the config and checks it against the network
// dims (CSV shapes are only knowable after loading).
TrainTest build_dataset(const RunConfig& cfg);

// Weights ~ Normal(0, sqrt(1/(fan_in+fan_out))), biases zero without touching
// the generator, so the stream position is a function of the weight counts.
void init_point_weights(const NetworkSpec& spec, WeightStore& store, RngState& rng);

// Dispatch on prior_mode: parabolic bracketing prior or flat S/2.
void init_sigma_prior(WeightStore& store, const RunConfig& cfg);

// One sequential pass over train on mu alone: no noise, no regularizer.
void train_point_epoch(const NetworkSpec& spec, WeightStore& store, SgdState& opt,
                       const Dataset& train, std::size_t batch_size);

// One sequential pass with one weight sample per batch, cross-entropy plus
// the sigma hinge, reparameterized gradients, and a post-step clamp keeping
// free sigmas at or above the floor. Throws NumericError on non-finite loss.
void train_epoch(const NetworkSpec& spec, WeightStore& store, SgdState& opt, RngState& rng,
                 const Dataset& train, const RegConfig& reg, std::size_t batch_size);

// Momentum buffers are per-phase: pretraining tracks mu tensors only, the
// compression rounds track interleaved [mu0, sigma0, mu1, sigma1, ...] and
// start fresh each round.
SgdState make_point_optimizer(const NetworkSpec& spec, const RunConfig& cfg);
SgdState make_bayes_optimizer(const NetworkSpec& spec, const RunConfig& cfg);

Checkpoint pretrain(const RunConfig& cfg);

struct CompressArtifacts {
    Checkpoint final;                  // phase "final", all weights fixed
    std::vector<Checkpoint> per_round; // save point after each executed round
    std::vector<RoundState> rounds;    // assignment log for executed rounds
    CompressionReport report;
};

// Accepts a "pretrained" checkpoint (starts at round 1 after prior init) or a
// "compress" checkpoint (resumes after rounds_completed). The training RNG
// continues from the checkpoint state; the report's ensemble accuracy uses a
// fresh stream seeded from the config so it cannot perturb training.
CompressArtifacts compress(const Checkpoint& start, const RunConfig& cfg);

std::string assignments_to_json(const std::vector<RoundState>& rounds);
std::vector<RoundState> assignments_from_json(const std::string& text);

// Scatter and histogram exports for the report subcommand.
std::string mu_sigma_csv(const WeightStore& store);
std::string sigma_histogram_csv(const WeightStore& store, std::size_t bins = 64);

} // namespace pwfn
