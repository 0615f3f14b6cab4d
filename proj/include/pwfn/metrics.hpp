#pragma once

#include "pwfn/bayes.hpp"
#include "pwfn/clustering.hpp"
#include "pwfn/dataset.hpp"
#include "pwfn/network.hpp"
#include "pwfn/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pwfn {

// Distinct float32 bit patterns of mu across every parameter, biases included.
std::size_t unique_count(const WeightStore& store);

// H = -sum (n_k/N) log2(n_k/N) over the same float32 occupancy buckets.
double weight_entropy(const WeightStore& store);

// Argmax of the point (mu) network; logit ties resolve to the lowest class.
double evaluate_point(const NetworkSpec& spec, const WeightStore& store, const Dataset& data);

// Mean softmax over `samples` full-network weight draws, then argmax.
double evaluate_ensemble(const NetworkSpec& spec, const WeightStore& store, const Dataset& data,
                         RngState& rng, std::size_t samples = 20);

struct ClusterStat {
    std::size_t round_t = 0;
    int omega = 0;
    double delta = 0.0;
    double center = 0.0;
    std::int64_t center_int = 0;
    std::size_t member_count = 0;
    // D_rel = |mu_pre - c| / |c| for nonzero centers; zero-center movements are
    // absolute distances kept in the abs fields instead.
    bool zero_center = false;
    double mean_rel = 0.0;
    double max_rel = 0.0;
    double mean_abs = 0.0;
    double max_abs = 0.0;
};

std::vector<ClusterStat> relative_distance_report(const std::vector<RoundState>& rounds);

struct CompressionReport {
    double entropy_bits = 0.0;
    std::size_t unique_params = 0;
    double top1_point = 0.0;
    double top1_ensemble = 0.0;
    double pretrain_test_accuracy = -1.0;
    std::string prior_mode;
    int achieved_omega = 0;
    std::size_t used_center_count = 0;
    std::vector<double> entropy_by_round;
    std::vector<std::size_t> fixed_by_round;
    std::vector<ClusterStat> clusters;
};

std::string report_to_json(const CompressionReport& rep);
std::string clusters_to_csv(const std::vector<ClusterStat>& stats);

} // namespace pwfn
