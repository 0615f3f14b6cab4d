#pragma once

#include "pwfn/bayes.hpp"
#include "pwfn/codebook.hpp"

#include <cstdint>
#include <vector>

namespace pwfn {

struct FixingSchedule {
    std::vector<double> fractions; // p_1..p_T, strictly increasing, last == 1.0
    std::size_t epochs_per_round = 3;

    void validate() const;
    std::size_t rounds() const { return fractions.size(); }
};

// Derived view of the fixed/free split.
struct Partition {
    std::vector<std::size_t> fixed_ids;
    std::vector<std::size_t> free_ids;
    std::size_t round_t = 0;
};

Partition make_partition(const WeightStore& store, std::size_t round_t);

// Append-only table of centers ever assigned; cluster_index points here and
// never shifts as later rounds add centers.
struct UsedCenters {
    std::vector<std::int64_t> ints;
    std::vector<double> values;

    std::uint32_t intern(std::int64_t center_int, double value);
};

struct AssignmentRecord {
    int omega = 0;
    double delta = 0.0;
    std::int64_t center_int = 0;
    double center = 0.0;
    std::uint32_t cluster_index = 0;
    std::vector<std::size_t> members; // global weight ids, admitted order
    std::vector<double> member_pre_mu;
    double member_std = 0.0;
};

struct RoundState {
    std::size_t round_t = 0;
    std::size_t target = 0;
    std::size_t passes_total = 0;   // escalations, empty or not
    int max_omega_assigned = 0;
    std::vector<AssignmentRecord> assignments;
};

// |mu - c| / sigma. sigma must be positive.
double d_prob(const GaussianWeight& w, double center);

struct VoteResult {
    std::size_t kstar = 0;
    std::vector<std::size_t> counts; // per center
};

// Counts each free weight's nearest center by d_prob. Nearest ties go to the
// smaller-|c| center, positive over negative; the same rule breaks count ties.
VoteResult vote_popular_center(const WeightStore& store, const Codebook& cb);

// Longest prefix of an ascending distance array whose mean is <= delta.
// Sortedness makes the running mean non-decreasing, so greedy is exact.
std::size_t prefix_select(const std::vector<double>& sorted_distances, double delta);

// Population standard deviation (divide by n).
double std_of_members(const std::vector<double>& mus);

// One fixing round: escalate (omega+1, delta*2) at the top of every pass from
// (0, delta0/2), vote, sort free weights to the popular center, take the
// prefix-mean selection, assign it, until ceil(N*p_t) weights are fixed.
RoundState fix_round(WeightStore& store, std::size_t round_t, double p_t,
                     const BaseSetConfig& base, double delta0, UsedCenters& used,
                     std::size_t cap = kCodebookCap);

} // namespace pwfn
