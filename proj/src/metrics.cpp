#include "pwfn/metrics.hpp"
#include "pwfn/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

namespace pwfn {

namespace {

std::uint32_t f32_bits(double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(bits));
    return bits;
}

std::map<std::uint32_t, std::size_t> occupancy(const WeightStore& store) {
    std::map<std::uint32_t, std::size_t> occ;
    for (const auto& t : store.tensors) {
        for (double m : t.mu) ++occ[f32_bits(m)];
    }
    return occ;
}

// One shared forward pass; per-tensor parameter pointers.
Matrix forward_with(const NetworkSpec& spec, const std::vector<std::vector<double>>& params,
                    const Matrix& x) {
    std::vector<const double*> ptrs;
    ptrs.reserve(params.size());
    for (const auto& p : params) ptrs.push_back(p.data());
    return network_forward(spec, ptrs, x, nullptr);
}

std::size_t argmax_row(const Matrix& m, std::size_t row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m.cols; ++j) {
        if (m(row, j) > m(row, best)) best = j; // ties keep the lowest index
    }
    return best;
}

} // namespace

std::size_t unique_count(const WeightStore& store) {
    return occupancy(store).size();
}

double weight_entropy(const WeightStore& store) {
    const auto occ = occupancy(store);
    const double n = static_cast<double>(store.total());
    if (n == 0.0) return 0.0;
    double h = 0.0;
    for (const auto& [bits, count] : occ) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double evaluate_point(const NetworkSpec& spec, const WeightStore& store, const Dataset& data) {
    if (data.x.rows == 0) throw ConfigError("evaluate: empty dataset");
    std::vector<std::vector<double>> params;
    params.reserve(store.tensors.size());
    for (const auto& t : store.tensors) params.push_back(t.mu);
    const Matrix logits = forward_with(spec, params, data.x);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < logits.rows; ++r) {
        if (argmax_row(logits, r) == static_cast<std::size_t>(data.y[r])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(logits.rows);
}

double evaluate_ensemble(const NetworkSpec& spec, const WeightStore& store, const Dataset& data,
                         RngState& rng, std::size_t samples) {
    if (data.x.rows == 0) throw ConfigError("evaluate: empty dataset");
    if (samples == 0) throw ConfigError("evaluate: samples must be >= 1");
    Matrix mean_probs(data.x.rows, spec.layer_dims.back());
    for (std::size_t s = 0; s < samples; ++s) {
        SampleResult sample = sample_weights(store, rng);
        const Matrix logits = forward_with(spec, sample.weights, data.x);
        for (std::size_t r = 0; r < logits.rows; ++r) {
            double mx = logits(r, 0);
            for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, logits(r, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < logits.cols; ++j) sum += std::exp(logits(r, j) - mx);
            for (std::size_t j = 0; j < logits.cols; ++j) {
                mean_probs(r, j) += std::exp(logits(r, j) - mx) / sum;
            }
        }
    }
    std::size_t correct = 0;
    for (std::size_t r = 0; r < mean_probs.rows; ++r) {
        if (argmax_row(mean_probs, r) == static_cast<std::size_t>(data.y[r])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(mean_probs.rows);
}

std::vector<ClusterStat> relative_distance_report(const std::vector<RoundState>& rounds) {
    std::vector<ClusterStat> stats;
    for (const RoundState& rs : rounds) {
        for (const AssignmentRecord& rec : rs.assignments) {
            ClusterStat st;
            st.round_t = rs.round_t;
            st.omega = rec.omega;
            st.delta = rec.delta;
            st.center = rec.center;
            st.center_int = rec.center_int;
            st.member_count = rec.members.size();
            st.zero_center = rec.center_int == 0;
            for (double pre : rec.member_pre_mu) {
                const double abs_move = std::fabs(pre - rec.center);
                st.mean_abs += abs_move;
                st.max_abs = std::max(st.max_abs, abs_move);
                if (!st.zero_center) {
                    const double rel = abs_move / std::fabs(rec.center);
                    st.mean_rel += rel;
                    st.max_rel = std::max(st.max_rel, rel);
                }
            }
            const double n = static_cast<double>(rec.member_pre_mu.size());
            if (n > 0.0) {
                st.mean_abs /= n;
                if (!st.zero_center) st.mean_rel /= n;
            }
            stats.push_back(st);
        }
    }
    return stats;
}

std::string report_to_json(const CompressionReport& rep) {
    nlohmann::ordered_json j;
    j["entropy_bits"] = rep.entropy_bits;
    j["unique_params"] = rep.unique_params;
    j["top1_point"] = rep.top1_point;
    j["top1_ensemble"] = rep.top1_ensemble;
    if (rep.pretrain_test_accuracy >= 0.0) {
        j["pretrain_test_accuracy"] = rep.pretrain_test_accuracy;
    }
    j["prior_mode"] = rep.prior_mode;
    j["achieved_omega"] = rep.achieved_omega;
    j["used_center_count"] = rep.used_center_count;
    j["entropy_by_round"] = rep.entropy_by_round;
    j["fixed_by_round"] = rep.fixed_by_round;
    auto clusters = nlohmann::ordered_json::array();
    for (const ClusterStat& s : rep.clusters) {
        nlohmann::ordered_json c;
        c["round"] = s.round_t;
        c["omega"] = s.omega;
        c["delta"] = s.delta;
        c["center"] = s.center;
        c["center_int"] = s.center_int;
        c["members"] = s.member_count;
        c["zero_center"] = s.zero_center;
        c["mean_rel"] = s.mean_rel;
        c["max_rel"] = s.max_rel;
        c["mean_abs"] = s.mean_abs;
        c["max_abs"] = s.max_abs;
        clusters.push_back(std::move(c));
    }
    j["clusters"] = std::move(clusters);
    return j.dump(2) + "\n";
}

std::string clusters_to_csv(const std::vector<ClusterStat>& stats) {
    std::ostringstream out;
    out << "round,omega,delta,center,center_int,members,zero_center,"
           "mean_rel,max_rel,mean_abs,max_abs\n";
    out.precision(17);
    for (const ClusterStat& s : stats) {
        out << s.round_t << ',' << s.omega << ',' << s.delta << ',' << s.center << ','
            << s.center_int << ',' << s.member_count << ',' << (s.zero_center ? 1 : 0) << ','
            << s.mean_rel << ',' << s.max_rel << ',' << s.mean_abs << ',' << s.max_abs << '\n';
    }
    return out.str();
}

} // namespace pwfn
