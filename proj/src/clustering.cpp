#include "pwfn/clustering.hpp"
#include "pwfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace pwfn {

void FixingSchedule::validate() const {
    if (fractions.empty()) throw ConfigError("schedule: needs at least one round");
    double prev = 0.0;
    for (double p : fractions) {
        if (p <= prev || p > 1.0) {
            throw ConfigError("schedule: fractions must be strictly increasing in (0,1]");
        }
        prev = p;
    }
    if (fractions.back() != 1.0) throw ConfigError("schedule: final fraction must be 1.0");
    if (epochs_per_round == 0) throw ConfigError("schedule: epochs_per_round must be >= 1");
}

Partition make_partition(const WeightStore& store, std::size_t round_t) {
    Partition p;
    p.round_t = round_t;
    const std::size_t n = store.total();
    for (std::size_t i = 0; i < n; ++i) {
        (store.get(i).fixed ? p.fixed_ids : p.free_ids).push_back(i);
    }
    return p;
}

std::uint32_t UsedCenters::intern(std::int64_t center_int, double value) {
    for (std::size_t i = 0; i < ints.size(); ++i) {
        if (ints[i] == center_int) return static_cast<std::uint32_t>(i);
    }
    ints.push_back(center_int);
    values.push_back(value);
    return static_cast<std::uint32_t>(ints.size() - 1);
}

double d_prob(const GaussianWeight& w, double center) {
    if (!(w.sigma > 0.0)) {
        throw NumericError("d_prob: sigma must be positive");
    }
    return std::fabs(w.mu - center) / w.sigma;
}

namespace {

// Tie rule shared by nearest-center picks and vote-count argmax:
// smaller |c| first, then positive over negative.
bool center_preferred(double a, double b) {
    const double fa = std::fabs(a), fb = std::fabs(b);
    if (fa != fb) return fa < fb;
    return a > b;
}

} // namespace

VoteResult vote_popular_center(const WeightStore& store, const Codebook& cb) {
    if (cb.centers.empty()) throw NumericError("vote: empty codebook");
    VoteResult res;
    res.counts.assign(cb.centers.size(), 0);
    const std::size_t n = store.total();
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) {
        const GaussianWeight w = store.get(i);
        if (w.fixed) continue;
        any_free = true;
        std::size_t best = 0;
        double best_d = d_prob(w, cb.centers[0]);
        for (std::size_t k = 1; k < cb.centers.size(); ++k) {
            const double d = d_prob(w, cb.centers[k]);
            if (d < best_d ||
                (d == best_d && center_preferred(cb.centers[k], cb.centers[best]))) {
                best = k;
                best_d = d;
            }
        }
        ++res.counts[best];
    }
    if (!any_free) throw NumericError("vote: no free weights");
    res.kstar = 0;
    for (std::size_t k = 1; k < res.counts.size(); ++k) {
        if (res.counts[k] > res.counts[res.kstar] ||
            (res.counts[k] == res.counts[res.kstar] &&
             center_preferred(cb.centers[k], cb.centers[res.kstar]))) {
            res.kstar = k;
        }
    }
    return res;
}

std::size_t prefix_select(const std::vector<double>& sorted_distances, double delta) {
    double sum = 0.0;
    std::size_t len = 0;
    for (std::size_t i = 0; i < sorted_distances.size(); ++i) {
        sum += sorted_distances[i];
        if (sum / static_cast<double>(i + 1) <= delta) {
            len = i + 1;
        } else {
            break;
        }
    }
    return len;
}

double std_of_members(const std::vector<double>& mus) {
    if (mus.empty()) throw NumericError("std_of_members: empty cluster");
    double mean = 0.0;
    for (double m : mus) mean += m;
    mean /= static_cast<double>(mus.size());
    double ss = 0.0;
    for (double m : mus) ss += (m - mean) * (m - mean);
    return std::sqrt(ss / static_cast<double>(mus.size()));
}

RoundState fix_round(WeightStore& store, std::size_t round_t, double p_t,
                     const BaseSetConfig& base, double delta0, UsedCenters& used,
                     std::size_t cap) {
    base.validate();
    if (!(p_t > 0.0 && p_t <= 1.0)) throw ConfigError("fix_round: p_t must be in (0,1]");
    if (!(delta0 > 0.0)) throw ConfigError("fix_round: delta0 must be positive");

    const std::size_t n = store.total();
    RoundState rs;
    rs.round_t = round_t;
    rs.target = static_cast<std::size_t>(
        std::ceil(p_t * static_cast<double>(n)));

    int omega = 0;
    double delta = delta0 / 2.0;
    std::map<int, Codebook> books;

    while (store.fixed_count() < rs.target) {
        ++omega;
        delta *= 2.0;
        ++rs.passes_total;
        auto it = books.find(omega);
        if (it == books.end()) {
            it = books.emplace(omega, generate_additive_set(base, omega, cap)).first;
        }
        const Codebook& cb = it->second;

        const VoteResult vote = vote_popular_center(store, cb);
        const double center = cb.centers[vote.kstar];

        std::vector<std::size_t> free_ids;
        std::vector<double> dist;
        free_ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const GaussianWeight w = store.get(i);
            if (w.fixed) continue;
            free_ids.push_back(i);
            dist.push_back(d_prob(w, center));
        }
        std::vector<std::size_t> order(free_ids.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return free_ids[a] < free_ids[b];
        });
        std::vector<double> sorted_dist(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) sorted_dist[i] = dist[order[i]];

        const std::size_t len = prefix_select(sorted_dist, delta);
        if (len == 0) continue;

        AssignmentRecord rec;
        rec.omega = omega;
        rec.delta = delta;
        rec.center_int = cb.centers_int[vote.kstar];
        rec.center = center;
        rec.cluster_index = used.intern(rec.center_int, center);
        rec.members.reserve(len);
        rec.member_pre_mu.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            const std::size_t id = free_ids[order[i]];
            rec.members.push_back(id);
            rec.member_pre_mu.push_back(store.get(id).mu);
        }
        rec.member_std = std::max(std_of_members(rec.member_pre_mu), kSigmaFloor);

        for (std::size_t id : rec.members) {
            store.set_mu(id, center);
            store.set_sigma(id, rec.member_std);
            store.mark_fixed(id, rec.cluster_index);
        }
        rs.max_omega_assigned = std::max(rs.max_omega_assigned, omega);
        rs.assignments.push_back(std::move(rec));
    }
    return rs;
}

} // namespace pwfn
