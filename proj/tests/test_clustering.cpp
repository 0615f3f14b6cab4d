#include "pwfn/clustering.hpp"
#include "pwfn/errors.hpp"

#include "support/reference_fixing.hpp"
#include "support/test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pwfn;
using pwfn_test::flat_store;

TEST_CASE("schedule validation enforces the monotone contract") {
    CHECK_NOTHROW((FixingSchedule{{0.3, 0.7, 1.0}, 3}).validate());
    CHECK_THROWS_AS((FixingSchedule{{}, 3}).validate(), ConfigError);
    CHECK_THROWS_AS((FixingSchedule{{0.5, 0.5, 1.0}, 3}).validate(), ConfigError);
    CHECK_THROWS_AS((FixingSchedule{{0.5, 0.4, 1.0}, 3}).validate(), ConfigError);
    CHECK_THROWS_AS((FixingSchedule{{0.3, 0.9}, 3}).validate(), ConfigError);
    CHECK_THROWS_AS((FixingSchedule{{0.0, 1.0}, 3}).validate(), ConfigError);
    CHECK_THROWS_AS((FixingSchedule{{0.3, 1.0}, 0}).validate(), ConfigError);
}

TEST_CASE("d_prob is the sigma-scaled distance") {
    GaussianWeight w{0.3, 0.1, false, kNoCluster};
    CHECK(d_prob(w, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
    w.sigma = 0.0;
    CHECK_THROWS_AS(d_prob(w, 0.25), NumericError);
}

TEST_CASE("prefix_select takes the longest mean-bounded prefix") {
    CHECK(prefix_select({0.2, 0.6, 1.3, 4.0}, 1.0) == 3);
    CHECK(prefix_select({2.0}, 1.0) == 0);
    CHECK(prefix_select({}, 1.0) == 0);
    CHECK(prefix_select({1.0, 1.0, 1.0}, 1.0) == 3); // boundary is inclusive
    CHECK(prefix_select({0.0, 0.0}, 0.0) == 2);
}

TEST_CASE("prefix_select equals exhaustive search on random sorted arrays") {
    RngState rng = RngState::seeded(1234);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 64;
        std::vector<double> d(n);
        for (double& v : d) v = 4.0 * rng.next_uniform();
        if (trial % 3 == 0) {
            // duplicate-heavy arrays probe the tie handling
            for (double& v : d) v = std::floor(v * 4.0) / 4.0;
        }
        std::sort(d.begin(), d.end());
        const double delta = 4.0 * rng.next_uniform();

        std::size_t want = 0;
        for (std::size_t len = 1; len <= n; ++len) {
            double sum = 0.0;
            for (std::size_t i = 0; i < len; ++i) sum += d[i];
            if (sum / static_cast<double>(len) <= delta) want = len;
        }
        CHECK(prefix_select(d, delta) == want);
    }
}

TEST_CASE("population std of {0,1} is one half") {
    CHECK(std_of_members({0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std_of_members({2.0}) == 0.0);
    CHECK_THROWS_AS(std_of_members({}), NumericError);
}

TEST_CASE("nearest-center ties fall to smaller magnitude, then positive") {
    // Weight parked exactly between 0 and 0.5 votes for 0.
    WeightStore store = flat_store({0.25}, {1.0});
    const Codebook cb = generate_additive_set(BaseSetConfig{1, 0}, 1);
    const VoteResult v = vote_popular_center(store, cb);
    CHECK(cb.centers[v.kstar] == 0.0);
}

TEST_CASE("vote-count ties fall to smaller magnitude, then positive") {
    // One weight at +0.5 and one at -0.5: both centers get one vote each.
    WeightStore store = flat_store({0.5, -0.5}, {0.01, 0.01});
    const Codebook cb = generate_additive_set(BaseSetConfig{1, 0}, 1);
    const VoteResult v = vote_popular_center(store, cb);
    CHECK(v.counts[std::distance(cb.centers.begin(),
                                 std::find(cb.centers.begin(), cb.centers.end(), 0.5))] == 1);
    CHECK(cb.centers[v.kstar] == 0.5); // positive beats negative at equal magnitude
}

TEST_CASE("loose sigma is admitted before a tighter weight that is closer in mu") {
    // w0 is nearer the center in mu but certain about its value; w1 is
    // farther yet noisy. The scaled distance ranks w1 first and the mean
    // test admits it alone.
    WeightStore store = flat_store({0.3, 0.35}, {0.001, 1.0});
    UsedCenters used;
    const RoundState rs = fix_round(store, 1, 0.5, BaseSetConfig{2, 0}, 1.0, used);
    REQUIRE(rs.assignments.size() == 1);
    CHECK(rs.assignments[0].center == 0.25);
    CHECK(rs.assignments[0].members == std::vector<std::size_t>{1});
    CHECK_FALSE(store.get(0).fixed);
    CHECK(store.get(1).fixed);
}

TEST_CASE("empty codebooks and all-fixed stores are numeric errors") {
    WeightStore store = flat_store({0.5}, {0.1});
    Codebook cb;
    CHECK_THROWS_AS(vote_popular_center(store, cb), NumericError);
    const Codebook real = generate_additive_set(BaseSetConfig{1, 0}, 1);
    store.mark_fixed(0, 0);
    CHECK_THROWS_AS(vote_popular_center(store, real), NumericError);
}

TEST_CASE("fix_round reaches its target and records per-pass state") {
    RngState rng = RngState::seeded(21);
    const std::size_t n = 200;
    std::vector<double> mu = rng.gaussian(n);
    std::vector<double> sigma(n);
    for (double& s : sigma) s = pwfn_test::uniform_in(rng, 1e-3, 0.1);
    WeightStore store = flat_store(mu, sigma);

    UsedCenters used;
    const RoundState rs = fix_round(store, 1, 0.5, BaseSetConfig{4, 0}, 1.0, used);
    CHECK(rs.target == 100);
    CHECK(store.fixed_count() >= rs.target);
    CHECK(rs.passes_total >= rs.assignments.size());
    CHECK(rs.passes_total >= 1);

    std::size_t assigned = 0;
    for (const AssignmentRecord& rec : rs.assignments) {
        assigned += rec.members.size();
        CHECK_FALSE(rec.members.empty());
        CHECK(rec.member_std >= kSigmaFloor);
        // Assigned weights carry the center and their own pass's spread.
        for (std::size_t id : rec.members) {
            const GaussianWeight w = store.get(id);
            CHECK(w.fixed);
            CHECK(w.mu == rec.center);
            CHECK(w.sigma == rec.member_std);
            CHECK(w.cluster_index == rec.cluster_index);
            CHECK(used.ints[w.cluster_index] == rec.center_int);
        }
        // First pass of a round starts at omega 1 and delta0.
        CHECK(rec.omega >= 1);
    }
    CHECK(assigned == store.fixed_count());
    CHECK(rs.assignments.front().delta >= 1.0);
}

TEST_CASE("escalation doubles delta and raises omega every pass") {
    // A single far-out weight needs several doublings before the mean test
    // admits it.
    WeightStore store = flat_store({900.0}, {1.0});
    UsedCenters used;
    const RoundState rs = fix_round(store, 1, 1.0, BaseSetConfig{1, 0}, 1.0, used);
    CHECK(store.fixed_count() == 1);
    REQUIRE(rs.assignments.size() == 1);
    const AssignmentRecord& rec = rs.assignments.front();
    // The b=1 codebook tops out at 1.5, so the distance is 898.5 and the
    // first admitting pass is the one where delta = 2^(k-1) reaches 1024.
    CHECK(rec.delta == 1024.0);
    CHECK(rec.omega == 11);
    CHECK(rs.passes_total == 11);
}

TEST_CASE("rounds already past their target make no passes") {
    WeightStore store = flat_store({0.5, 0.25}, {0.1, 0.1});
    store.mark_fixed(0, 0);
    store.mark_fixed(1, 0);
    UsedCenters used;
    used.intern(1, 0.5);
    const RoundState rs = fix_round(store, 2, 0.5, BaseSetConfig{2, 0}, 1.0, used);
    CHECK(rs.passes_total == 0);
    CHECK(rs.assignments.empty());
}

TEST_CASE("used centers intern once and never reorder") {
    UsedCenters used;
    CHECK(used.intern(4, 0.25) == 0);
    CHECK(used.intern(-8, -0.5) == 1);
    CHECK(used.intern(4, 0.25) == 0);
    CHECK(used.ints == std::vector<std::int64_t>{4, -8});
}

TEST_CASE("fix_round matches the brute-force reference on random instances") {
    RngState rng = RngState::seeded(777);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + rng.next_u64() % 981; // up to ~1000
        std::vector<double> mu(n), sigma(n);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = 1.5 * (2.0 * rng.next_uniform() - 1.0);
            sigma[i] = pwfn_test::uniform_in(rng, 1e-4, 0.1);
        }
        // A few weights sit exactly on centers to force distance ties.
        for (std::size_t i = 0; i < n; i += 17) mu[i] = 0.25;

        WeightStore store = flat_store(mu, sigma);
        pwfn_test::RefWeights ref{mu, sigma, std::vector<char>(n, 0)};

        UsedCenters used;
        const RoundState rs = fix_round(store, 1, 1.0, BaseSetConfig{4, 0}, 1.0, used);
        const auto ref_log = pwfn_test::reference_fix_round(ref, 1.0, 4, 0, 1.0);

        REQUIRE(rs.assignments.size() == ref_log.size());
        for (std::size_t a = 0; a < ref_log.size(); ++a) {
            const AssignmentRecord& got = rs.assignments[a];
            const pwfn_test::RefAssignment& want = ref_log[a];
            CHECK(got.omega == want.omega);
            CHECK(got.delta == want.delta);
            CHECK(got.center_int == want.center_int);
            CHECK(got.members == want.members);
            CHECK(got.member_std == doctest::Approx(want.member_std).epsilon(1e-9));
        }
        // End state agrees too.
        const auto final_mu = pwfn_test::flat_mu(store);
        for (std::size_t i = 0; i < n; ++i) CHECK(final_mu[i] == ref.mu[i]);
        CHECK(store.fixed_count() == n);
    }
}

TEST_CASE("multi-round fixing keeps earlier assignments frozen") {
    RngState rng = RngState::seeded(31);
    const std::size_t n = 64;
    std::vector<double> mu = rng.gaussian(n);
    std::vector<double> sigma(n, 0.05);
    WeightStore store = flat_store(mu, sigma);
    UsedCenters used;

    const RoundState r1 = fix_round(store, 1, 0.4, BaseSetConfig{3, 0}, 1.0, used);
    std::vector<double> snapshot_mu = pwfn_test::flat_mu(store);
    std::vector<std::uint32_t> snapshot_cluster;
    for (std::size_t i = 0; i < n; ++i) snapshot_cluster.push_back(store.get(i).cluster_index);

    const RoundState r2 = fix_round(store, 2, 1.0, BaseSetConfig{3, 0}, 1.0, used);
    CHECK(store.fixed_count() == n);
    for (std::size_t i = 0; i < n; ++i) {
        if (snapshot_cluster[i] != kNoCluster) {
            CHECK(store.get(i).mu == snapshot_mu[i]);
            CHECK(store.get(i).cluster_index == snapshot_cluster[i]);
        }
    }
    CHECK(r1.target <= r2.target);
}
