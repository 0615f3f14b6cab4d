#include "pwfn/bayes.hpp"
#include "pwfn/errors.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace pwfn;
using pwfn_test::flat_store;

TEST_CASE("store layout follows the tensor order of the network") {
    NetworkSpec spec{{2, 4, 3}, true};
    WeightStore store = WeightStore::from_spec(spec);
    CHECK(store.total() == spec.total_params());
    CHECK(store.tensors.size() == 4);
    CHECK(store.tensors[1].name == "b0");
    CHECK(store.tensors[1].rows == 1);
    store.set_mu(8, 1.5); // first entry of b0 (after W0's 8 entries)
    CHECK(store.tensors[1].mu[0] == 1.5);
    CHECK(store.get(8).mu == 1.5);
    CHECK(store.get(0).cluster_index == kNoCluster);
    CHECK_THROWS_AS(store.get(store.total()), ShapeError);
}

TEST_CASE("sampling applies w = mu + sigma * eps with one flat draw") {
    WeightStore store = flat_store({1.0, -2.0, 0.5}, {0.1, 0.2, 0.0});
    RngState rng = RngState::seeded(3);
    RngState replay = rng;
    const SampleResult s = sample_weights(store, rng);
    const auto eps = replay.gaussian(3);
    CHECK(s.epsilon == eps);
    for (int i = 0; i < 3; ++i) {
        CHECK(s.weights[0][i] == store.tensors[0].mu[i] + store.tensors[0].sigma[i] * eps[i]);
    }
    // sigma 0 passes mu through untouched
    CHECK(s.weights[0][2] == 0.5);
}

TEST_CASE("fixed weights keep sampling noise but get zero gradients") {
    WeightStore store = flat_store({1.0, -1.0, 0.5}, {0.2, 0.02, 0.2});
    store.mark_fixed(0, 4);
    RngState rng = RngState::seeded(9);
    const SampleResult s = sample_weights(store, rng);
    CHECK(s.weights[0][0] != 1.0); // noise still applied

    const RegConfig cfg{0x1.0p-11, 0.05};
    const GradientPair g = assemble_gradients(store, cfg, {{3.0, 5.0, 7.0}}, s.epsilon);
    CHECK(g.mu[0][0] == 0.0);
    CHECK(g.sigma[0][0] == 0.0);
    // sigma 0.02 sits inside the hinge, so the regularizer pulls it up.
    CHECK(g.mu[0][1] == 5.0);
    CHECK(g.sigma[0][1] == doctest::Approx(5.0 * s.epsilon[1] - cfg.alpha));
    // sigma 0.2 is past the cutoff: pure reparameterized term.
    CHECK(g.mu[0][2] == 7.0);
    CHECK(g.sigma[0][2] == doctest::Approx(7.0 * s.epsilon[2]));
}

TEST_CASE("hinge penalty only counts free sigmas under the cutoff") {
    WeightStore store = flat_store({0.0, 0.0}, {0.01, 0.06});
    const RegConfig cfg{0x1.0p-11, 0.05};
    CHECK(reg_loss(store, cfg) == doctest::Approx(0.04).epsilon(1e-12));
    const auto g = reg_grad(store, cfg);
    CHECK(g[0] == -1.0);
    CHECK(g[1] == 0.0);
    CHECK(training_loss(1.0, store, cfg) == doctest::Approx(1.0 + 0.04 / 2048.0).epsilon(1e-15));

    // Fixing removes a weight from the penalty.
    store.mark_fixed(0, 0);
    CHECK(reg_loss(store, cfg) == 0.0);
}

TEST_CASE("sigma exactly at the cutoff is outside the hinge") {
    WeightStore store = flat_store({0.0}, {0.05});
    const RegConfig cfg{1.0, 0.05};
    CHECK(reg_loss(store, cfg) == 0.0);
    CHECK(reg_grad(store, cfg)[0] == 0.0);
}

TEST_CASE("raw prior is the parabolic product over the bracketing powers of two") {
    // 0.75 sits between 0.5 and 1: 0.0025 * ((0.75-0.5)/0.5) * ((1-0.75)/1)
    CHECK(prior_sigma_raw(0.75) == doctest::Approx(3.125e-4).epsilon(1e-12));
    CHECK(prior_sigma_raw(-0.75) == doctest::Approx(3.125e-4).epsilon(1e-12));
    // Powers of two land on the bracket edge and get exactly zero.
    CHECK(prior_sigma_raw(0.5) == 0.0);
    CHECK(prior_sigma_raw(0.25) == 0.0);
    CHECK(prior_sigma_raw(0.0) == 0.0);
    // Upper relative distance for 0.75 is (1-0.75)/1.
    CHECK(upper_relative_distance(0.75) == doctest::Approx(0.25).epsilon(1e-12));
    // A power of two sits at the lower bracket edge, half an octave below the
    // upper edge, so its upper distance is 0.5 even though its raw prior is 0.
    CHECK(upper_relative_distance(0.5) == 0.5);
    CHECK(upper_relative_distance(0.0) == 0.0);
}

TEST_CASE("type-7 quantile interpolates like numpy") {
    CHECK(quantile_type7({1.0, 2.0, 3.0, 4.0}, 0.75) == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(quantile_type7({5.0}, 0.75) == 5.0);
    CHECK(quantile_type7({2.0, 1.0}, 0.5) == doctest::Approx(1.5));
    CHECK(quantile_type7({1.0, 2.0, 3.0}, 0.0) == 1.0);
    CHECK(quantile_type7({1.0, 2.0, 3.0}, 1.0) == 3.0);
    CHECK_THROWS_AS(quantile_type7({}, 0.5), NumericError);
}

TEST_CASE("prior init clamps, floors zero-mu weights, and skips fixed ones") {
    WeightStore store = flat_store({0.5, 0.75, 0.0, 0.6}, {0.0, 0.0, 0.0, 0.0});
    store.mark_fixed(3, 0);
    const double sigma_before_fixed = store.get(3).sigma;
    const double denom = init_prior_sigma(store);
    CHECK(denom > 0.0);
    // |mu| = 0.5 is a bracket edge: raw 0 clamps to the floor.
    CHECK(store.get(0).sigma == kSigmaFloor);
    CHECK(store.get(2).sigma == kSigmaFloor);
    CHECK(store.get(1).sigma > kSigmaFloor);
    CHECK(store.get(1).sigma <= 0.05);
    CHECK(store.get(3).sigma == sigma_before_fixed);
}

TEST_CASE("a single off-grid weight normalizes its own quartile to one ratio") {
    // upper distances: only 0.75 contributes (0.25); quartile = 0.25.
    WeightStore store = flat_store({0.75}, {0.0});
    init_prior_sigma(store);
    CHECK(store.get(0).sigma == doctest::Approx(3.125e-4 / 0.25).epsilon(1e-12));
}

TEST_CASE("stores with no bracketable weights fall back to a unit denominator") {
    // Zero mu contributes nothing to the quartile sample; with no sample the
    // denominator defaults to 1 and every sigma lands on the floor.
    WeightStore zeros = flat_store({0.0, 0.0}, {0.0, 0.0});
    CHECK(init_prior_sigma(zeros) == 1.0);
    CHECK(zeros.get(0).sigma == kSigmaFloor);
    CHECK(zeros.get(1).sigma == kSigmaFloor);

    // Power-of-two weights do feed the quartile (half-octave distances) even
    // though their own raw prior is zero.
    WeightStore pows = flat_store({0.5, 0.25}, {0.0, 0.0});
    CHECK(init_prior_sigma(pows) == 0.5);
    CHECK(pows.get(0).sigma == kSigmaFloor);
}

TEST_CASE("prior values never leave the clamp range") {
    RngState rng = RngState::seeded(17);
    std::vector<double> mu = rng.gaussian(500);
    WeightStore store = flat_store(mu, std::vector<double>(500, 0.0));
    init_prior_sigma(store);
    for (std::size_t i = 0; i < 500; ++i) {
        const double s = store.get(i).sigma;
        CHECK(s >= kSigmaFloor);
        CHECK(s <= 0.05);
    }
}

TEST_CASE("gradient assembly rejects mismatched shapes") {
    WeightStore store = flat_store({1.0, 2.0}, {0.1, 0.1});
    const RegConfig cfg;
    CHECK_THROWS_AS(assemble_gradients(store, cfg, {{1.0}}, {0.0, 0.0}), ShapeError);
    CHECK_THROWS_AS(assemble_gradients(store, cfg, {{1.0, 1.0}}, {0.0}), ShapeError);
}
