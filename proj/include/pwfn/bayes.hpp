#pragma once

#include "pwfn/network.hpp"
#include "pwfn/rng.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace pwfn {

inline constexpr double kSigmaFloor = 0x1.0p-30;
inline constexpr std::uint32_t kNoCluster = std::numeric_limits<std::uint32_t>::max();

// View of one weight's distribution state.
struct GaussianWeight {
    double mu = 0.0;
    double sigma = 0.0;
    bool fixed = false;
    std::uint32_t cluster_index = kNoCluster;
};

struct WeightTensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<std::uint8_t> fixed;
    std::vector<std::uint32_t> cluster;

    std::size_t size() const { return mu.size(); }
};

// All trainable distributions, tensor-major. Global weight index runs over
// tensors in NetworkSpec order, row-major inside each tensor; clustering
// tie-breaks depend on that ordering being stable.
struct WeightStore {
    std::vector<WeightTensor> tensors;

    static WeightStore from_spec(const NetworkSpec& spec);

    std::size_t total() const;
    std::size_t fixed_count() const;

    GaussianWeight get(std::size_t flat) const;
    void set_mu(std::size_t flat, double v);
    void set_sigma(std::size_t flat, double v);
    void mark_fixed(std::size_t flat, std::uint32_t cluster_index);

    // (tensor, offset) for a global index.
    std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;
};

struct RegConfig {
    double alpha = 0x1.0p-11;
    double cutoff = 0.05; // S
};

struct SampleResult {
    std::vector<std::vector<double>> weights; // per tensor, same layout as mu
    std::vector<double> epsilon;              // flat, global index order
};

// w_i = mu_i + sigma_i * eps_i. Fixed weights sample like free ones; their
// parameters are frozen, not their noise.
SampleResult sample_weights(const WeightStore& store, RngState& rng);

struct GradientPair {
    std::vector<std::vector<double>> mu;    // per tensor
    std::vector<std::vector<double>> sigma; // per tensor
};

// grad_mu = grad_w; grad_sigma = grad_w*eps + alpha * d(L_REG)/d(sigma).
// Fixed weights get exact zeros for both.
GradientPair assemble_gradients(const WeightStore& store, const RegConfig& cfg,
                                const std::vector<std::vector<double>>& grad_w,
                                const std::vector<double>& epsilon);

// Sum over free weights of (S - sigma) where sigma < S.
double reg_loss(const WeightStore& store, const RegConfig& cfg);

// -1 for free sigma strictly below S, else 0 (flat, global index order).
std::vector<double> reg_grad(const WeightStore& store, const RegConfig& cfg);

double training_loss(double data_loss, const WeightStore& store, const RegConfig& cfg);

// Parabolic product of relative distances to the bracketing powers of two,
// divided by the third quartile of upper relative distances, clamped to
// [2^-30, 0.05]. mu == 0 gets the floor. Returns the quartile used.
double init_prior_sigma(WeightStore& store);

// Raw Eq. 5 value for one mu, before quartile reweighting and clamping.
double prior_sigma_raw(double mu);

// Upper relative distance | |mu| - 2^(x+1) | / 2^(x+1) feeding the quartile.
double upper_relative_distance(double mu);

// Linear-interpolation quantile (the numpy/R type-7 rule) on a copy of v.
double quantile_type7(std::vector<double> v, double q);

} // namespace pwfn
