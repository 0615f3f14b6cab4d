#include "pwfn/bayes.hpp"
#include "pwfn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pwfn {

WeightStore WeightStore::from_spec(const NetworkSpec& spec) {
    spec.validate();
    WeightStore store;
    store.tensors.reserve(spec.tensor_count());
    for (std::size_t i = 0; i < spec.tensor_count(); ++i) {
        WeightTensor t;
        t.name = spec.tensor_name(i);
        t.rows = spec.tensor_rows(i);
        t.cols = spec.tensor_cols(i);
        const std::size_t n = t.rows * t.cols;
        t.mu.assign(n, 0.0);
        t.sigma.assign(n, 0.0);
        t.fixed.assign(n, 0);
        t.cluster.assign(n, kNoCluster);
        store.tensors.push_back(std::move(t));
    }
    return store;
}

std::size_t WeightStore::total() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
}

std::size_t WeightStore::fixed_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) {
        for (std::uint8_t f : t.fixed) n += f ? 1 : 0;
    }
    return n;
}

std::pair<std::size_t, std::size_t> WeightStore::locate(std::size_t flat) const {
    for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
        if (flat < tensors[ti].size()) return {ti, flat};
        flat -= tensors[ti].size();
    }
    throw ShapeError("weight index out of range");
}

GaussianWeight WeightStore::get(std::size_t flat) const {
    const auto [ti, k] = locate(flat);
    const WeightTensor& t = tensors[ti];
    return GaussianWeight{t.mu[k], t.sigma[k], t.fixed[k] != 0, t.cluster[k]};
}

void WeightStore::set_mu(std::size_t flat, double v) {
    const auto [ti, k] = locate(flat);
    tensors[ti].mu[k] = v;
}

void WeightStore::set_sigma(std::size_t flat, double v) {
    const auto [ti, k] = locate(flat);
    tensors[ti].sigma[k] = v;
}

void WeightStore::mark_fixed(std::size_t flat, std::uint32_t cluster_index) {
    const auto [ti, k] = locate(flat);
    tensors[ti].fixed[k] = 1;
    tensors[ti].cluster[k] = cluster_index;
}

SampleResult sample_weights(const WeightStore& store, RngState& rng) {
    SampleResult res;
    res.epsilon = rng.gaussian(store.total());
    res.weights.reserve(store.tensors.size());
    std::size_t cursor = 0;
    for (const auto& t : store.tensors) {
        std::vector<double> w(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            w[k] = t.mu[k] + t.sigma[k] * res.epsilon[cursor + k];
        }
        cursor += t.size();
        res.weights.push_back(std::move(w));
    }
    return res;
}

GradientPair assemble_gradients(const WeightStore& store, const RegConfig& cfg,
                                const std::vector<std::vector<double>>& grad_w,
                                const std::vector<double>& epsilon) {
    if (grad_w.size() != store.tensors.size() || epsilon.size() != store.total()) {
        throw ShapeError("assemble_gradients: record sizes disagree with store");
    }
    GradientPair g;
    g.mu.reserve(store.tensors.size());
    g.sigma.reserve(store.tensors.size());
    std::size_t cursor = 0;
    for (std::size_t ti = 0; ti < store.tensors.size(); ++ti) {
        const WeightTensor& t = store.tensors[ti];
        if (grad_w[ti].size() != t.size()) {
            throw ShapeError("assemble_gradients: tensor " + t.name + " gradient size mismatch");
        }
        std::vector<double> gm(t.size()), gs(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t.fixed[k]) {
                gm[k] = 0.0;
                gs[k] = 0.0;
            } else {
                const double gw = grad_w[ti][k];
                gm[k] = gw;
                gs[k] = gw * epsilon[cursor + k] + (t.sigma[k] < cfg.cutoff ? -cfg.alpha : 0.0);
            }
        }
        cursor += t.size();
        g.mu.push_back(std::move(gm));
        g.sigma.push_back(std::move(gs));
    }
    return g;
}

double reg_loss(const WeightStore& store, const RegConfig& cfg) {
    double total = 0.0;
    for (const auto& t : store.tensors) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!t.fixed[k] && t.sigma[k] < cfg.cutoff) {
                total += cfg.cutoff - t.sigma[k];
            }
        }
    }
    return total;
}

std::vector<double> reg_grad(const WeightStore& store, const RegConfig& cfg) {
    std::vector<double> g(store.total(), 0.0);
    std::size_t cursor = 0;
    for (const auto& t : store.tensors) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!t.fixed[k] && t.sigma[k] < cfg.cutoff) {
                g[cursor + k] = -1.0;
            }
        }
        cursor += t.size();
    }
    return g;
}

double training_loss(double data_loss, const WeightStore& store, const RegConfig& cfg) {
    return data_loss + cfg.alpha * reg_loss(store, cfg);
}

namespace {

// Bracketing powers of two of |mu|: lo = 2^x <= |mu| <= 2^(x+1) = hi, with
// lo == |mu| when |mu| is itself a power of two.
void bracket_pow2(double abs_mu, double& lo, double& hi) {
    int e = 0;
    std::frexp(abs_mu, &e); // abs_mu = m * 2^e, m in [0.5, 1)
    lo = std::ldexp(1.0, e - 1);
    hi = std::ldexp(1.0, e);
}

} // namespace

double prior_sigma_raw(double mu) {
    const double a = std::fabs(mu);
    if (a == 0.0) return 0.0;
    double lo = 0.0, hi = 0.0;
    bracket_pow2(a, lo, hi);
    return 0.0025 * ((a - lo) / lo) * ((hi - a) / hi);
}

double upper_relative_distance(double mu) {
    const double a = std::fabs(mu);
    if (a == 0.0) return 0.0;
    double lo = 0.0, hi = 0.0;
    bracket_pow2(a, lo, hi);
    return (hi - a) / hi;
}

double quantile_type7(std::vector<double> v, double q) {
    if (v.empty()) throw NumericError("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double init_prior_sigma(WeightStore& store) {
    std::vector<double> upper;
    for (const auto& t : store.tensors) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!t.fixed[k] && t.mu[k] != 0.0) {
                upper.push_back(upper_relative_distance(t.mu[k]));
            }
        }
    }
    const double quart = upper.empty() ? 1.0 : quantile_type7(upper, 0.75);
    const double denom = quart > 0.0 ? quart : 1.0;
    for (auto& t : store.tensors) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t.fixed[k]) continue;
            const double raw = prior_sigma_raw(t.mu[k]) / denom;
            t.sigma[k] = std::clamp(raw, kSigmaFloor, 0.05);
        }
    }
    return denom;
}

} // namespace pwfn
