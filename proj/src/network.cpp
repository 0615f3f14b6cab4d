#include "pwfn/network.hpp"
#include "pwfn/errors.hpp"

#include <algorithm>

namespace pwfn {

void NetworkSpec::validate() const {
    if (layer_dims.size() < 2) {
        throw ConfigError("network: need at least input and output layer dims");
    }
    for (std::size_t d : layer_dims) {
        if (d == 0) throw ConfigError("network: zero-width layer");
        if (d > (std::size_t{1} << 20)) throw ConfigError("network: layer width is implausible");
    }
}

std::size_t NetworkSpec::tensor_rows(std::size_t idx) const {
    const std::size_t layer = idx / tensors_per_layer();
    return tensor_is_bias(idx) ? 1 : layer_dims[layer];
}

std::size_t NetworkSpec::tensor_cols(std::size_t idx) const {
    const std::size_t layer = idx / tensors_per_layer();
    return layer_dims[layer + 1];
}

bool NetworkSpec::tensor_is_bias(std::size_t idx) const {
    return bias_included && (idx % 2 == 1);
}

std::string NetworkSpec::tensor_name(std::size_t idx) const {
    const std::size_t layer = idx / tensors_per_layer();
    return (tensor_is_bias(idx) ? "b" : "W") + std::to_string(layer);
}

std::size_t NetworkSpec::total_params() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < tensor_count(); ++i) total += tensor_size(i);
    return total;
}

namespace {

Matrix weight_matrix(const NetworkSpec& spec, const std::vector<const double*>& params,
                     std::size_t layer) {
    const std::size_t idx = layer * spec.tensors_per_layer();
    Matrix w(spec.tensor_rows(idx), spec.tensor_cols(idx));
    std::copy(params[idx], params[idx] + w.size(), w.data.begin());
    return w;
}

std::vector<double> bias_vector(const NetworkSpec& spec, const std::vector<const double*>& params,
                                std::size_t layer) {
    if (!spec.bias_included) return {};
    const std::size_t idx = layer * 2 + 1;
    return std::vector<double>(params[idx], params[idx] + spec.tensor_cols(idx));
}

} // namespace

Matrix network_forward(const NetworkSpec& spec, const std::vector<const double*>& params,
                       const Matrix& x, ForwardCache* cache) {
    if (params.size() != spec.tensor_count()) {
        throw ShapeError("network_forward: expected " + std::to_string(spec.tensor_count()) +
                         " tensors, got " + std::to_string(params.size()));
    }
    if (cache) cache->inputs.clear();
    Matrix h = x;
    for (std::size_t layer = 0; layer < spec.affine_count(); ++layer) {
        if (cache) cache->inputs.push_back(h);
        Matrix z = affine_forward(h, weight_matrix(spec, params, layer),
                                  bias_vector(spec, params, layer));
        h = (layer + 1 < spec.affine_count()) ? relu_forward(z) : std::move(z);
    }
    return h;
}

std::vector<std::vector<double>> network_backward(const NetworkSpec& spec,
                                                  const std::vector<const double*>& params,
                                                  const ForwardCache& cache,
                                                  const Matrix& grad_logits) {
    if (cache.inputs.size() != spec.affine_count()) {
        throw ShapeError("network_backward: cache has " + std::to_string(cache.inputs.size()) +
                         " layers, spec wants " + std::to_string(spec.affine_count()));
    }
    std::vector<std::vector<double>> grads(spec.tensor_count());
    Matrix g = grad_logits;
    for (std::size_t layer = spec.affine_count(); layer-- > 0;) {
        AffineGrads ag = affine_backward(g, cache.inputs[layer], weight_matrix(spec, params, layer));
        const std::size_t widx = layer * spec.tensors_per_layer();
        grads[widx] = std::move(ag.grad_weights.data);
        if (spec.bias_included) {
            grads[widx + 1] = std::move(ag.grad_bias);
        }
        if (layer > 0) {
            // cache.inputs[layer] is the previous ReLU's output; positive there
            // means the preactivation was positive too.
            g = relu_backward(ag.grad_input, cache.inputs[layer]);
        }
    }
    return grads;
}

} // namespace pwfn
