#pragma once

#include "pwfn/matrix.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pwfn {

// MLP shape: layer_dims = [input, hidden..., output], ReLU between affine layers.
struct NetworkSpec {
    std::vector<std::size_t> layer_dims;
    bool bias_included = true;

    void validate() const;

    std::size_t affine_count() const { return layer_dims.size() - 1; }
    std::size_t tensors_per_layer() const { return bias_included ? 2u : 1u; }
    std::size_t tensor_count() const { return affine_count() * tensors_per_layer(); }

    // Tensor order is [W0, b0, W1, b1, ...] (biases omitted when bias_included
    // is false). Bias tensors report rows=1.
    std::size_t tensor_rows(std::size_t idx) const;
    std::size_t tensor_cols(std::size_t idx) const;
    std::size_t tensor_size(std::size_t idx) const { return tensor_rows(idx) * tensor_cols(idx); }
    bool tensor_is_bias(std::size_t idx) const;
    std::string tensor_name(std::size_t idx) const;
    std::size_t total_params() const;
};

// Activations retained by the forward pass; backward consumes them in reverse.
struct ForwardCache {
    std::vector<Matrix> inputs; // input to each affine layer, post-ReLU
};

// params is a flat view in NetworkSpec tensor order; each entry points at
// tensor_size(idx) doubles.
Matrix network_forward(const NetworkSpec& spec, const std::vector<const double*>& params,
                       const Matrix& x, ForwardCache* cache);

// Returns per-tensor gradients in the same order/layout as params.
std::vector<std::vector<double>> network_backward(const NetworkSpec& spec,
                                                  const std::vector<const double*>& params,
                                                  const ForwardCache& cache,
                                                  const Matrix& grad_logits);

} // namespace pwfn
