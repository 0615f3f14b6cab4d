#pragma once

#include <cstddef>
#include <vector>

namespace pwfn {

// Classic heavy-ball momentum: buf <- momentum*buf + grad; param <- param - lr*buf.
// No Nesterov, no weight decay.
struct SgdState {
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::vector<std::vector<double>> buffers;

    static SgdState init(const std::vector<std::size_t>& tensor_sizes,
                         double learning_rate, double momentum);

    // Updates one tensor in place; idx selects the matching momentum buffer.
    void step(std::size_t idx, double* params, const double* grads, std::size_t n);
};

} // namespace pwfn
