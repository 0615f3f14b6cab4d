#include "pwfn/optimizer.hpp"
#include "pwfn/errors.hpp"

#include <string>

namespace pwfn {

SgdState SgdState::init(const std::vector<std::size_t>& tensor_sizes,
                        double learning_rate, double momentum) {
    if (learning_rate <= 0.0) {
        throw ConfigError("sgd: learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw ConfigError("sgd: momentum must be in [0,1)");
    }
    SgdState st;
    st.learning_rate = learning_rate;
    st.momentum = momentum;
    st.buffers.reserve(tensor_sizes.size());
    for (std::size_t n : tensor_sizes) {
        st.buffers.emplace_back(n, 0.0);
    }
    return st;
}

void SgdState::step(std::size_t idx, double* params, const double* grads, std::size_t n) {
    if (idx >= buffers.size() || buffers[idx].size() != n) {
        throw ShapeError("sgd: tensor " + std::to_string(idx) + " size mismatch");
    }
    double* buf = buffers[idx].data();
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] = momentum * buf[i] + grads[i];
        params[i] -= learning_rate * buf[i];
    }
}

} // namespace pwfn
