#pragma once

#include <cstddef>
#include <vector>

namespace pwfn {

// Dense row-major matrix of doubles. Checkpoints store float32; all arithmetic
// stays in double to keep the long fix-round pipeline drift-free.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }
};

struct AffineGrads {
    Matrix grad_input;
    Matrix grad_weights;
    std::vector<double> grad_bias;
};

struct CeResult {
    double loss = 0.0;
    Matrix grad_logits;
};

// out[n,j] = sum_i x[n,i] * w[i,j] + b[j]
Matrix affine_forward(const Matrix& x, const Matrix& w, const std::vector<double>& b);
AffineGrads affine_backward(const Matrix& grad_out, const Matrix& x, const Matrix& w);

Matrix relu_forward(const Matrix& x);
// Subgradient at exactly 0 is 0: grad passes only where x > 0.
Matrix relu_backward(const Matrix& grad_out, const Matrix& x);

// Mean-over-batch cross entropy with log-sum-exp stabilization.
// grad_logits = (softmax - onehot) / batch.
CeResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels);

// Throws NumericError if any entry is NaN or infinite.
void check_finite(const Matrix& m, const char* what);

} // namespace pwfn
