#include "pwfn/matrix.hpp"
#include "pwfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pwfn {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

void check_finite(const Matrix& m, const char* what) {
    for (double v : m.data) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + ": non-finite value encountered");
        }
    }
}

Matrix affine_forward(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    if (x.cols != w.rows) {
        throw ShapeError("affine_forward: input " + shape_str(x.rows, x.cols) +
                         " incompatible with weights " + shape_str(w.rows, w.cols));
    }
    if (!b.empty() && b.size() != w.cols) {
        throw ShapeError("affine_forward: bias length " + std::to_string(b.size()) +
                         " incompatible with weights " + shape_str(w.rows, w.cols));
    }
    Matrix out(x.rows, w.cols);
    for (std::size_t n = 0; n < x.rows; ++n) {
        double* orow = &out.data[n * out.cols];
        if (!b.empty()) {
            std::copy(b.begin(), b.end(), orow);
        }
        const double* xrow = &x.data[n * x.cols];
        for (std::size_t i = 0; i < x.cols; ++i) {
            const double xv = xrow[i];
            if (xv == 0.0) continue;
            const double* wrow = &w.data[i * w.cols];
            for (std::size_t j = 0; j < w.cols; ++j) {
                orow[j] += xv * wrow[j];
            }
        }
    }
    return out;
}

AffineGrads affine_backward(const Matrix& grad_out, const Matrix& x, const Matrix& w) {
    if (grad_out.rows != x.rows || grad_out.cols != w.cols || x.cols != w.rows) {
        throw ShapeError("affine_backward: grad " + shape_str(grad_out.rows, grad_out.cols) +
                         ", input " + shape_str(x.rows, x.cols) +
                         ", weights " + shape_str(w.rows, w.cols) + " disagree");
    }
    AffineGrads g;
    g.grad_input = Matrix(x.rows, x.cols);
    g.grad_weights = Matrix(w.rows, w.cols);
    g.grad_bias.assign(w.cols, 0.0);
    for (std::size_t n = 0; n < x.rows; ++n) {
        const double* grow = &grad_out.data[n * grad_out.cols];
        const double* xrow = &x.data[n * x.cols];
        double* girow = &g.grad_input.data[n * x.cols];
        for (std::size_t j = 0; j < w.cols; ++j) {
            g.grad_bias[j] += grow[j];
        }
        for (std::size_t i = 0; i < x.cols; ++i) {
            const double* wrow = &w.data[i * w.cols];
            double* gwrow = &g.grad_weights.data[i * w.cols];
            double acc = 0.0;
            for (std::size_t j = 0; j < w.cols; ++j) {
                acc += grow[j] * wrow[j];
                gwrow[j] += xrow[i] * grow[j];
            }
            girow[i] = acc;
        }
    }
    return g;
}

Matrix relu_forward(const Matrix& x) {
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        out.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
    }
    return out;
}

Matrix relu_backward(const Matrix& grad_out, const Matrix& x) {
    if (grad_out.rows != x.rows || grad_out.cols != x.cols) {
        throw ShapeError("relu_backward: grad " + shape_str(grad_out.rows, grad_out.cols) +
                         " vs input " + shape_str(x.rows, x.cols));
    }
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        out.data[i] = x.data[i] > 0.0 ? grad_out.data[i] : 0.0;
    }
    return out;
}

CeResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(logits.rows) + " rows");
    }
    const std::size_t batch = logits.rows;
    const std::size_t classes = logits.cols;
    CeResult res;
    res.grad_logits = Matrix(batch, classes);
    double total = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
        const int y = labels[n];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
            throw ConfigError("softmax_cross_entropy: label " + std::to_string(y) +
                              " out of range [0," + std::to_string(classes) + ")");
        }
        const double* row = &logits.data[n * classes];
        double mx = row[0];
        for (std::size_t j = 1; j < classes; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < classes; ++j) sum += std::exp(row[j] - mx);
        const double log_z = mx + std::log(sum);
        total += log_z - row[y];
        double* grow = &res.grad_logits.data[n * classes];
        for (std::size_t j = 0; j < classes; ++j) {
            grow[j] = std::exp(row[j] - log_z) / static_cast<double>(batch);
        }
        grow[y] -= 1.0 / static_cast<double>(batch);
    }
    res.loss = total / static_cast<double>(batch);
    return res;
}

} // namespace pwfn
