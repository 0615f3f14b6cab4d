#include "pwfn/errors.hpp"
#include "pwfn/matrix.hpp"

#include <doctest.h>

#include <cmath>

using namespace pwfn;

TEST_CASE("affine forward matches hand computation") {
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 1.0;
    Matrix w(2, 2);
    w(0, 0) = 2.0;
    w(0, 1) = 3.0;
    w(1, 0) = 4.0;
    w(1, 1) = 5.0;
    const Matrix out = affine_forward(x, w, {1.0, 1.0});
    CHECK(out.rows == 1);
    CHECK(out.cols == 2);
    CHECK(out(0, 0) == doctest::Approx(7.0));
    CHECK(out(0, 1) == doctest::Approx(9.0));
}

TEST_CASE("affine forward rejects mismatched shapes") {
    Matrix x(1, 3);
    Matrix w(2, 2);
    CHECK_THROWS_AS(affine_forward(x, w, {}), ShapeError);
    Matrix x2(1, 2);
    CHECK_THROWS_AS(affine_forward(x2, w, {1.0}), ShapeError);
}

TEST_CASE("affine backward reproduces the three gradient pieces") {
    // y = x w + b with x = [1, 2], w = [[1, -1], [0.5, 2]], grad_out = [1, 1].
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 2.0;
    Matrix w(2, 2);
    w(0, 0) = 1.0;
    w(0, 1) = -1.0;
    w(1, 0) = 0.5;
    w(1, 1) = 2.0;
    Matrix g(1, 2);
    g(0, 0) = 1.0;
    g(0, 1) = 1.0;
    const AffineGrads back = affine_backward(g, x, w);
    CHECK(back.grad_input(0, 0) == doctest::Approx(0.0)); // 1*1 + 1*(-1)
    CHECK(back.grad_input(0, 1) == doctest::Approx(2.5)); // 1*0.5 + 1*2
    CHECK(back.grad_weights(0, 0) == doctest::Approx(1.0));
    CHECK(back.grad_weights(1, 1) == doctest::Approx(2.0));
    CHECK(back.grad_bias[0] == doctest::Approx(1.0));
    CHECK(back.grad_bias[1] == doctest::Approx(1.0));
}

TEST_CASE("relu zeroes negatives and blocks their gradient") {
    Matrix x(1, 3);
    x(0, 0) = -1.0;
    x(0, 1) = 0.0;
    x(0, 2) = 2.0;
    const Matrix f = relu_forward(x);
    CHECK(f(0, 0) == 0.0);
    CHECK(f(0, 1) == 0.0);
    CHECK(f(0, 2) == 2.0);
    Matrix g(1, 3, 1.0);
    const Matrix b = relu_backward(g, x);
    CHECK(b(0, 0) == 0.0);
    CHECK(b(0, 1) == 0.0); // subgradient at 0 is 0
    CHECK(b(0, 2) == 1.0);
}

TEST_CASE("uniform two-class logits cost ln 2") {
    Matrix logits(1, 2, 0.0);
    const CeResult res = softmax_cross_entropy(logits, {0});
    CHECK(res.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(res.grad_logits(0, 0) == doctest::Approx(-0.5));
    CHECK(res.grad_logits(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("cross entropy averages over the batch") {
    Matrix logits(2, 2, 0.0);
    logits(1, 0) = 100.0; // saturated correct prediction, ~0 loss
    const CeResult res = softmax_cross_entropy(logits, {0, 0});
    CHECK(res.loss == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-9));
    // Gradients carry the 1/batch factor.
    CHECK(res.grad_logits(0, 0) == doctest::Approx(-0.25));
}

TEST_CASE("cross entropy survives large logits") {
    Matrix logits(1, 3);
    logits(0, 0) = 1000.0;
    logits(0, 1) = 1000.0;
    logits(0, 2) = -1000.0;
    const CeResult res = softmax_cross_entropy(logits, {1});
    CHECK(std::isfinite(res.loss));
    CHECK(res.loss == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("out-of-range labels are a config error") {
    Matrix logits(1, 2, 0.0);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {2}), ConfigError);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {-1}), ConfigError);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {0, 1}), ShapeError);
}

TEST_CASE("check_finite flags nan and infinity") {
    Matrix m(1, 2, 1.0);
    CHECK_NOTHROW(check_finite(m, "m"));
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(check_finite(m, "m"), NumericError);
    m(0, 1) = INFINITY;
    CHECK_THROWS_AS(check_finite(m, "m"), NumericError);
}
