#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include <bertdetect/errors.hpp>
#include <bertdetect/rng.hpp>
#include <bertdetect/tensor.hpp>

#include "reference_ops.hpp"
#include "support.hpp"

using namespace bertdetect;
using refops::Vec;

namespace {

constexpr double kOpTol = 1e-4;
constexpr int kCases = 20;

std::vector<float> to_f32(const Vec& v) { return std::vector<float>(v.begin(), v.end()); }

Vec random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    Vec v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

double max_grad_error(const TensorPtr& t, const Vec& fd) {
    REQUIRE(t->grad.size() == fd.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        worst = std::max(worst, refops::grad_error(t->grad[i], fd[i]));
    }
    return worst;
}

// Scalar objective sum(w * y) used to give every output coordinate a
// distinct, nonzero downstream gradient.
double ref_wsum(const Vec& w, const Vec& y) { return refops::sum(refops::mul(w, y)); }

TensorPtr engine_wsum(Graph& g, const Vec& w, const TensorPtr& y) {
    const TensorPtr wt = make_tensor(y->shape, to_f32(w));
    return sum_all(g, mul(g, y, wt));
}

}  // namespace

// ---- gradient checks against f64 finite differences ----

TEST_CASE("add gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(100 + c);
        const std::size_t m = 2 + rng.below(3), n = 2 + rng.below(3);
        const Vec a0 = random_vec(rng, m * n), b0 = random_vec(rng, m * n);
        const Vec w = random_vec(rng, m * n);
        Graph g;
        const TensorPtr a = make_tensor({m, n}, to_f32(a0), true);
        const TensorPtr b = make_tensor({m, n}, to_f32(b0), true);
        g.backward(engine_wsum(g, w, add(g, a, b)));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, refops::add(x, b0)); };
        const auto fb = [&](const Vec& x) { return ref_wsum(w, refops::add(a0, x)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("mul gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(200 + c);
        const std::size_t n = 4 + rng.below(8);
        const Vec a0 = random_vec(rng, n), b0 = random_vec(rng, n), w = random_vec(rng, n);
        Graph g;
        const TensorPtr a = make_tensor({n}, to_f32(a0), true);
        const TensorPtr b = make_tensor({n}, to_f32(b0), true);
        g.backward(engine_wsum(g, w, mul(g, a, b)));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, refops::mul(x, b0)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        const auto fb = [&](const Vec& x) { return ref_wsum(w, refops::mul(a0, x)); };
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("scale gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(300 + c);
        const std::size_t n = 3 + rng.below(6);
        const float s = static_cast<float>(rng.uniform(-1.5, 1.5));
        const Vec a0 = random_vec(rng, n), w = random_vec(rng, n);
        Graph g;
        const TensorPtr a = make_tensor({n}, to_f32(a0), true);
        g.backward(engine_wsum(g, w, scale(g, a, s)));
        const auto f = [&](const Vec& x) {
            return ref_wsum(w, refops::scale(x, static_cast<double>(s)));
        };
        REQUIRE(max_grad_error(a, refops::finite_difference(f, a0)) < kOpTol);
    }
}

TEST_CASE("sum_all gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(400 + c);
        const std::size_t m = 2 + rng.below(3), n = 2 + rng.below(3);
        const Vec a0 = random_vec(rng, m * n);
        Graph g;
        const TensorPtr a = make_tensor({m, n}, to_f32(a0), true);
        const TensorPtr loss = sum_all(g, a);
        REQUIRE(loss->data[0] ==
                Catch::Approx(refops::sum(a0)).margin(1e-4));
        g.backward(loss);
        const auto f = [&](const Vec& x) { return refops::sum(x); };
        REQUIRE(max_grad_error(a, refops::finite_difference(f, a0)) < kOpTol);
    }
}

TEST_CASE("bias_add gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(500 + c);
        const std::size_t m = 2 + rng.below(3), h = 2 + rng.below(4);
        const Vec a0 = random_vec(rng, m * h), b0 = random_vec(rng, h);
        const Vec w = random_vec(rng, m * h);
        Graph g;
        const TensorPtr a = make_tensor({m, h}, to_f32(a0), true);
        const TensorPtr b = make_tensor({h}, to_f32(b0), true);
        g.backward(engine_wsum(g, w, bias_add(g, a, b)));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, refops::bias_add(x, b0)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        const auto fb = [&](const Vec& x) { return ref_wsum(w, refops::bias_add(a0, x)); };
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("transpose gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(600 + c);
        const std::size_t m = 2 + rng.below(3), n = 2 + rng.below(4);
        const Vec a0 = random_vec(rng, m * n), w = random_vec(rng, m * n);
        Graph g;
        const TensorPtr a = make_tensor({m, n}, to_f32(a0), true);
        const TensorPtr t = transpose(g, a);
        REQUIRE(t->shape == std::vector<std::size_t>{n, m});
        g.backward(engine_wsum(g, w, t));
        const auto f = [&](const Vec& x) { return ref_wsum(w, refops::transpose(x, m, n)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(f, a0)) < kOpTol);
    }
}

TEST_CASE("slice_cols gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(700 + c);
        const std::size_t m = 2 + rng.below(3), n = 3 + rng.below(4);
        const std::size_t c0 = rng.below(n - 1);
        const std::size_t c1 = c0 + 1 + rng.below(n - c0 - 1);
        const Vec a0 = random_vec(rng, m * n), w = random_vec(rng, m * (c1 - c0));
        const auto ref_slice = [&](const Vec& x) {
            Vec y(m * (c1 - c0));
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = c0; j < c1; ++j) y[i * (c1 - c0) + (j - c0)] = x[i * n + j];
            }
            return y;
        };
        Graph g;
        const TensorPtr a = make_tensor({m, n}, to_f32(a0), true);
        const TensorPtr s = slice_cols(g, a, c0, c1);
        REQUIRE(s->shape == std::vector<std::size_t>{m, c1 - c0});
        g.backward(engine_wsum(g, w, s));
        const auto f = [&](const Vec& x) { return ref_wsum(w, ref_slice(x)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(f, a0)) < kOpTol);
    }
}

TEST_CASE("concat_cols gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(800 + c);
        const std::size_t m = 2 + rng.below(3), n1 = 1 + rng.below(3), n2 = 1 + rng.below(3);
        const Vec a0 = random_vec(rng, m * n1), b0 = random_vec(rng, m * n2);
        const Vec w = random_vec(rng, m * (n1 + n2));
        const auto ref_cc = [&](const Vec& x, const Vec& y) {
            Vec out(m * (n1 + n2));
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n1; ++j) out[i * (n1 + n2) + j] = x[i * n1 + j];
                for (std::size_t j = 0; j < n2; ++j) out[i * (n1 + n2) + n1 + j] = y[i * n2 + j];
            }
            return out;
        };
        Graph g;
        const TensorPtr a = make_tensor({m, n1}, to_f32(a0), true);
        const TensorPtr b = make_tensor({m, n2}, to_f32(b0), true);
        const TensorPtr cc = concat_cols(g, {a, b});
        REQUIRE(cc->shape == std::vector<std::size_t>{m, n1 + n2});
        g.backward(engine_wsum(g, w, cc));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, ref_cc(x, b0)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        const auto fb = [&](const Vec& y) { return ref_wsum(w, ref_cc(a0, y)); };
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("concat_rows gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(900 + c);
        const std::size_t n = 2 + rng.below(3), m1 = 1 + rng.below(3), m2 = 1 + rng.below(3);
        const Vec a0 = random_vec(rng, m1 * n), b0 = random_vec(rng, m2 * n);
        const Vec w = random_vec(rng, (m1 + m2) * n);
        const auto ref_cr = [&](const Vec& x, const Vec& y) {
            Vec out = x;
            out.insert(out.end(), y.begin(), y.end());
            return out;
        };
        Graph g;
        const TensorPtr a = make_tensor({m1, n}, to_f32(a0), true);
        const TensorPtr b = make_tensor({m2, n}, to_f32(b0), true);
        const TensorPtr cr = concat_rows(g, {a, b});
        REQUIRE(cr->shape == std::vector<std::size_t>{m1 + m2, n});
        g.backward(engine_wsum(g, w, cr));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, ref_cr(x, b0)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        const auto fb = [&](const Vec& y) { return ref_wsum(w, ref_cr(a0, y)); };
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("embedding_lookup gradients accumulate over repeated ids") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1000 + c);
        const std::size_t v = 5 + rng.below(4), h = 2 + rng.below(3);
        std::vector<int> ids(6);
        for (int& id : ids) id = static_cast<int>(rng.below(v));
        ids[1] = ids[0];  // force one repeat
        const Vec t0 = random_vec(rng, v * h), w = random_vec(rng, ids.size() * h);
        Graph g;
        const TensorPtr table = make_tensor({v, h}, to_f32(t0), true);
        g.backward(engine_wsum(g, w, embedding_lookup(g, table, ids)));
        const auto f = [&](const Vec& x) {
            return ref_wsum(w, refops::embedding_lookup(x, h, ids));
        };
        REQUIRE(max_grad_error(table, refops::finite_difference(f, t0)) < kOpTol);
    }
}

TEST_CASE("matmul gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1100 + c);
        const std::size_t m = 2 + rng.below(3), k = 2 + rng.below(3), n = 2 + rng.below(3);
        const Vec a0 = random_vec(rng, m * k), b0 = random_vec(rng, k * n);
        const Vec w = random_vec(rng, m * n);
        Graph g;
        const TensorPtr a = make_tensor({m, k}, to_f32(a0), true);
        const TensorPtr b = make_tensor({k, n}, to_f32(b0), true);
        g.backward(engine_wsum(g, w, matmul(g, a, b)));
        const auto fa = [&](const Vec& x) { return ref_wsum(w, refops::matmul(x, m, k, b0, n)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(fa, a0)) < kOpTol);
        const auto fb = [&](const Vec& x) { return ref_wsum(w, refops::matmul(a0, m, k, x, n)); };
        REQUIRE(max_grad_error(b, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("softmax gradients and row sums") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1200 + c);
        const std::size_t m = 2 + rng.below(3), n = 2 + rng.below(4);
        const Vec a0 = random_vec(rng, m * n), w = random_vec(rng, m * n);
        Graph g;
        const TensorPtr a = make_tensor({m, n}, to_f32(a0), true);
        const TensorPtr s = softmax(g, a);
        for (std::size_t r = 0; r < m; ++r) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += s->data[r * n + j];
            REQUIRE(row == Catch::Approx(1.0).margin(1e-5));
        }
        g.backward(engine_wsum(g, w, s));
        const auto f = [&](const Vec& x) { return ref_wsum(w, refops::softmax(x, m, n)); };
        REQUIRE(max_grad_error(a, refops::finite_difference(f, a0)) < kOpTol);
    }
}

TEST_CASE("layer_norm gradients for input gamma and beta") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1300 + c);
        const std::size_t m = 2 + rng.below(3), h = 3 + rng.below(4);
        const Vec x0 = random_vec(rng, m * h), g0 = random_vec(rng, h, 0.5, 1.5);
        const Vec b0 = random_vec(rng, h, -0.5, 0.5), w = random_vec(rng, m * h);
        Graph g;
        const TensorPtr x = make_tensor({m, h}, to_f32(x0), true);
        const TensorPtr gamma = make_tensor({h}, to_f32(g0), true);
        const TensorPtr beta = make_tensor({h}, to_f32(b0), true);
        g.backward(engine_wsum(g, w, layer_norm(g, x, gamma, beta)));
        const auto fx = [&](const Vec& v) {
            return ref_wsum(w, refops::layer_norm(v, m, h, g0, b0, 1e-12));
        };
        REQUIRE(max_grad_error(x, refops::finite_difference(fx, x0)) < kOpTol);
        const auto fg = [&](const Vec& v) {
            return ref_wsum(w, refops::layer_norm(x0, m, h, v, b0, 1e-12));
        };
        REQUIRE(max_grad_error(gamma, refops::finite_difference(fg, g0)) < kOpTol);
        const auto fb = [&](const Vec& v) {
            return ref_wsum(w, refops::layer_norm(x0, m, h, g0, v, 1e-12));
        };
        REQUIRE(max_grad_error(beta, refops::finite_difference(fb, b0)) < kOpTol);
    }
}

TEST_CASE("layer_norm normalizes rows before the affine") {
    Graph g;
    const TensorPtr x = make_tensor({2, 4}, {1.0f, 2.0f, 3.0f, 4.0f, -1.0f, 0.0f, 3.0f, 2.0f});
    const TensorPtr gamma = make_tensor({4}, {1.0f, 1.0f, 1.0f, 1.0f});
    const TensorPtr beta = make_tensor({4}, {0.0f, 0.0f, 0.0f, 0.0f});
    const TensorPtr y = layer_norm(g, x, gamma, beta);
    for (std::size_t r = 0; r < 2; ++r) {
        double mean = 0.0, var = 0.0;
        for (std::size_t j = 0; j < 4; ++j) mean += y->data[r * 4 + j];
        mean /= 4.0;
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = y->data[r * 4 + j] - mean;
            var += d * d;
        }
        var /= 4.0;
        REQUIRE(mean == Catch::Approx(0.0).margin(1e-5));
        REQUIRE(var == Catch::Approx(1.0).margin(1e-4));
    }
}

TEST_CASE("gelu gradients and known values") {
    Graph probe;
    const TensorPtr zero_in = make_tensor({1}, std::vector<float>{0.0f});
    REQUIRE(gelu(probe, zero_in)->data[0] == Catch::Approx(0.0).margin(1e-7));
    const TensorPtr big = make_tensor({2}, {6.0f, -6.0f});
    const TensorPtr big_out = gelu(probe, big);
    REQUIRE(big_out->data[0] == Catch::Approx(6.0).margin(1e-4));
    REQUIRE(big_out->data[1] == Catch::Approx(0.0).margin(1e-4));
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1400 + c);
        const std::size_t n = 4 + rng.below(6);
        const Vec x0 = random_vec(rng, n), w = random_vec(rng, n);
        Graph g;
        const TensorPtr x = make_tensor({n}, to_f32(x0), true);
        g.backward(engine_wsum(g, w, gelu(g, x)));
        const auto f = [&](const Vec& v) { return ref_wsum(w, refops::gelu(v)); };
        REQUIRE(max_grad_error(x, refops::finite_difference(f, x0)) < kOpTol);
    }
}

TEST_CASE("tanh gradients") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1500 + c);
        const std::size_t n = 4 + rng.below(6);
        const Vec x0 = random_vec(rng, n), w = random_vec(rng, n);
        Graph g;
        const TensorPtr x = make_tensor({n}, to_f32(x0), true);
        g.backward(engine_wsum(g, w, tanh_op(g, x)));
        const auto f = [&](const Vec& v) { return ref_wsum(w, refops::tanh_v(v)); };
        REQUIRE(max_grad_error(x, refops::finite_difference(f, x0)) < kOpTol);
    }
}

TEST_CASE("cross_entropy gradients with ignored rows") {
    for (int c = 0; c < kCases; ++c) {
        Rng rng(1600 + c);
        const std::size_t b = 3 + rng.below(3), k = 2 + rng.below(3);
        const Vec l0 = random_vec(rng, b * k);
        std::vector<int> targets(b);
        for (auto& t : targets) t = static_cast<int>(rng.below(k));
        targets[b - 1] = -1;  // one ignored row
        Graph g;
        const TensorPtr logits = make_tensor({b, k}, to_f32(l0), true);
        const TensorPtr loss = cross_entropy(g, logits, targets, -1);
        REQUIRE(loss->data[0] ==
                Catch::Approx(refops::cross_entropy(l0, b, k, targets, -1)).margin(1e-5));
        g.backward(loss);
        const auto f = [&](const Vec& x) {
            return refops::cross_entropy(x, b, k, targets, -1);
        };
        REQUIRE(max_grad_error(logits, refops::finite_difference(f, l0)) < kOpTol);
    }
}

TEST_CASE("cross_entropy input validation") {
    Graph g;
    const TensorPtr logits = make_tensor({2, 3}, std::vector<float>(6, 0.1f));
    REQUIRE_THROWS_AS(cross_entropy(g, logits, {0}), ConfigError);
    REQUIRE_THROWS_AS((cross_entropy(g, logits, {0, 3})), ConfigError);
    REQUIRE_THROWS_AS((cross_entropy(g, logits, {-1, -1})), ConfigError);
    const TensorPtr vec = make_tensor({6}, std::vector<float>(6, 0.1f));
    REQUIRE_THROWS_AS(cross_entropy(g, vec, {0}), ConfigError);
}

// ---- dropout ----

TEST_CASE("dropout at p=0 is the identity") {
    Graph g;
    Rng rng(1);
    const TensorPtr x = make_tensor({4}, {1.0f, 2.0f, 3.0f, 4.0f}, true);
    REQUIRE(dropout(g, x, 0.0f, rng) == x);
}

TEST_CASE("dropout zeroes a p-fraction and rescales the rest") {
    Graph g;
    g.set_recording(false);
    Rng rng(77);
    const std::size_t n = 20000;
    const TensorPtr x = make_tensor({n}, std::vector<float>(n, 1.0f));
    const TensorPtr y = dropout(g, x, 0.25f, rng);
    std::size_t zeros = 0;
    double mean = 0.0;
    for (const float v : y->data) {
        if (v == 0.0f) {
            ++zeros;
        } else {
            REQUIRE(v == Catch::Approx(1.0f / 0.75f).margin(1e-6));
        }
        mean += v;
    }
    mean /= static_cast<double>(n);
    REQUIRE(std::fabs(static_cast<double>(zeros) / n - 0.25) < 0.02);
    REQUIRE(std::fabs(mean - 1.0) < 0.02);
}

TEST_CASE("dropout backward reuses the forward mask") {
    Graph g;
    Rng rng(5);
    const std::size_t n = 64;
    const TensorPtr x = make_tensor({n}, std::vector<float>(n, 1.0f), true);
    const TensorPtr y = dropout(g, x, 0.5f, rng);
    g.backward(sum_all(g, y));
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(x->grad[i] == y->data[i]);  // x was all ones, so data == mask
    }
}

TEST_CASE("dropout validates p") {
    Graph g;
    Rng rng(1);
    const TensorPtr x = make_tensor({2});
    REQUIRE_THROWS_AS(dropout(g, x, 1.0f, rng), ConfigError);
    REQUIRE_THROWS_AS(dropout(g, x, -0.1f, rng), ConfigError);
}

// ---- graph mechanics ----

TEST_CASE("recording off keeps the tape empty and grads off") {
    Graph g;
    g.set_recording(false);
    const TensorPtr a = make_tensor({2, 2}, {1.0f, 2.0f, 3.0f, 4.0f}, true);
    const TensorPtr b = make_tensor({2, 2}, {1.0f, 1.0f, 1.0f, 1.0f}, true);
    const TensorPtr y = sum_all(g, add(g, a, b));
    REQUIRE(g.size() == 0);
    REQUIRE(y->data[0] == 14.0f);
    REQUIRE_FALSE(y->on_tape);
    REQUIRE_THROWS_AS(g.backward(y), ConfigError);
}

TEST_CASE("backward requires a scalar recorded loss") {
    Graph g;
    const TensorPtr a = make_tensor({2}, {1.0f, 2.0f}, true);
    const TensorPtr y = scale(g, a, 2.0f);
    REQUIRE_THROWS_AS(g.backward(y), ConfigError);  // not a scalar
    const TensorPtr leaf = make_tensor({1}, {3.0f}, true);
    REQUIRE_THROWS_AS(g.backward(leaf), ConfigError);  // scalar but not on tape
}

TEST_CASE("leaf gradients accumulate across backward calls") {
    Graph g;
    const TensorPtr a = make_tensor({3}, {1.0f, 2.0f, 3.0f}, true);
    const TensorPtr loss = sum_all(g, scale(g, a, 2.0f));
    g.backward(loss);
    REQUIRE(a->grad == std::vector<float>{2.0f, 2.0f, 2.0f});
    g.backward(loss);
    REQUIRE(a->grad == std::vector<float>{4.0f, 4.0f, 4.0f});
    a->zero_grad();
    g.backward(loss);
    REQUIRE(a->grad == std::vector<float>{2.0f, 2.0f, 2.0f});
}

TEST_CASE("a tensor used twice receives both contributions") {
    Graph g;
    const TensorPtr a = make_tensor({2}, {1.0f, 4.0f}, true);
    const TensorPtr loss = sum_all(g, add(g, a, a));
    g.backward(loss);
    REQUIRE(a->grad == std::vector<float>{2.0f, 2.0f});
    Graph g2;
    const TensorPtr b = make_tensor({2}, {3.0f, 5.0f}, true);
    const TensorPtr loss2 = sum_all(g2, mul(g2, b, b));
    g2.backward(loss2);
    REQUIRE(b->grad == std::vector<float>{6.0f, 10.0f});
}

TEST_CASE("clear empties the tape") {
    Graph g;
    const TensorPtr a = make_tensor({2}, {1.0f, 2.0f}, true);
    sum_all(g, a);
    REQUIRE(g.size() == 1);
    g.clear();
    REQUIRE(g.size() == 0);
}

// ---- construction and shape validation ----

TEST_CASE("make_tensor validates shapes and data") {
    REQUIRE_THROWS_AS((make_tensor({2, 0})), ConfigError);
    REQUIRE_THROWS_AS((make_tensor({3}, {1.0f, 2.0f})), ConfigError);
    const TensorPtr t = make_tensor({2, 3});
    REQUIRE(t->numel() == 6);
    REQUIRE(t->rank() == 2);
    REQUIRE(t->data == std::vector<float>(6, 0.0f));
    REQUIRE_FALSE(t->requires_grad);
}

TEST_CASE("ops validate operand shapes") {
    Graph g;
    const TensorPtr a = make_tensor({2, 3});
    const TensorPtr b = make_tensor({3, 2});
    REQUIRE_THROWS_AS(add(g, a, b), ConfigError);
    REQUIRE_THROWS_AS(mul(g, a, b), ConfigError);
    REQUIRE_THROWS_AS(matmul(g, a, make_tensor({2, 2})), ConfigError);
    REQUIRE_THROWS_AS(bias_add(g, a, make_tensor({2})), ConfigError);
    REQUIRE_THROWS_AS(slice_cols(g, a, 2, 2), ConfigError);
    REQUIRE_THROWS_AS(slice_cols(g, a, 1, 4), ConfigError);
    REQUIRE_THROWS_AS((concat_cols(g, {a, b})), ConfigError);
    REQUIRE_THROWS_AS((concat_rows(g, {a, make_tensor({2, 2})})), ConfigError);
    REQUIRE_THROWS_AS((embedding_lookup(g, a, {0, 2})), ConfigError);
    REQUIRE_THROWS_AS(embedding_lookup(g, a, {-1}), ConfigError);
}
