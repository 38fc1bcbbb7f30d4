#pragma once

// Dense f32 tensors on a tape: ops compute eagerly and record backward
// closures; Graph::backward replays them in reverse.  Parameters (leaves)
// accumulate gradients across backward calls until the caller zeroes them;
// intermediate gradients are cleared at the start of every backward pass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bertdetect/errors.hpp"
#include "bertdetect/rng.hpp"

namespace bertdetect {

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;
    std::vector<float> grad;  // empty until ensure_grad()
    bool requires_grad = false;
    bool on_tape = false;  // produced by a recorded op

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }
    bool needs_grad() const { return requires_grad || on_tape; }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0f);
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(std::vector<std::size_t> shape, bool requires_grad = false) {
    std::size_t n = 1;
    for (const std::size_t d : shape) {
        if (d == 0) throw ConfigError("tensor dimensions must be positive");
        n *= d;
    }
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->data.assign(n, 0.0f);
    t->requires_grad = requires_grad;
    return t;
}

inline TensorPtr make_tensor(std::vector<std::size_t> shape, std::vector<float> values,
                             bool requires_grad = false) {
    TensorPtr t = make_tensor(std::move(shape), requires_grad);
    if (values.size() != t->numel()) throw ConfigError("tensor data does not match shape");
    t->data = std::move(values);
    return t;
}

class Graph {
public:
    bool recording() const { return recording_; }
    void set_recording(bool on) { recording_ = on; }

    void record(const TensorPtr& out, std::function<void()> backward_fn) {
        if (!recording_) return;
        out->on_tape = true;
        out->ensure_grad();
        outputs_.push_back(out);
        tape_.push_back(std::move(backward_fn));
    }

    // Clears intermediate grads, seeds d(loss)=1, replays the tape backwards.
    // Leaf gradients are left untouched, so they accumulate across calls.
    void backward(const TensorPtr& loss) {
        if (loss->numel() != 1) throw ConfigError("backward requires a scalar loss");
        if (!loss->on_tape) throw ConfigError("backward requires a loss recorded on the tape");
        for (const auto& t : outputs_) t->zero_grad();
        loss->grad[0] = 1.0f;
        for (std::size_t i = tape_.size(); i > 0; --i) tape_[i - 1]();
    }

    void clear() {
        tape_.clear();
        outputs_.clear();
    }

    std::size_t size() const { return tape_.size(); }

private:
    std::vector<std::function<void()>> tape_;
    std::vector<TensorPtr> outputs_;
    bool recording_ = true;
};

namespace ops_detail {

inline void check(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace ops_detail

// ---- elementwise ----

inline TensorPtr add(Graph& g, const TensorPtr& a, const TensorPtr& b) {
    ops_detail::check(a->shape == b->shape, "add: shape mismatch");
    TensorPtr out = make_tensor(a->shape);
    for (std::size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] + b->data[i];
    g.record(out, [a, b, out] {
        if (a->needs_grad()) {
            a->ensure_grad();
            for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
        }
        if (b->needs_grad()) {
            b->ensure_grad();
            for (std::size_t i = 0; i < out->numel(); ++i) b->grad[i] += out->grad[i];
        }
    });
    return out;
}

inline TensorPtr mul(Graph& g, const TensorPtr& a, const TensorPtr& b) {
    ops_detail::check(a->shape == b->shape, "mul: shape mismatch");
    TensorPtr out = make_tensor(a->shape);
    for (std::size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] * b->data[i];
    g.record(out, [a, b, out] {
        if (a->needs_grad()) {
            a->ensure_grad();
            for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i] * b->data[i];
        }
        if (b->needs_grad()) {
            b->ensure_grad();
            for (std::size_t i = 0; i < out->numel(); ++i) b->grad[i] += out->grad[i] * a->data[i];
        }
    });
    return out;
}

inline TensorPtr scale(Graph& g, const TensorPtr& a, float c) {
    TensorPtr out = make_tensor(a->shape);
    for (std::size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] * c;
    g.record(out, [a, out, c] {
        if (!a->needs_grad()) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i] * c;
    });
    return out;
}

inline TensorPtr sum_all(Graph& g, const TensorPtr& a) {
    TensorPtr out = make_tensor({1});
    float s = 0.0f;
    for (const float v : a->data) s += v;
    out->data[0] = s;
    g.record(out, [a, out] {
        if (!a->needs_grad()) return;
        a->ensure_grad();
        const float d = out->grad[0];
        for (std::size_t i = 0; i < a->numel(); ++i) a->grad[i] += d;
    });
    return out;
}

// Adds bias[H] onto every row of a[..., H].
inline TensorPtr bias_add(Graph& g, const TensorPtr& a, const TensorPtr& bias) {
    ops_detail::check(bias->rank() == 1 && a->rank() >= 1, "bias_add: rank mismatch");
    const std::size_t h = bias->dim(0);
    ops_detail::check(a->shape.back() == h, "bias_add: trailing dimension mismatch");
    const std::size_t rows = a->numel() / h;
    TensorPtr out = make_tensor(a->shape);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < h; ++j) out->data[r * h + j] = a->data[r * h + j] + bias->data[j];
    }
    g.record(out, [a, bias, out, rows, h] {
        if (a->needs_grad()) {
            a->ensure_grad();
            for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
        }
        if (bias->needs_grad()) {
            bias->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < h; ++j) bias->grad[j] += out->grad[r * h + j];
            }
        }
    });
    return out;
}

// ---- structure ----

inline TensorPtr transpose(Graph& g, const TensorPtr& a) {
    ops_detail::check(a->rank() == 2, "transpose: expects a 2-D tensor");
    const std::size_t m = a->dim(0), n = a->dim(1);
    TensorPtr out = make_tensor({n, m});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) out->data[j * m + i] = a->data[i * n + j];
    }
    g.record(out, [a, out, m, n] {
        if (!a->needs_grad()) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) a->grad[i * n + j] += out->grad[j * m + i];
        }
    });
    return out;
}

inline TensorPtr slice_cols(Graph& g, const TensorPtr& a, std::size_t c0, std::size_t c1) {
    ops_detail::check(a->rank() == 2, "slice_cols: expects a 2-D tensor");
    ops_detail::check(c0 < c1 && c1 <= a->dim(1), "slice_cols: bad column range");
    const std::size_t m = a->dim(0), n = a->dim(1), w = c1 - c0;
    TensorPtr out = make_tensor({m, w});
    for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(&a->data[i * n + c0], w, &out->data[i * w]);
    }
    g.record(out, [a, out, m, n, c0, w] {
        if (!a->needs_grad()) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < w; ++j) a->grad[i * n + c0 + j] += out->grad[i * w + j];
        }
    });
    return out;
}

inline TensorPtr concat_cols(Graph& g, const std::vector<TensorPtr>& parts) {
    ops_detail::check(!parts.empty(), "concat_cols: no inputs");
    const std::size_t m = parts[0]->dim(0);
    std::size_t n = 0;
    for (const auto& p : parts) {
        ops_detail::check(p->rank() == 2 && p->dim(0) == m, "concat_cols: row mismatch");
        n += p->dim(1);
    }
    TensorPtr out = make_tensor({m, n});
    std::size_t col = 0;
    for (const auto& p : parts) {
        const std::size_t w = p->dim(1);
        for (std::size_t i = 0; i < m; ++i) {
            std::copy_n(&p->data[i * w], w, &out->data[i * n + col]);
        }
        col += w;
    }
    g.record(out, [parts, out, m, n] {
        std::size_t col = 0;
        for (const auto& p : parts) {
            const std::size_t w = p->dim(1);
            if (p->needs_grad()) {
                p->ensure_grad();
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < w; ++j) {
                        p->grad[i * w + j] += out->grad[i * n + col + j];
                    }
                }
            }
            col += w;
        }
    });
    return out;
}

inline TensorPtr concat_rows(Graph& g, const std::vector<TensorPtr>& parts) {
    ops_detail::check(!parts.empty(), "concat_rows: no inputs");
    const std::size_t n = parts[0]->shape.back();
    std::size_t m = 0;
    for (const auto& p : parts) {
        ops_detail::check(p->rank() == 2 && p->dim(1) == n, "concat_rows: column mismatch");
        m += p->dim(0);
    }
    TensorPtr out = make_tensor({m, n});
    std::size_t row = 0;
    for (const auto& p : parts) {
        std::copy_n(p->data.data(), p->numel(), &out->data[row * n]);
        row += p->dim(0);
    }
    g.record(out, [parts, out, n] {
        std::size_t row = 0;
        for (const auto& p : parts) {
            if (p->needs_grad()) {
                p->ensure_grad();
                for (std::size_t i = 0; i < p->numel(); ++i) p->grad[i] += out->grad[row * n + i];
            }
            row += p->dim(0);
        }
    });
    return out;
}

// Row gather; backward scatter-adds into the table.  Also serves as the
// position gather for masked-token prediction and the [CLS] row extraction.
inline TensorPtr embedding_lookup(Graph& g, const TensorPtr& table, const std::vector<int>& ids) {
    ops_detail::check(table->rank() == 2, "embedding_lookup: table must be 2-D");
    ops_detail::check(!ids.empty(), "embedding_lookup: no ids");
    const std::size_t v = table->dim(0), h = table->dim(1);
    for (const int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= v) {
            throw ConfigError("embedding_lookup: id " + std::to_string(id) + " out of range (V=" +
                              std::to_string(v) + ")");
        }
    }
    TensorPtr out = make_tensor({ids.size(), h});
    for (std::size_t t = 0; t < ids.size(); ++t) {
        std::copy_n(&table->data[static_cast<std::size_t>(ids[t]) * h], h, &out->data[t * h]);
    }
    g.record(out, [table, out, ids, h] {
        if (!table->needs_grad()) return;
        table->ensure_grad();
        for (std::size_t t = 0; t < ids.size(); ++t) {
            float* dst = &table->grad[static_cast<std::size_t>(ids[t]) * h];
            const float* src = &out->grad[t * h];
            for (std::size_t j = 0; j < h; ++j) dst[j] += src[j];
        }
    });
    return out;
}

// ---- linear algebra ----

inline TensorPtr matmul(Graph& g, const TensorPtr& a, const TensorPtr& b) {
    ops_detail::check(a->rank() == 2 && b->rank() == 2, "matmul: expects 2-D tensors");
    ops_detail::check(a->dim(1) == b->dim(0), "matmul: inner dimensions disagree");
    const std::size_t m = a->dim(0), k = a->dim(1), n = b->dim(1);
    TensorPtr out = make_tensor({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        float* crow = &out->data[i * n];
        for (std::size_t kk = 0; kk < k; ++kk) {
            const float aik = a->data[i * k + kk];
            const float* brow = &b->data[kk * n];
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    g.record(out, [a, b, out, m, k, n] {
        if (a->needs_grad()) {
            a->ensure_grad();  // dA = dC * B^T
            for (std::size_t i = 0; i < m; ++i) {
                const float* drow = &out->grad[i * n];
                for (std::size_t kk = 0; kk < k; ++kk) {
                    const float* brow = &b->data[kk * n];
                    float acc = 0.0f;
                    for (std::size_t j = 0; j < n; ++j) acc += drow[j] * brow[j];
                    a->grad[i * k + kk] += acc;
                }
            }
        }
        if (b->needs_grad()) {
            b->ensure_grad();  // dB = A^T * dC
            for (std::size_t i = 0; i < m; ++i) {
                const float* drow = &out->grad[i * n];
                for (std::size_t kk = 0; kk < k; ++kk) {
                    const float aik = a->data[i * k + kk];
                    float* grow = &b->grad[kk * n];
                    for (std::size_t j = 0; j < n; ++j) grow[j] += aik * drow[j];
                }
            }
        }
    });
    return out;
}

// ---- nonlinearities ----

inline TensorPtr softmax(Graph& g, const TensorPtr& a) {
    ops_detail::check(a->rank() >= 1, "softmax: needs at least one axis");
    const std::size_t n = a->shape.back();
    const std::size_t rows = a->numel() / n;
    TensorPtr out = make_tensor(a->shape);
    for (std::size_t r = 0; r < rows; ++r) {
        const float* x = &a->data[r * n];
        float* y = &out->data[r * n];
        float mx = x[0];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
        float sum = 0.0f;
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = std::exp(x[j] - mx);
            sum += y[j];
        }
        for (std::size_t j = 0; j < n; ++j) y[j] /= sum;
    }
    g.record(out, [a, out, rows, n] {
        if (!a->needs_grad()) return;
        a->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
            const float* y = &out->data[r * n];
            const float* dy = &out->grad[r * n];
            float dot = 0.0f;
            for (std::size_t j = 0; j < n; ++j) dot += y[j] * dy[j];
            float* dx = &a->grad[r * n];
            for (std::size_t j = 0; j < n; ++j) dx[j] += y[j] * (dy[j] - dot);
        }
    });
    return out;
}

inline TensorPtr layer_norm(Graph& g, const TensorPtr& x, const TensorPtr& gamma,
                            const TensorPtr& beta, float eps = 1e-12f) {
    ops_detail::check(gamma->rank() == 1 && beta->rank() == 1, "layer_norm: gamma/beta rank");
    const std::size_t h = gamma->dim(0);
    ops_detail::check(beta->dim(0) == h && x->shape.back() == h, "layer_norm: shape mismatch");
    ops_detail::check(eps > 0.0f, "layer_norm: eps must be positive");
    const std::size_t rows = x->numel() / h;

    TensorPtr out = make_tensor(x->shape);
    auto xhat = std::make_shared<std::vector<float>>(x->numel());
    auto inv_std = std::make_shared<std::vector<float>>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const float* xr = &x->data[r * h];
        float mean = 0.0f;
        for (std::size_t j = 0; j < h; ++j) mean += xr[j];
        mean /= static_cast<float>(h);
        float var = 0.0f;
        for (std::size_t j = 0; j < h; ++j) {
            const float d = xr[j] - mean;
            var += d * d;
        }
        var /= static_cast<float>(h);
        const float is = 1.0f / std::sqrt(var + eps);
        (*inv_std)[r] = is;
        for (std::size_t j = 0; j < h; ++j) {
            const float xh = (xr[j] - mean) * is;
            (*xhat)[r * h + j] = xh;
            out->data[r * h + j] = xh * gamma->data[j] + beta->data[j];
        }
    }
    g.record(out, [x, gamma, beta, out, xhat, inv_std, rows, h] {
        for (std::size_t r = 0; r < rows; ++r) {
            const float* dy = &out->grad[r * h];
            const float* xh = &(*xhat)[r * h];
            if (gamma->needs_grad()) {
                gamma->ensure_grad();
                for (std::size_t j = 0; j < h; ++j) gamma->grad[j] += dy[j] * xh[j];
            }
            if (beta->needs_grad()) {
                beta->ensure_grad();
                for (std::size_t j = 0; j < h; ++j) beta->grad[j] += dy[j];
            }
            if (x->needs_grad()) {
                x->ensure_grad();
                float sum_g = 0.0f, sum_gx = 0.0f;
                for (std::size_t j = 0; j < h; ++j) {
                    const float gj = dy[j] * gamma->data[j];
                    sum_g += gj;
                    sum_gx += gj * xh[j];
                }
                const float mean_g = sum_g / static_cast<float>(h);
                const float mean_gx = sum_gx / static_cast<float>(h);
                const float is = (*inv_std)[r];
                float* dx = &x->grad[r * h];
                for (std::size_t j = 0; j < h; ++j) {
                    const float gj = dy[j] * gamma->data[j];
                    dx[j] += is * (gj - mean_g - xh[j] * mean_gx);
                }
            }
        }
    });
    return out;
}

inline constexpr float kGeluC = 0.7978845608028654f;  // sqrt(2/pi)
inline constexpr float kGeluA = 0.044715f;

inline TensorPtr gelu(Graph& g, const TensorPtr& x) {
    TensorPtr out = make_tensor(x->shape);
    auto th = std::make_shared<std::vector<float>>(x->numel());
    for (std::size_t i = 0; i < x->numel(); ++i) {
        const float v = x->data[i];
        const float t = std::tanh(kGeluC * (v + kGeluA * v * v * v));
        (*th)[i] = t;
        out->data[i] = 0.5f * v * (1.0f + t);
    }
    g.record(out, [x, out, th] {
        if (!x->needs_grad()) return;
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i) {
            const float v = x->data[i];
            const float t = (*th)[i];
            const float du = kGeluC * (1.0f + 3.0f * kGeluA * v * v);
            const float d = 0.5f * (1.0f + t) + 0.5f * v * (1.0f - t * t) * du;
            x->grad[i] += out->grad[i] * d;
        }
    });
    return out;
}

inline TensorPtr tanh_op(Graph& g, const TensorPtr& x) {
    TensorPtr out = make_tensor(x->shape);
    for (std::size_t i = 0; i < x->numel(); ++i) out->data[i] = std::tanh(x->data[i]);
    g.record(out, [x, out] {
        if (!x->needs_grad()) return;
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i) {
            const float y = out->data[i];
            x->grad[i] += out->grad[i] * (1.0f - y * y);
        }
    });
    return out;
}

// Inverted dropout: keep with probability 1-p and scale by 1/(1-p).
// p = 0 is the identity (no tape node).
inline TensorPtr dropout(Graph& g, const TensorPtr& x, float p, Rng& rng) {
    ops_detail::check(p >= 0.0f && p < 1.0f, "dropout: p must be in [0, 1)");
    if (p == 0.0f) return x;
    TensorPtr out = make_tensor(x->shape);
    auto mask = std::make_shared<std::vector<float>>(x->numel());
    const float keep_scale = 1.0f / (1.0f - p);
    for (std::size_t i = 0; i < x->numel(); ++i) {
        const float m = rng.bernoulli(1.0 - static_cast<double>(p)) ? keep_scale : 0.0f;
        (*mask)[i] = m;
        out->data[i] = x->data[i] * m;
    }
    g.record(out, [x, out, mask] {
        if (!x->needs_grad()) return;
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i) x->grad[i] += out->grad[i] * (*mask)[i];
    });
    return out;
}

// ---- loss ----

// Mean over non-ignored rows of -log softmax(logits)[target].
inline TensorPtr cross_entropy(Graph& g, const TensorPtr& logits, const std::vector<int>& targets,
                               int ignore_index = -1) {
    ops_detail::check(logits->rank() == 2, "cross_entropy: logits must be [B, C]");
    const std::size_t b = logits->dim(0), c = logits->dim(1);
    ops_detail::check(targets.size() == b, "cross_entropy: one target per row");

    auto probs = std::make_shared<std::vector<float>>(logits->numel());
    std::size_t count = 0;
    float total = 0.0f;
    for (std::size_t r = 0; r < b; ++r) {
        const int t = targets[r];
        if (t == ignore_index) continue;
        ops_detail::check(t >= 0 && static_cast<std::size_t>(t) < c,
                          "cross_entropy: target out of range");
        const float* x = &logits->data[r * c];
        float mx = x[0];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, x[j]);
        float sum = 0.0f;
        float* p = &(*probs)[r * c];
        for (std::size_t j = 0; j < c; ++j) {
            p[j] = std::exp(x[j] - mx);
            sum += p[j];
        }
        for (std::size_t j = 0; j < c; ++j) p[j] /= sum;
        total += -std::log(std::max(p[static_cast<std::size_t>(t)], 1e-30f));
        ++count;
    }
    if (count == 0) throw ConfigError("cross_entropy: every row is ignored");

    TensorPtr out = make_tensor({1});
    out->data[0] = total / static_cast<float>(count);
    g.record(out, [logits, out, probs, targets, b, c, count, ignore_index] {
        if (!logits->needs_grad()) return;
        logits->ensure_grad();
        const float d = out->grad[0] / static_cast<float>(count);
        for (std::size_t r = 0; r < b; ++r) {
            const int t = targets[r];
            if (t == ignore_index) continue;
            const float* p = &(*probs)[r * c];
            float* dx = &logits->grad[r * c];
            for (std::size_t j = 0; j < c; ++j) {
                const float onehot = static_cast<std::size_t>(t) == j ? 1.0f : 0.0f;
                dx[j] += d * (p[j] - onehot);
            }
        }
    });
    return out;
}

}  // namespace bertdetect
