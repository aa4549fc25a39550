#pragma once

#include <string>
#include <vector>

#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/numcore/matrix.hpp"

namespace sdwnlab::num {

enum class activation { identity, relu, tanh_fn, sigmoid };

double apply_scalar_activation(double z, activation a);
void apply_activation(matrix& m, activation a); // in place

// Mutable window onto one parameter tensor and its gradient accumulator.
// Optimizers, the gradient clipper, checkpoints and finite-difference probes all
// operate on these views so every layer type is handled uniformly.
struct param_view {
    std::string name;
    std::size_t rows = 0, cols = 0;
    double* value = nullptr;
    double* grad = nullptr;
    std::size_t count() const { return rows * cols; }
};

// One named weight tensor + matching gradient buffer.
struct tensor_param {
    std::string name;
    matrix value;
    matrix grad;

    tensor_param() = default;
    tensor_param(std::string n, std::size_t r, std::size_t c)
        : name(std::move(n)), value(r, c), grad(r, c) {}

    void init_uniform(rng& r, double fan_in, double fan_out);
    param_view view(const std::string& prefix);
};

// y = act(x W + b). Forward pushes a cache frame; backward pops one, so a layer can
// be unrolled over several calls (needed for recurrent use) as long as backward runs
// in exact reverse order. Gradients accumulate until zero_grads().
class dense_layer {
public:
    dense_layer(std::size_t in_dim, std::size_t out_dim, activation act, rng& r);

    matrix forward(const matrix& x);
    matrix backward(const matrix& grad_out); // returns dL/dx
    void zero_grads();
    void clear_cache();
    void collect_params(const std::string& prefix, std::vector<param_view>& out);

    std::size_t in_dim() const { return w.value.rows(); }
    std::size_t out_dim() const { return w.value.cols(); }

    tensor_param w, b;

private:
    struct cache_frame {
        matrix x, z, y;
    };
    activation act_;
    std::vector<cache_frame> stack_;
};

// y = act(norm_adj · x · W + b): one spectral graph-convolution step over a fixed
// node set. norm_adj is expected to be the degree-normalized adjacency.
class gcn_layer {
public:
    gcn_layer(std::size_t in_dim, std::size_t out_dim, activation act, rng& r);

    matrix forward(const matrix& x, const matrix& norm_adj);
    matrix backward(const matrix& grad_out); // returns dL/dx
    void zero_grads();
    void clear_cache();
    void collect_params(const std::string& prefix, std::vector<param_view>& out);

    tensor_param w, b;

private:
    struct cache_frame {
        matrix adj, ax, z, y;
    };
    activation act_;
    std::vector<cache_frame> stack_;
};

// Gated recurrent unit, gate convention:
//   z = sigmoid(x Wz + h_prev Uz + bz)
//   r = sigmoid(x Wr + h_prev Ur + br)
//   cand = tanh(x Wh + (r ∘ h_prev) Uh + bh)
//   h = (1 - z) ∘ h_prev + z ∘ cand
// With all weights zero this halves the hidden state each step.
class gru_cell {
public:
    gru_cell(std::size_t in_dim, std::size_t hidden_dim, rng& r);

    matrix forward(const matrix& x, const matrix& h_prev);
    // returns (dL/dx, dL/dh_prev) for the matching forward call
    std::pair<matrix, matrix> backward(const matrix& grad_h);
    void zero_grads();
    void clear_cache();
    void collect_params(const std::string& prefix, std::vector<param_view>& out);

    std::size_t hidden_dim() const { return uz.value.rows(); }

    tensor_param wz, uz, bz, wr, ur, br, wh, uh, bh;

private:
    struct cache_frame {
        matrix x, h_prev, z, r, cand, rh;
    };
    std::vector<cache_frame> stack_;
};

// Plain feed-forward stack used for the policy/value heads.
class mlp {
public:
    mlp(const std::vector<std::size_t>& dims, activation hidden_act, activation out_act, rng& r);

    matrix forward(const matrix& x);
    matrix backward(const matrix& grad_out);
    void zero_grads();
    void clear_cache();
    void collect_params(const std::string& prefix, std::vector<param_view>& out);

    std::vector<dense_layer> layers;
};

} // namespace sdwnlab::num
