#include "sdwnlab/numcore/layers.hpp"

#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::num {

double apply_scalar_activation(double z, activation a) {
    switch (a) {
    case activation::identity: return z;
    case activation::relu: return z > 0.0 ? z : 0.0;
    case activation::tanh_fn: return std::tanh(z);
    case activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    throw state_error("unknown activation");
}

void apply_activation(matrix& m, activation a) {
    if (a == activation::identity) return;
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = apply_scalar_activation(m.data()[i], a);
}

// dL/dz from dL/dy; uses post-activation y (cheap for sigmoid/tanh) and pre-activation z (relu)
static matrix activation_backward(const matrix& grad_y, const matrix& y, const matrix& z, activation a) {
    matrix g = grad_y;
    switch (a) {
    case activation::identity: break;
    case activation::relu:
        for (std::size_t i = 0; i < g.size(); ++i)
            if (z.data()[i] <= 0.0) g.data()[i] = 0.0;
        break;
    case activation::tanh_fn:
        for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] *= 1.0 - y.data()[i] * y.data()[i];
        break;
    case activation::sigmoid:
        for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] *= y.data()[i] * (1.0 - y.data()[i]);
        break;
    }
    return g;
}

void tensor_param::init_uniform(rng& r, double fan_in, double fan_out) {
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < value.size(); ++i) value.data()[i] = r.uniform(-s, s);
}

param_view tensor_param::view(const std::string& prefix) {
    return param_view{prefix + name, value.rows(), value.cols(), value.data(), grad.data()};
}

// ---- dense --------------------------------------------------------------

dense_layer::dense_layer(std::size_t in_dim, std::size_t out_dim, activation act, rng& r)
    : w("w", in_dim, out_dim), b("b", 1, out_dim), act_(act) {
    w.init_uniform(r, static_cast<double>(in_dim), static_cast<double>(out_dim));
}

matrix dense_layer::forward(const matrix& x) {
    if (x.cols() != w.value.rows()) throw dimension_error("dense forward: input width mismatch");
    matrix z = matmul(x, w.value);
    for (std::size_t row = 0; row < z.rows(); ++row)
        for (std::size_t c = 0; c < z.cols(); ++c) z(row, c) += b.value(0, c);
    matrix y = z;
    apply_activation(y, act_);
    stack_.push_back({x, std::move(z), y});
    return y;
}

matrix dense_layer::backward(const matrix& grad_out) {
    if (stack_.empty()) throw state_error("dense backward without matching forward");
    cache_frame f = std::move(stack_.back());
    stack_.pop_back();
    if (!grad_out.same_shape(f.y)) throw dimension_error("dense backward: gradient shape mismatch");

    matrix grad_z = activation_backward(grad_out, f.y, f.z, act_);
    w.grad += matmul_tn(f.x, grad_z);
    const std::vector<double> bias_grad = column_sums(grad_z);
    for (std::size_t c = 0; c < bias_grad.size(); ++c) b.grad(0, c) += bias_grad[c];
    return matmul_nt(grad_z, w.value);
}

void dense_layer::zero_grads() {
    w.grad.fill(0.0);
    b.grad.fill(0.0);
}

void dense_layer::clear_cache() { stack_.clear(); }

void dense_layer::collect_params(const std::string& prefix, std::vector<param_view>& out) {
    out.push_back(w.view(prefix));
    out.push_back(b.view(prefix));
}

// ---- gcn ----------------------------------------------------------------

gcn_layer::gcn_layer(std::size_t in_dim, std::size_t out_dim, activation act, rng& r)
    : w("w", in_dim, out_dim), b("b", 1, out_dim), act_(act) {
    w.init_uniform(r, static_cast<double>(in_dim), static_cast<double>(out_dim));
}

matrix gcn_layer::forward(const matrix& x, const matrix& norm_adj) {
    if (norm_adj.rows() != norm_adj.cols()) throw dimension_error("gcn forward: adjacency must be square");
    if (norm_adj.cols() != x.rows()) throw dimension_error("gcn forward: adjacency/features mismatch");
    if (x.cols() != w.value.rows()) throw dimension_error("gcn forward: input width mismatch");
    matrix ax = matmul(norm_adj, x);
    matrix z = matmul(ax, w.value);
    for (std::size_t row = 0; row < z.rows(); ++row)
        for (std::size_t c = 0; c < z.cols(); ++c) z(row, c) += b.value(0, c);
    matrix y = z;
    apply_activation(y, act_);
    stack_.push_back({norm_adj, std::move(ax), std::move(z), y});
    return y;
}

matrix gcn_layer::backward(const matrix& grad_out) {
    if (stack_.empty()) throw state_error("gcn backward without matching forward");
    cache_frame f = std::move(stack_.back());
    stack_.pop_back();
    if (!grad_out.same_shape(f.y)) throw dimension_error("gcn backward: gradient shape mismatch");

    matrix grad_z = activation_backward(grad_out, f.y, f.z, act_);
    w.grad += matmul_tn(f.ax, grad_z);
    const std::vector<double> bias_grad = column_sums(grad_z);
    for (std::size_t c = 0; c < bias_grad.size(); ++c) b.grad(0, c) += bias_grad[c];
    matrix grad_ax = matmul_nt(grad_z, w.value);
    return matmul_tn(f.adj, grad_ax); // adj^T · grad_ax
}

void gcn_layer::zero_grads() {
    w.grad.fill(0.0);
    b.grad.fill(0.0);
}

void gcn_layer::clear_cache() { stack_.clear(); }

void gcn_layer::collect_params(const std::string& prefix, std::vector<param_view>& out) {
    out.push_back(w.view(prefix));
    out.push_back(b.view(prefix));
}

// ---- gru ----------------------------------------------------------------

gru_cell::gru_cell(std::size_t in_dim, std::size_t hidden_dim, rng& r)
    : wz("wz", in_dim, hidden_dim), uz("uz", hidden_dim, hidden_dim), bz("bz", 1, hidden_dim),
      wr("wr", in_dim, hidden_dim), ur("ur", hidden_dim, hidden_dim), br("br", 1, hidden_dim),
      wh("wh", in_dim, hidden_dim), uh("uh", hidden_dim, hidden_dim), bh("bh", 1, hidden_dim) {
    const double in = static_cast<double>(in_dim), hid = static_cast<double>(hidden_dim);
    wz.init_uniform(r, in, hid);
    uz.init_uniform(r, hid, hid);
    wr.init_uniform(r, in, hid);
    ur.init_uniform(r, hid, hid);
    wh.init_uniform(r, in, hid);
    uh.init_uniform(r, hid, hid);
}

static matrix gate_preact(const matrix& x, const tensor_param& w, const matrix& h, const tensor_param& u,
                          const tensor_param& b) {
    matrix z = matmul(x, w.value);
    z += matmul(h, u.value);
    for (std::size_t row = 0; row < z.rows(); ++row)
        for (std::size_t c = 0; c < z.cols(); ++c) z(row, c) += b.value(0, c);
    return z;
}

matrix gru_cell::forward(const matrix& x, const matrix& h_prev) {
    if (x.cols() != wz.value.rows()) throw dimension_error("gru forward: input width mismatch");
    if (h_prev.cols() != hidden_dim() || h_prev.rows() != x.rows())
        throw dimension_error("gru forward: hidden state shape mismatch");

    matrix z = gate_preact(x, wz, h_prev, uz, bz);
    apply_activation(z, activation::sigmoid);
    matrix r = gate_preact(x, wr, h_prev, ur, br);
    apply_activation(r, activation::sigmoid);
    matrix rh = hadamard(r, h_prev);

    matrix cand = matmul(x, wh.value);
    cand += matmul(rh, uh.value);
    for (std::size_t row = 0; row < cand.rows(); ++row)
        for (std::size_t c = 0; c < cand.cols(); ++c) cand(row, c) += bh.value(0, c);
    apply_activation(cand, activation::tanh_fn);

    matrix h(h_prev.rows(), h_prev.cols());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double zi = z.data()[i];
        h.data()[i] = (1.0 - zi) * h_prev.data()[i] + zi * cand.data()[i];
    }
    stack_.push_back({x, h_prev, std::move(z), std::move(r), std::move(cand), std::move(rh)});
    return h;
}

std::pair<matrix, matrix> gru_cell::backward(const matrix& grad_h) {
    if (stack_.empty()) throw state_error("gru backward without matching forward");
    cache_frame f = std::move(stack_.back());
    stack_.pop_back();
    if (!grad_h.same_shape(f.h_prev)) throw dimension_error("gru backward: gradient shape mismatch");

    const std::size_t n = grad_h.size();

    // split incoming gradient across the update-gate mix h = (1-z)h_prev + z*cand
    matrix grad_zgate(grad_h.rows(), grad_h.cols());
    matrix grad_cand(grad_h.rows(), grad_h.cols());
    matrix grad_hprev = grad_h; // (1-z) path; gate paths accumulate below
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad_h.data()[i];
        grad_zgate.data()[i] = g * (f.cand.data()[i] - f.h_prev.data()[i]);
        grad_cand.data()[i] = g * f.z.data()[i];
        grad_hprev.data()[i] = g * (1.0 - f.z.data()[i]);
    }

    // candidate branch: cand = tanh(x Wh + rh Uh + bh)
    matrix grad_ah = grad_cand;
    for (std::size_t i = 0; i < n; ++i) grad_ah.data()[i] *= 1.0 - f.cand.data()[i] * f.cand.data()[i];
    wh.grad += matmul_tn(f.x, grad_ah);
    uh.grad += matmul_tn(f.rh, grad_ah);
    {
        const std::vector<double> bg = column_sums(grad_ah);
        for (std::size_t c = 0; c < bg.size(); ++c) bh.grad(0, c) += bg[c];
    }
    matrix grad_x = matmul_nt(grad_ah, wh.value);
    matrix grad_rh = matmul_nt(grad_ah, uh.value);
    matrix grad_r(grad_h.rows(), grad_h.cols());
    for (std::size_t i = 0; i < n; ++i) {
        grad_r.data()[i] = grad_rh.data()[i] * f.h_prev.data()[i];
        grad_hprev.data()[i] += grad_rh.data()[i] * f.r.data()[i];
    }

    // update gate branch
    matrix grad_az = grad_zgate;
    for (std::size_t i = 0; i < n; ++i) grad_az.data()[i] *= f.z.data()[i] * (1.0 - f.z.data()[i]);
    wz.grad += matmul_tn(f.x, grad_az);
    uz.grad += matmul_tn(f.h_prev, grad_az);
    {
        const std::vector<double> bg = column_sums(grad_az);
        for (std::size_t c = 0; c < bg.size(); ++c) bz.grad(0, c) += bg[c];
    }
    grad_x += matmul_nt(grad_az, wz.value);
    grad_hprev += matmul_nt(grad_az, uz.value);

    // reset gate branch
    matrix grad_ar = grad_r;
    for (std::size_t i = 0; i < n; ++i) grad_ar.data()[i] *= f.r.data()[i] * (1.0 - f.r.data()[i]);
    wr.grad += matmul_tn(f.x, grad_ar);
    ur.grad += matmul_tn(f.h_prev, grad_ar);
    {
        const std::vector<double> bg = column_sums(grad_ar);
        for (std::size_t c = 0; c < bg.size(); ++c) br.grad(0, c) += bg[c];
    }
    grad_x += matmul_nt(grad_ar, wr.value);
    grad_hprev += matmul_nt(grad_ar, ur.value);

    return {std::move(grad_x), std::move(grad_hprev)};
}

void gru_cell::zero_grads() {
    for (tensor_param* p : {&wz, &uz, &bz, &wr, &ur, &br, &wh, &uh, &bh}) p->grad.fill(0.0);
}

void gru_cell::clear_cache() { stack_.clear(); }

void gru_cell::collect_params(const std::string& prefix, std::vector<param_view>& out) {
    for (tensor_param* p : {&wz, &uz, &bz, &wr, &ur, &br, &wh, &uh, &bh}) out.push_back(p->view(prefix));
}

// ---- mlp ----------------------------------------------------------------

mlp::mlp(const std::vector<std::size_t>& dims, activation hidden_act, activation out_act, rng& r) {
    if (dims.size() < 2) throw dimension_error("mlp needs at least input and output dims");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const bool last = (i + 2 == dims.size());
        layers.emplace_back(dims[i], dims[i + 1], last ? out_act : hidden_act, r);
    }
}

matrix mlp::forward(const matrix& x) {
    matrix h = x;
    for (auto& l : layers) h = l.forward(h);
    return h;
}

matrix mlp::backward(const matrix& grad_out) {
    matrix g = grad_out;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = it->backward(g);
    return g;
}

void mlp::zero_grads() {
    for (auto& l : layers) l.zero_grads();
}

void mlp::clear_cache() {
    for (auto& l : layers) l.clear_cache();
}

void mlp::collect_params(const std::string& prefix, std::vector<param_view>& out) {
    for (std::size_t i = 0; i < layers.size(); ++i)
        layers[i].collect_params(prefix + "l" + std::to_string(i) + ".", out);
}

} // namespace sdwnlab::num
