#include "sdwnlab/numcore/optim.hpp"

#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::num {

adam::adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (lr <= 0.0) throw config_error("adam: learning rate must be positive");
}

void adam::attach(std::vector<param_view> views) {
    views_ = std::move(views);
    m_.clear();
    v_.clear();
    for (const auto& pv : views_) {
        m_.emplace_back(pv.count(), 0.0);
        v_.emplace_back(pv.count(), 0.0);
    }
    steps_ = 0;
}

void adam::step() {
    if (views_.empty()) throw state_error("adam: step() before attach()");
    ++steps_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    for (std::size_t k = 0; k < views_.size(); ++k) {
        param_view& pv = views_[k];
        for (std::size_t i = 0; i < pv.count(); ++i) {
            const double g = pv.grad[i];
            if (!std::isfinite(g)) throw numeric_error("adam: non-finite gradient in " + pv.name);
            m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * g;
            v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * g * g;
            const double mhat = m_[k][i] / bc1;
            const double vhat = v_[k][i] / bc2;
            pv.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

double clip_gradients(std::vector<param_view>& views, double max_norm) {
    if (max_norm <= 0.0) throw config_error("clip_gradients: max_norm must be positive");
    double sq = 0.0;
    for (const auto& pv : views)
        for (std::size_t i = 0; i < pv.count(); ++i) {
            const double g = pv.grad[i];
            if (!std::isfinite(g)) throw numeric_error("clip_gradients: non-finite gradient in " + pv.name);
            sq += g * g;
        }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& pv : views)
            for (std::size_t i = 0; i < pv.count(); ++i) pv.grad[i] *= scale;
    }
    return norm;
}

std::vector<double> pack_values(const std::vector<param_view>& views) {
    std::vector<double> flat;
    for (const auto& pv : views) flat.insert(flat.end(), pv.value, pv.value + pv.count());
    return flat;
}

void unpack_values(std::vector<param_view>& views, const std::vector<double>& flat) {
    std::size_t off = 0;
    for (auto& pv : views) {
        if (off + pv.count() > flat.size()) throw dimension_error("unpack_values: flat vector too short");
        for (std::size_t i = 0; i < pv.count(); ++i) pv.value[i] = flat[off + i];
        off += pv.count();
    }
    if (off != flat.size()) throw dimension_error("unpack_values: flat vector too long");
}

} // namespace sdwnlab::num
