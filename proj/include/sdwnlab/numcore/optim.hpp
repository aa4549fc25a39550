#pragma once

#include <vector>

#include "sdwnlab/numcore/layers.hpp"

namespace sdwnlab::num {

// Adam with bias correction. Holds first/second moment buffers aligned with the
// attached parameter views; step() consumes the accumulated gradients (callers
// zero them afterwards).
class adam {
public:
    explicit adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void attach(std::vector<param_view> views);
    void step(); // throws numeric_error naming the offending tensor on NaN/Inf grads

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }
    std::size_t step_count() const { return steps_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::size_t steps_ = 0;
    std::vector<param_view> views_;
    std::vector<std::vector<double>> m_, v_;
};

// Global-norm gradient clipping over all views. Returns the pre-clip norm.
double clip_gradients(std::vector<param_view>& views, double max_norm);

// Flat snapshot/restore of parameter values (for best-model tracking).
std::vector<double> pack_values(const std::vector<param_view>& views);
void unpack_values(std::vector<param_view>& views, const std::vector<double>& flat);

} // namespace sdwnlab::num
