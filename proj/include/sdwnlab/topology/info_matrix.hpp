#pragma once

#include <array>
#include <string>

#include "sdwnlab/numcore/matrix.hpp"
#include "sdwnlab/topology/link_metrics.hpp"

namespace sdwnlab::topo {

// Node-pair entries with no link carry this sentinel (NaN) through the matrix
// pipeline; normalization and learning code must skip or re-mark them.
double sentinel();
bool is_sentinel(double v);

// Channel order is fixed project-wide: matrices, predictor features and the
// routing state tensor all use this layout.
enum class metric_channel : int { bw_free = 0, delay = 1, pkt_err = 2, distance = 3, loss = 4 };
inline constexpr int metric_channel_count = 5;
const std::array<std::string, metric_channel_count>& metric_channel_names();

// Five symmetric n x n matrices holding one snapshot's link measurements;
// every non-link entry (including the diagonal) is sentinel, so normalization
// statistics cover real links only. Consumers map sentinel to 0 when a dense
// tensor is required.
struct info_matrices {
    std::array<num::matrix, metric_channel_count> channel;

    num::matrix& operator[](metric_channel c) { return channel[static_cast<int>(c)]; }
    const num::matrix& operator[](metric_channel c) const { return channel[static_cast<int>(c)]; }
    std::size_t node_count() const { return channel[0].rows(); }
};

info_matrices to_info_matrices(const topology_spec& topo, const link_snapshot& snap);

struct normalization_config {
    double lo = 0.0, hi = 1.0;
    void validate() const; // lo < hi, finite
};

// Per-matrix min-max rescale into [lo, hi] over non-sentinel entries only;
// sentinel entries pass through untouched. The +1e-6 in the denominator keeps
// constant matrices finite (they map to lo).
num::matrix normalize_matrix(const num::matrix& m, const normalization_config& cfg);
info_matrices normalize(const info_matrices& raw, const normalization_config& cfg);

} // namespace sdwnlab::topo
