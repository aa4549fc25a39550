#include "sdwnlab/topology/info_matrix.hpp"

#include <cmath>
#include <limits>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::topo {

double sentinel() { return std::numeric_limits<double>::quiet_NaN(); }
bool is_sentinel(double v) { return std::isnan(v); }

const std::array<std::string, metric_channel_count>& metric_channel_names() {
    static const std::array<std::string, metric_channel_count> names = {"bw_free", "delay", "pkt_err",
                                                                        "distance", "loss"};
    return names;
}

info_matrices to_info_matrices(const topology_spec& topo, const link_snapshot& snap) {
    if (snap.links.size() != topo.links.size())
        throw dimension_error("to_info_matrices: snapshot does not match topology link count");
    const std::size_t n = topo.node_count();
    info_matrices out;
    for (auto& m : out.channel) m = num::matrix(n, n, sentinel());
    for (std::size_t k = 0; k < topo.links.size(); ++k) {
        const link_spec& l = topo.links[k];
        const link_metrics& lm = snap.links[k];
        auto put = [&](metric_channel c, double v) {
            out[c](l.a, l.b) = v;
            out[c](l.b, l.a) = v;
        };
        put(metric_channel::bw_free, lm.bw_free_mbps);
        put(metric_channel::delay, lm.delay_ms);
        put(metric_channel::pkt_err, lm.pkt_err_pct);
        put(metric_channel::distance, lm.distance_m);
        put(metric_channel::loss, lm.loss_pct);
    }
    return out;
}

void normalization_config::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw config_error("normalization_config: need finite lo < hi");
}

num::matrix normalize_matrix(const num::matrix& m, const normalization_config& cfg) {
    cfg.validate();
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        if (is_sentinel(v)) continue;
        if (!std::isfinite(v)) throw numeric_error("normalize: non-finite metric value");
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    num::matrix out = m;
    if (!std::isfinite(mn)) return out; // all-sentinel matrix: nothing to scale
    const double span = mx - mn + 1e-6;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double& v = out.data()[i];
        if (is_sentinel(v)) continue;
        v = cfg.lo + (v - mn) * (cfg.hi - cfg.lo) / span;
    }
    return out;
}

info_matrices normalize(const info_matrices& raw, const normalization_config& cfg) {
    info_matrices out;
    for (int c = 0; c < metric_channel_count; ++c) out.channel[c] = normalize_matrix(raw.channel[c], cfg);
    return out;
}

} // namespace sdwnlab::topo
