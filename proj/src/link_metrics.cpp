#include "sdwnlab/topology/link_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::topo {

double port_rate_mbps(const port_counters& prev, const port_counters& cur) {
    const double dt = cur.timestamp_s - prev.timestamp_s;
    if (dt <= 0.0) throw state_error("port_rate: polling window is empty or reversed");
    const double prev_total = static_cast<double>(prev.tx_bytes) + static_cast<double>(prev.rx_bytes);
    const double cur_total = static_cast<double>(cur.tx_bytes) + static_cast<double>(cur.rx_bytes);
    return std::fabs(cur_total - prev_total) / dt / bytes_per_sec_per_mbps;
}

bandwidth_sample compute_bandwidth(const port_counters& prev_a, const port_counters& cur_a,
                                   const port_counters& prev_b, const port_counters& cur_b,
                                   double capacity_mbps) {
    if (!(capacity_mbps > 0.0)) throw config_error("compute_bandwidth: capacity must be positive");
    bandwidth_sample s;
    s.bw_use_mbps = std::max(port_rate_mbps(prev_a, cur_a), port_rate_mbps(prev_b, cur_b));
    s.bw_free_mbps = std::fabs(capacity_mbps - s.bw_use_mbps);
    return s;
}

double compute_delay_ms(const probe_times& p) {
    const double d = (p.lldp_a_ms + p.lldp_b_ms - p.echo_a_ms - p.echo_b_ms) / 2.0;
    return std::max(d, min_delay_ms);
}

loss_err_drop compute_loss_err_drop(const port_counters& prev_a, const port_counters& cur_a,
                                    const port_counters& prev_b, const port_counters& cur_b) {
    auto delta = [](std::uint64_t prev, std::uint64_t cur) {
        if (cur < prev) throw state_error("counters went backwards within a window");
        return static_cast<double>(cur - prev);
    };
    const double tx_pa = delta(prev_a.tx_packets, cur_a.tx_packets);
    const double rx_pa = delta(prev_a.rx_packets, cur_a.rx_packets);
    const double tx_pb = delta(prev_b.tx_packets, cur_b.tx_packets);
    const double rx_pb = delta(prev_b.rx_packets, cur_b.rx_packets);
    const double rx_ba = delta(prev_a.rx_bytes, cur_a.rx_bytes);
    const double tx_bb = delta(prev_b.tx_bytes, cur_b.tx_bytes);

    loss_err_drop out;
    // worse-direction delivery shortfall; an idle direction contributes 0
    const double fwd = tx_pa > 0.0 ? 1.0 - rx_pb / tx_pa : 0.0;
    const double rev = tx_pb > 0.0 ? 1.0 - rx_pa / tx_pb : 0.0;
    out.loss_pct = std::clamp(std::max(fwd, rev), 0.0, 1.0) * 100.0;
    out.pkt_err_pct = rx_ba > 0.0 ? std::fabs(rx_ba - tx_bb) / rx_ba * 100.0 : 0.0;
    out.pkt_drop = std::fabs(rx_pa - tx_pb);
    return out;
}

link_metrics assemble_link_metrics(const topology_spec& topo, int link_idx,
                                   const port_counters& prev_a, const port_counters& cur_a,
                                   const port_counters& prev_b, const port_counters& cur_b,
                                   const probe_times& probes) {
    if (link_idx < 0 || link_idx >= static_cast<int>(topo.links.size()))
        throw missing_data_error("assemble_link_metrics: no such link index");
    const link_spec& l = topo.links[link_idx];

    link_metrics m;
    const bandwidth_sample bw = compute_bandwidth(prev_a, cur_a, prev_b, cur_b, l.capacity_mbps);
    m.bw_use_mbps = bw.bw_use_mbps;
    m.bw_free_mbps = bw.bw_free_mbps;
    m.delay_ms = compute_delay_ms(probes);
    const loss_err_drop led = compute_loss_err_drop(prev_a, cur_a, prev_b, cur_b);
    m.loss_pct = led.loss_pct;
    m.pkt_err_pct = led.pkt_err_pct;
    m.pkt_drop = led.pkt_drop;
    m.distance_m = node_distance_m(topo.nodes[l.a], topo.nodes[l.b]);
    return m;
}

} // namespace sdwnlab::topo
