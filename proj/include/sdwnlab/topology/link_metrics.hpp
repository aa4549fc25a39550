#pragma once

#include <cstdint>
#include <vector>

#include "sdwnlab/topology/topology.hpp"

namespace sdwnlab::topo {

// 1 Mbps carries 125000 bytes per second; fixed conversion for all rate math.
inline constexpr double bytes_per_sec_per_mbps = 125000.0;

// Controller floors measured delay here (ms) so queue-free links never report 0.
inline constexpr double min_delay_ms = 0.001;

// Cumulative per-port counters as polled from one end of a link.
struct port_counters {
    double timestamp_s = 0.0;
    std::uint64_t tx_bytes = 0, rx_bytes = 0;
    std::uint64_t tx_packets = 0, rx_packets = 0;
};

// Controller-observed probe timings for one link sample (all ms): LLDP loop
// times through each endpoint and the matching controller echo round-trips.
struct probe_times {
    double lldp_a_ms = 0.0, lldp_b_ms = 0.0;
    double echo_a_ms = 0.0, echo_b_ms = 0.0;
};

// Measured state of one link over one polling window.
struct link_metrics {
    double bw_use_mbps = 0.0;
    double bw_free_mbps = 0.0;
    double delay_ms = 0.0;
    double loss_pct = 0.0;
    double pkt_err_pct = 0.0;
    double pkt_drop = 0.0; // packet count lost in the window
    double distance_m = 0.0;
};

// |Δ(tx_bytes + rx_bytes)| / Δt for one port, converted to Mbps.
// Throws state_error when the window is empty (cur.timestamp <= prev.timestamp).
double port_rate_mbps(const port_counters& prev, const port_counters& cur);

struct bandwidth_sample {
    double bw_use_mbps = 0.0;
    double bw_free_mbps = 0.0;
};

// Link usage = the busier of the two ends; free = |capacity - use|.
bandwidth_sample compute_bandwidth(const port_counters& prev_a, const port_counters& cur_a,
                                   const port_counters& prev_b, const port_counters& cur_b,
                                   double capacity_mbps);

// Half the LLDP loop surplus over the controller echoes, floored at min_delay_ms.
double compute_delay_ms(const probe_times& p);

struct loss_err_drop {
    double loss_pct = 0.0;
    double pkt_err_pct = 0.0;
    double pkt_drop = 0.0;
};

// Packet loss: worse direction of 1 - delivered/sent, as a percentage.
// Byte error: |(bytes received at a) - (bytes sent by b)| / (bytes received at a), %.
// Drop count: |packets received at a - packets sent by b| over the window.
loss_err_drop compute_loss_err_drop(const port_counters& prev_a, const port_counters& cur_a,
                                    const port_counters& prev_b, const port_counters& cur_b);

// One polled measurement of every link at one instant.
struct link_snapshot {
    double timestamp_s = 0.0;
    std::vector<link_metrics> links; // aligned with topology_spec::links
};

// Assembles per-link metrics from the raw counters/probes of one polling window.
link_metrics assemble_link_metrics(const topology_spec& topo, int link_idx,
                                   const port_counters& prev_a, const port_counters& cur_a,
                                   const port_counters& prev_b, const port_counters& cur_b,
                                   const probe_times& probes);

} // namespace sdwnlab::topo
