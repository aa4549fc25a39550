#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sdwnlab/numcore/matrix.hpp"
#include "sdwnlab/topology/link_metrics.hpp"
#include "sdwnlab/topology/topology.hpp"

namespace sdwnlab::traffic {

// Knobs for the desk-scale load generator. Rates are Mbps, delays ms, loss and
// error rates are fractions. day_scale stretches series time onto a simulated
// wall clock (default: 1000 samples x 5 s cover exactly one day).
struct traffic_config {
    double total_rate_mbps = 120.0;
    double sample_interval_s = 5.0;
    std::size_t sample_count = 1000;
    double day_scale = 17.28;
    double mass_jitter = 0.2;    // node attraction spread
    double demand_jitter = 0.15; // per-pair per-step burstiness
    double probe_jitter = 0.05;  // relative LLDP timing noise
    std::uint32_t packet_bytes = 1250;
    double base_delay_lo_ms = 1.0, base_delay_hi_ms = 10.0;
    double base_loss_lo = 0.001, base_loss_hi = 0.01;
    double base_err_lo = 0.0005, base_err_hi = 0.005; // packet corruption rates
    double max_pair_rate_mbps = 50.0;

    void validate() const;
    nlohmann::json to_json() const;
    static traffic_config from_json(const nlohmann::json& j); // rejects unknown keys
};

// Offered load on one link, split by direction (a->b uses the topology's a < b).
struct directed_load {
    double ab_mbps = 0.0, ba_mbps = 0.0;
};

// Hop-shortest path src -> dst, lexicographically smallest among equals.
// Returns node ids including both endpoints; empty only if disconnected.
std::vector<int> bfs_path(const topo::topology_spec& t, int src, int dst);

// Routes every positive demand entry along its hop-shortest path and sums the
// per-direction offered load per link. Throws if any pair exceeds the per-pair cap.
std::vector<directed_load> route_demands(const topo::topology_spec& t, const num::matrix& demand_mbps,
                                         double max_pair_rate_mbps = 50.0);

// A generated measurement campaign: every polling snapshot plus the metadata
// needed to regenerate or validate it.
struct traffic_series {
    std::string topology_hash;
    std::uint64_t seed = 0;
    double sample_interval_s = 5.0;
    double day_scale = 17.28;
    traffic_config config;
    std::vector<topo::link_snapshot> snapshots;

    // simulated wall-clock seconds for a snapshot (series time x day_scale)
    double wall_clock_s(std::size_t idx) const;
};

// Runs the packet-level simulation: gravity demands modulated by the diurnal
// profile and burst jitter, routed hop-shortest, drained through per-link
// Bernoulli loss/corruption, then measured back through the counter/probe
// formulas. Fully deterministic for a given (topology, config, seed).
traffic_series generate_series(const topo::topology_spec& t, const traffic_config& cfg, std::uint64_t seed);

} // namespace sdwnlab::traffic
