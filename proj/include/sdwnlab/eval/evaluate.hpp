#pragma once

// Path-quality scoring on raw link snapshots plus the comparison harness that
// races the trained agent against the classical routers over a whole
// measurement series. Results come out as per-3-hour-bucket and overall
// averages in a CSV (algorithm,bucket,metric,value) and a plain-text summary.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sdwnlab/routing/baselines.hpp"
#include "sdwnlab/routing/env.hpp"
#include "sdwnlab/routing/ppo.hpp"
#include "sdwnlab/topology/link_metrics.hpp"
#include "sdwnlab/topology/topology.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

namespace sdwnlab::eval {

// Quality of one routed path on one snapshot, in raw measurement units.
// Throughput sums over the path's edges; the other four are per-edge means.
struct path_metrics {
    double throughput_mbps = 0.0;
    double delay_ms = 0.0;
    double loss_pct = 0.0;
    double err_pct = 0.0;
    double distance_m = 0.0;
};

// Per-edge throughput term: bw_use * sqrt(1 - (loss + err)) * b / (2 * delay).
// Unit convention (fixed): loss and error enter the radical as fractions,
// delay enters in seconds (floored at the controller's min_delay_ms), and the
// carried volume b is the Mb the link moved this interval (bw_use * interval).
// An edge whose loss + err reaches 1 carries nothing: it contributes 0 and
// bumps *degraded_edges when given.
double path_throughput(const topo::topology_spec& t, const topo::link_snapshot& snap,
                       const std::vector<int>& path, double interval_s,
                       std::size_t* degraded_edges = nullptr);

// All five per-path figures for one snapshot. Throws config_error on a path
// shorter than one edge or one that hops a missing link.
path_metrics score_path(const topo::topology_spec& t, const topo::link_snapshot& snap,
                        const std::vector<int>& path, double interval_s,
                        std::size_t* degraded_edges = nullptr);

// Field-wise mean over per-snapshot scores; empty input -> state_error.
path_metrics aggregate(const std::vector<path_metrics>& per_snapshot);

// Signed percent change of ours relative to base; exactly 0 when equal
// (including 0 vs 0), signed infinity when base alone is 0.
double pct_delta(double ours, double base);

// One competitor: a display name plus a path provider for a (snapshot, pair)
// cell. Providers must be deterministic; report no route as found = false.
struct router {
    std::string name;
    std::function<routing::path_result(std::size_t snap_idx, int src, int dst)> route;
};

// The standard lineup: the trained agent first (when given), then ospf, dvrp
// and lsrp. The classics read each raw snapshot frame; the agent reads the
// same frame rescaled to unit range, exactly as it saw during training. All
// frames are precomputed here, so the returned closures outlive the series.
std::vector<router> standard_routers(const topo::topology_spec& t,
                                     const traffic::traffic_series& series,
                                     routing::actor_critic* agent,
                                     const routing::reward_config& rcfg);

struct compare_config {
    std::size_t pair_count = 20;     // sampled (src,dst) endpoint pairs
    std::uint64_t seed = 0;          // pair-sampling seed
    double bucket_seconds = 10800.0; // simulated-clock window per bucket
    void validate() const;           // pair_count >= 1, bucket_seconds > 0
};

// Averages for one (router, bucket): cells counts the (pair, snapshot)
// attempts that produced a path, no_path the ones that did not. Failed
// attempts never enter the means.
struct bucket_stats {
    path_metrics mean;
    std::size_t cells = 0;
    std::size_t no_path = 0;
    std::size_t degraded_edges = 0;
};

struct compare_report {
    std::vector<std::string> algorithms;
    std::size_t bucket_count = 0;
    double bucket_seconds = 10800.0;
    std::size_t snapshot_count = 0;
    std::vector<std::pair<int, int>> pairs;            // sampled endpoints
    std::vector<std::vector<bucket_stats>> per_bucket; // [algorithm][bucket]
    std::vector<bucket_stats> overall;                 // [algorithm]

    // Long-format rows algorithm,bucket,metric,value; buckets are 0-based
    // window indices plus an "overall" row group per algorithm. Mean metrics
    // are omitted for groups with zero successful cells; the cells, no_path
    // and degraded_edges counters always appear.
    std::string csv() const;

    // Fixed-width table of the same numbers plus a percent-change section
    // comparing the first algorithm against every other one (overall means).
    std::string summary() const;

    const bucket_stats& stats_for(const std::string& algo) const; // overall row
};

// Routes every sampled pair on every snapshot with every router, scores the
// found paths on the raw snapshot, and averages per bucket of simulated clock
// time and overall. Pair sampling derives from cfg.seed, so identical calls
// produce byte-identical csv() and summary() text.
compare_report compare(const topo::topology_spec& t, const traffic::traffic_series& series,
                       const std::vector<router>& routers, const compare_config& cfg);

} // namespace sdwnlab::eval
