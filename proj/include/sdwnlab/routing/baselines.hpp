#pragma once

// Classical routing comparators run against the same link snapshots the agent
// sees. Cost models (documented design choices): OSPF minimizes summed link
// delay, DVRP minimizes hop count via distance-vector rounds, LSRP minimizes a
// composite cost derived from the per-link routing reward. A link whose
// snapshot row is missing (sentinel metrics) is treated as down by all three.

#include <string>
#include <vector>

#include "sdwnlab/routing/env.hpp"
#include "sdwnlab/topology/info_matrix.hpp"
#include "sdwnlab/topology/topology.hpp"

namespace sdwnlab::routing {

struct path_result {
    bool found = false;
    std::vector<int> path; // [src, ..., dst] when found
    double cost = 0.0;     // total cost in the algorithm's own metric
};

struct dvrp_result {
    path_result route;
    std::size_t rounds = 0; // relaxation sweeps that changed a distance
    bool converged = false; // a sweep with no changes was reached
};

// Dijkstra over per-link delay; equal-cost candidates resolve to the
// lexicographically smallest node sequence.
path_result ospf_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst);

// Bellman-Ford over hop count, rooted at the destination; converges within
// n - 1 changing sweeps on any connected component.
dvrp_result dvrp_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst);

// Dijkstra over 1 - normalized link reward (plus a small shift so every edge
// cost stays strictly positive); the snapshot is rescaled to unit range
// internally so the reward weights see the inputs they were designed for.
path_result lsrp_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst, const reward_config& rcfg);

// name-based dispatch for the CLI: "ospf" | "dvrp" | "lsrp"
path_result run_baseline(const std::string& algo, const topo::topology_spec& t,
                         const topo::info_matrices& snapshot, int src, int dst,
                         const reward_config& rcfg);

} // namespace sdwnlab::routing
