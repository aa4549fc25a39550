#include "sdwnlab/routing/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::routing {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
// slack when matching dist[u] = cost + dist[v]: only rounding drift between
// different summation orders of equal-cost paths, so it must stay far below
// the smallest edge cost or the walk could step sideways and cycle
constexpr double path_tol = 1e-12;
constexpr double min_cost = 1e-6;   // keeps zero-delay links strictly positive
constexpr double lsrp_shift = 1e-6; // keeps the best-reward link strictly positive

void check_endpoints(const topo::topology_spec& t, int src, int dst) {
    const int n = static_cast<int>(t.node_count());
    if (src < 0 || src >= n || dst < 0 || dst >= n)
        throw config_error("baseline: endpoint out of range");
    if (src == dst) throw config_error("baseline: source and destination must differ");
}

// a link is usable only when its whole snapshot row was measured
bool edge_usable(const topo::info_matrices& snap, int a, int b) {
    for (int c = 0; c < topo::metric_channel_count; ++c)
        if (topo::is_sentinel(snap.channel[c](a, b))) return false;
    return true;
}

using cost_fn = std::function<double(int, int)>;

// distances from every node to dst; unusable edges are skipped
std::vector<double> dijkstra_to(const topo::topology_spec& t, const topo::info_matrices& snap,
                                const cost_fn& cost, int dst) {
    const std::size_t n = t.node_count();
    std::vector<double> dist(n, inf);
    dist[dst] = 0.0;
    using item = std::pair<double, int>; // (distance, node) — pair order breaks ties by id
    std::priority_queue<item, std::vector<item>, std::greater<item>> heap;
    heap.push({0.0, dst});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (int v : t.neighbors(u)) {
            if (!edge_usable(snap, u, v)) continue;
            const double nd = d + cost(u, v);
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

// walks from src toward dst always taking the smallest-id neighbor that lies
// on a shortest path; strict cost positivity makes the walk loop-free
path_result walk_shortest(const topo::topology_spec& t, const topo::info_matrices& snap,
                          const cost_fn& cost, const std::vector<double>& dist, int src, int dst) {
    path_result out;
    if (!std::isfinite(dist[src])) return out; // unreachable: reported, not fatal
    out.found = true;
    out.cost = dist[src];
    out.path.push_back(src);
    int u = src;
    while (u != dst) {
        int next = -1;
        for (int v : t.neighbors(u)) { // neighbors() is id-ordered
            if (!edge_usable(snap, u, v)) continue;
            const double slack = std::fabs(dist[u] - (cost(u, v) + dist[v]));
            if (slack <= path_tol * std::max(1.0, std::fabs(dist[u]))) {
                next = v;
                break;
            }
        }
        if (next < 0) throw state_error("baseline: shortest-path walk lost its distance trail");
        out.path.push_back(next);
        u = next;
    }
    return out;
}

} // namespace

path_result ospf_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst) {
    check_endpoints(t, src, dst);
    const auto& delay = snapshot[topo::metric_channel::delay];
    const cost_fn cost = [&](int u, int v) { return std::max(delay(u, v), min_cost); };
    const std::vector<double> dist = dijkstra_to(t, snapshot, cost, dst);
    return walk_shortest(t, snapshot, cost, dist, src, dst);
}

dvrp_result dvrp_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst) {
    check_endpoints(t, src, dst);
    const std::size_t n = t.node_count();
    std::vector<double> dist(n, inf);
    dist[dst] = 0.0;

    dvrp_result out;
    // distance-vector emulation: every sweep lets each node adopt its best
    // neighbor estimate; positive unit costs settle within n - 1 changing sweeps
    for (std::size_t sweep = 0; sweep < n; ++sweep) {
        bool changed = false;
        for (const auto& l : t.links) {
            if (!edge_usable(snapshot, l.a, l.b)) continue;
            if (dist[l.b] + 1.0 < dist[l.a]) {
                dist[l.a] = dist[l.b] + 1.0;
                changed = true;
            }
            if (dist[l.a] + 1.0 < dist[l.b]) {
                dist[l.b] = dist[l.a] + 1.0;
                changed = true;
            }
        }
        if (!changed) {
            out.converged = true;
            break;
        }
        ++out.rounds;
    }

    const cost_fn cost = [](int, int) { return 1.0; };
    out.route = walk_shortest(t, snapshot, cost, dist, src, dst);
    return out;
}

path_result lsrp_path(const topo::topology_spec& t, const topo::info_matrices& snapshot, int src,
                      int dst, const reward_config& rcfg) {
    check_endpoints(t, src, dst);
    rcfg.validate();
    const topo::info_matrices unit = topo::normalize(snapshot, topo::normalization_config{});

    // unit-scale reward bounds: best case is full free bandwidth with zero
    // penalties, worst case is the reverse
    const double r_max = rcfg.beta[0];
    const double r_min = -(rcfg.beta[1] + rcfg.beta[2] + rcfg.beta[3] + rcfg.beta[4]);
    const double span = r_max - r_min;
    const cost_fn cost = [&](int u, int v) {
        const double r = link_reward(t, u, v, unit, rcfg);
        return 1.0 - (r - r_min) / span + lsrp_shift;
    };
    const std::vector<double> dist = dijkstra_to(t, snapshot, cost, dst);
    return walk_shortest(t, snapshot, cost, dist, src, dst);
}

path_result run_baseline(const std::string& algo, const topo::topology_spec& t,
                         const topo::info_matrices& snapshot, int src, int dst,
                         const reward_config& rcfg) {
    if (algo == "ospf") return ospf_path(t, snapshot, src, dst);
    if (algo == "dvrp") return dvrp_path(t, snapshot, src, dst).route;
    if (algo == "lsrp") return lsrp_path(t, snapshot, src, dst, rcfg);
    throw config_error("baseline: unknown algorithm '" + algo + "'");
}

} // namespace sdwnlab::routing
