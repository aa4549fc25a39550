#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/routing/baselines.hpp"
#include "sdwnlab/topology/topology.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

using namespace sdwnlab;
using namespace sdwnlab::routing;

namespace {

topo::topology_spec triangle_topology() {
    topo::topology_spec t;
    t.name = "triangle";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}, {2, {0, 40, 0}}};
    t.links = {{0, 1, 20.0}, {0, 2, 20.0}, {1, 2, 20.0}};
    t.validate();
    return t;
}

topo::topology_spec line_topology() {
    topo::topology_spec t;
    t.name = "line";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}, {2, {80, 0, 0}}, {3, {120, 0, 0}}};
    t.links = {{0, 1, 20.0}, {1, 2, 20.0}, {2, 3, 20.0}};
    t.validate();
    return t;
}

topo::topology_spec square_topology() {
    topo::topology_spec t;
    t.name = "square";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}, {2, {0, 40, 0}}, {3, {40, 40, 0}}};
    t.links = {{0, 1, 20.0}, {0, 2, 20.0}, {1, 3, 20.0}, {2, 3, 20.0}};
    t.validate();
    return t;
}

topo::topology_spec diamond_topology() {
    topo::topology_spec t;
    t.name = "diamond";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}, {2, {0, 40, 0}}, {3, {40, 40, 0}}};
    t.links = {{0, 1, 20.0}, {0, 2, 20.0}, {1, 2, 20.0}, {1, 3, 20.0}, {2, 3, 20.0}};
    t.validate();
    return t;
}

// snapshot with one value vector on every link
topo::info_matrices uniform_snapshot(const topo::topology_spec& t,
                                     std::array<double, topo::metric_channel_count> vals) {
    const std::size_t n = t.node_count();
    topo::info_matrices m;
    for (int c = 0; c < topo::metric_channel_count; ++c) {
        m.channel[c] = num::matrix(n, n, topo::sentinel());
        for (const auto& l : t.links) {
            m.channel[c](l.a, l.b) = vals[c];
            m.channel[c](l.b, l.a) = vals[c];
        }
    }
    return m;
}

void set_delay(topo::info_matrices& m, int a, int b, double v) {
    m[topo::metric_channel::delay](a, b) = v;
    m[topo::metric_channel::delay](b, a) = v;
}

void kill_link(topo::info_matrices& m, int a, int b) {
    for (int c = 0; c < topo::metric_channel_count; ++c)
        m.channel[c](a, b) = m.channel[c](b, a) = topo::sentinel();
}

// hop distance oracle
int bfs_hops(const topo::topology_spec& t, const topo::info_matrices& snap, int src, int dst) {
    auto usable = [&](int a, int b) {
        for (int c = 0; c < topo::metric_channel_count; ++c)
            if (topo::is_sentinel(snap.channel[c](a, b))) return false;
        return true;
    };
    std::vector<int> dist(t.node_count(), -1);
    std::deque<int> q{src};
    dist[src] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v : t.neighbors(u))
            if (usable(u, v) && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist[dst];
}

// every simple path between the endpoints, for brute-force oracles
void all_simple_paths(const topo::topology_spec& t, int u, int dst, std::vector<int>& cur,
                      std::vector<char>& used, std::vector<std::vector<int>>& out) {
    if (u == dst) {
        out.push_back(cur);
        return;
    }
    for (int v : t.neighbors(u)) {
        if (used[v]) continue;
        used[v] = 1;
        cur.push_back(v);
        all_simple_paths(t, v, dst, cur, used, out);
        cur.pop_back();
        used[v] = 0;
    }
}

std::vector<std::vector<int>> enumerate_paths(const topo::topology_spec& t, int src, int dst) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur{src};
    std::vector<char> used(t.node_count(), 0);
    used[src] = 1;
    all_simple_paths(t, src, dst, cur, used, out);
    return out;
}

} // namespace

TEST_SUITE_BEGIN("baselines");

TEST_CASE("shortest delay routing: hand Dijkstra oracle, direct hops, ties") {
    const topo::topology_spec t = triangle_topology();
    topo::info_matrices snap = uniform_snapshot(t, {0.5, 1.0, 0.01, 50.0, 0.02});

    // delays (0-1)=1, (1-2)=1, (0-2)=10: the two-hop detour costs 2 < 10
    set_delay(snap, 0, 2, 10.0);
    const path_result r = ospf_path(t, snap, 0, 2);
    CHECK(r.found);
    CHECK(r.path == std::vector<int>{0, 1, 2});
    CHECK(r.cost == doctest::Approx(2.0).epsilon(1e-12));

    // neighbors joined by one link take the direct hop
    const path_result d = ospf_path(t, snap, 0, 1);
    CHECK(d.found);
    CHECK(d.path == std::vector<int>{0, 1});
    CHECK(d.cost == doctest::Approx(1.0).epsilon(1e-12));

    // equal-cost square: both 0-1-3 and 0-2-3 cost 2, the smaller id wins
    const topo::topology_spec sq = square_topology();
    const topo::info_matrices even = uniform_snapshot(sq, {0.5, 1.0, 0.01, 50.0, 0.02});
    const path_result tie = ospf_path(sq, even, 0, 3);
    CHECK(tie.found);
    CHECK(tie.path == std::vector<int>{0, 1, 3});
    CHECK(tie.cost == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(ospf_path(t, snap, 0, 0), config_error);
    CHECK_THROWS_AS(ospf_path(t, snap, -1, 2), config_error);
    CHECK_THROWS_AS(ospf_path(t, snap, 0, 9), config_error);
}

TEST_CASE("distance-vector routing: hop oracle, line path, convergence bound") {
    const topo::topology_spec line = line_topology();
    const topo::info_matrices snap = uniform_snapshot(line, {0.5, 2.0, 0.01, 50.0, 0.02});

    const dvrp_result r = dvrp_path(line, snap, 1, 3);
    CHECK(r.route.found);
    CHECK(r.route.path == std::vector<int>{1, 2, 3});
    CHECK(r.route.cost == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.converged);
    CHECK(r.rounds <= line.node_count() - 1);

    // every pair on the bundled lab layout matches the breadth-first oracle
    const topo::topology_spec lab = topo::build_lab_topology();
    traffic::traffic_config tc;
    tc.sample_count = 3;
    const auto series = traffic::generate_series(lab, tc, 7);
    const topo::info_matrices live = topo::to_info_matrices(lab, series.snapshots[2]);
    const int n = static_cast<int>(lab.node_count());
    for (int s = 0; s < n; ++s)
        for (int d = 0; d < n; ++d) {
            if (s == d) continue;
            const dvrp_result res = dvrp_path(lab, live, s, d);
            REQUIRE(res.route.found);
            CHECK(static_cast<int>(res.route.path.size()) - 1 == bfs_hops(lab, live, s, d));
            CHECK(res.converged);
            CHECK(res.rounds <= lab.node_count() - 1);
        }
}

TEST_CASE("link-state routing: uniform degeneracy and a brute-force cost oracle") {
    const reward_config rcfg;

    // uniform metrics collapse the composite cost to a constant per hop
    const topo::topology_spec diamond = diamond_topology();
    const topo::info_matrices even = uniform_snapshot(diamond, {0.5, 2.0, 0.01, 50.0, 0.02});
    const path_result flat = lsrp_path(diamond, even, 0, 3, rcfg);
    CHECK(flat.found);
    CHECK(flat.path.size() == 3); // min-hop: two hops via 1 or 2
    CHECK(flat.path == std::vector<int>{0, 1, 3});

    // randomized snapshots: the returned cost equals the brute-force minimum
    rng r(515);
    for (int trial = 0; trial < 20; ++trial) {
        topo::info_matrices snap;
        for (int c = 0; c < topo::metric_channel_count; ++c)
            snap.channel[c] = num::matrix(4, 4, topo::sentinel());
        for (const auto& l : diamond.links)
            for (int c = 0; c < topo::metric_channel_count; ++c)
                snap.channel[c](l.a, l.b) = snap.channel[c](l.b, l.a) = r.uniform(0.1, 50.0);

        // replicate the documented cost model on top of public pieces
        const topo::info_matrices unit = topo::normalize(snap, topo::normalization_config{});
        const double r_max = rcfg.beta[0];
        const double r_min = -(rcfg.beta[1] + rcfg.beta[2] + rcfg.beta[3] + rcfg.beta[4]);
        auto edge_cost = [&](int a, int b) {
            return 1.0 - (link_reward(diamond, a, b, unit, rcfg) - r_min) / (r_max - r_min) + 1e-6;
        };
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : enumerate_paths(diamond, 0, 3)) {
            double c = 0.0;
            for (std::size_t i = 0; i + 1 < p.size(); ++i) c += edge_cost(p[i], p[i + 1]);
            best = std::min(best, c);
        }

        const path_result got = lsrp_path(diamond, snap, 0, 3, rcfg);
        REQUIRE(got.found);
        CHECK(got.cost == doctest::Approx(best).epsilon(1e-9));
        double walked = 0.0;
        for (std::size_t i = 0; i + 1 < got.path.size(); ++i)
            walked += edge_cost(got.path[i], got.path[i + 1]);
        CHECK(walked == doctest::Approx(got.cost).epsilon(1e-9));
    }
}

TEST_CASE("edge costs stay strictly positive under every cost model") {
    const topo::topology_spec t = diamond_topology();
    rng r(99);
    const reward_config rcfg;
    for (int trial = 0; trial < 10; ++trial) {
        topo::info_matrices snap;
        for (int c = 0; c < topo::metric_channel_count; ++c)
            snap.channel[c] = num::matrix(4, 4, topo::sentinel());
        for (const auto& l : t.links)
            for (int c = 0; c < topo::metric_channel_count; ++c)
                snap.channel[c](l.a, l.b) = snap.channel[c](l.b, l.a) =
                    (c == 1 && trial == 0) ? 0.0 : r.uniform(0.0, 80.0); // zero delay edge case

        for (int s = 0; s < 4; ++s)
            for (int d = 0; d < 4; ++d) {
                if (s == d) continue;
                const path_result o = ospf_path(t, snap, s, d);
                const dvrp_result v = dvrp_path(t, snap, s, d);
                const path_result l = lsrp_path(t, snap, s, d, rcfg);
                REQUIRE(o.found);
                REQUIRE(v.route.found);
                REQUIRE(l.found);
                CHECK(o.cost > 0.0);
                CHECK(v.route.cost > 0.0);
                CHECK(l.cost > 0.0);
                // simple-path invariant: no node repeats
                for (const auto& p : {o.path, v.route.path, l.path}) {
                    std::vector<int> sorted = p;
                    std::sort(sorted.begin(), sorted.end());
                    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
                    CHECK(p.front() == s);
                    CHECK(p.back() == d);
                }
            }
    }
}

TEST_CASE("uniform metrics make all three baselines agree on path length") {
    const topo::topology_spec lab = topo::build_lab_topology();
    const topo::info_matrices even = uniform_snapshot(lab, {12.0, 3.0, 0.01, 55.0, 0.02});
    const reward_config rcfg;
    const int n = static_cast<int>(lab.node_count());
    for (int s = 0; s < n; ++s)
        for (int d = s + 1; d < n; ++d) {
            const std::size_t hops = static_cast<std::size_t>(bfs_hops(lab, even, s, d)) + 1;
            CHECK(ospf_path(lab, even, s, d).path.size() == hops);
            CHECK(dvrp_path(lab, even, s, d).route.path.size() == hops);
            CHECK(lsrp_path(lab, even, s, d, rcfg).path.size() == hops);
        }
}

TEST_CASE("a down link is routed around, and severed graphs report no path") {
    const topo::topology_spec diamond = diamond_topology();
    topo::info_matrices snap = uniform_snapshot(diamond, {0.5, 1.0, 0.01, 50.0, 0.02});
    kill_link(snap, 0, 1);

    const path_result o = ospf_path(diamond, snap, 0, 3);
    REQUIRE(o.found);
    CHECK(o.path == std::vector<int>{0, 2, 3}); // avoids the dead 0-1 link

    // severing the line's middle disconnects the endpoints
    const topo::topology_spec line = line_topology();
    topo::info_matrices cut = uniform_snapshot(line, {0.5, 1.0, 0.01, 50.0, 0.02});
    kill_link(cut, 1, 2);
    const reward_config rcfg;
    CHECK_FALSE(ospf_path(line, cut, 0, 3).found);
    CHECK_FALSE(dvrp_path(line, cut, 0, 3).route.found);
    CHECK_FALSE(lsrp_path(line, cut, 0, 3, rcfg).found);
    CHECK(ospf_path(line, cut, 0, 3).path.empty());
}

TEST_CASE("name dispatch runs the matching algorithm and rejects strangers") {
    const topo::topology_spec t = triangle_topology();
    topo::info_matrices snap = uniform_snapshot(t, {0.5, 1.0, 0.01, 50.0, 0.02});
    set_delay(snap, 0, 2, 10.0);
    const reward_config rcfg;

    CHECK(run_baseline("ospf", t, snap, 0, 2, rcfg).path == ospf_path(t, snap, 0, 2).path);
    CHECK(run_baseline("dvrp", t, snap, 0, 2, rcfg).path == dvrp_path(t, snap, 0, 2).route.path);
    CHECK(run_baseline("lsrp", t, snap, 0, 2, rcfg).path == lsrp_path(t, snap, 0, 2, rcfg).path);
    CHECK_THROWS_AS(run_baseline("rip", t, snap, 0, 2, rcfg), config_error);
}

TEST_SUITE_END();
