#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/eval/evaluate.hpp"
#include "sdwnlab/routing/ppo.hpp"
#include "sdwnlab/topology/topology.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

using namespace sdwnlab;
using namespace sdwnlab::eval;

namespace {

topo::topology_spec pair_topology() {
    topo::topology_spec t;
    t.name = "pair";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}};
    t.links = {{0, 1, 20.0}};
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

topo::topology_spec diamond_topology() {
    topo::topology_spec t;
    t.name = "diamond";
    t.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}, {2, {0, 40, 0}}, {3, {40, 40, 0}}};
    t.links = {{0, 1, 20.0}, {0, 2, 20.0}, {1, 2, 20.0}, {1, 3, 20.0}, {2, 3, 20.0}};
    t.validate();
    return t;
}

topo::link_metrics make_link(double bw_use, double delay_ms, double loss_pct, double err_pct,
                             double dist_m) {
    topo::link_metrics m;
    m.bw_use_mbps = bw_use;
    m.bw_free_mbps = std::max(0.0, 20.0 - bw_use);
    m.delay_ms = delay_ms;
    m.loss_pct = loss_pct;
    m.pkt_err_pct = err_pct;
    m.distance_m = dist_m;
    return m;
}

topo::link_snapshot uniform_links(const topo::topology_spec& t, const topo::link_metrics& m) {
    topo::link_snapshot s;
    s.links.assign(t.link_count(), m);
    return s;
}

// hand-built series: timestamps follow the generator's k * interval rule
traffic::traffic_series make_series(const topo::topology_spec& t,
                                    std::vector<topo::link_snapshot> snaps, double interval_s = 5.0,
                                    double day_scale = 17.28) {
    traffic::traffic_series s;
    s.topology_hash = t.content_hash();
    s.seed = 0;
    s.sample_interval_s = interval_s;
    s.day_scale = day_scale;
    s.config.sample_interval_s = interval_s;
    s.config.day_scale = day_scale;
    s.config.sample_count = snaps.size();
    for (std::size_t k = 0; k < snaps.size(); ++k)
        snaps[k].timestamp_s = static_cast<double>(k) * interval_s;
    s.snapshots = std::move(snaps);
    return s;
}

// two-edge fixture on the line: distinct values per hop for mean/sum checks
topo::link_snapshot fixture_snapshot(const topo::topology_spec& line) {
    topo::link_snapshot s;
    s.links.assign(line.link_count(), make_link(1.0, 1.0, 0.0, 0.0, 40.0));
    s.links[0] = make_link(8.0, 2.0, 1.0, 0.5, 40.0);  // link 0-1
    s.links[1] = make_link(12.0, 4.0, 3.0, 1.5, 60.0); // link 1-2
    return s;
}

} // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("throughput of one edge matches the hand-evaluated unit convention") {
    const topo::topology_spec t = pair_topology();
    const std::vector<int> path = {0, 1};

    // 10 Mbps for 0.4 s is 4 Mb carried; with a 2 s delay: 10 * 1 * 4 / (2*2) = 10
    auto snap = uniform_links(t, make_link(10.0, 2000.0, 0.0, 0.0, 40.0));
    CHECK(path_throughput(t, snap, path, 0.4) == doctest::Approx(10.0).epsilon(1e-12));

    // loss 19% leaves sqrt(0.81) = 0.9 of the clean figure
    snap = uniform_links(t, make_link(10.0, 2000.0, 19.0, 0.0, 40.0));
    CHECK(path_throughput(t, snap, path, 0.4) == doctest::Approx(9.0).epsilon(1e-12));

    // loss + err at 100%: the radical vanishes and the edge counts as degraded
    snap = uniform_links(t, make_link(10.0, 2000.0, 60.0, 40.0, 40.0));
    std::size_t degraded = 0;
    CHECK(path_throughput(t, snap, path, 0.4, &degraded) == 0.0);
    CHECK(degraded == 1);

    // a zero measured delay is floored at the controller minimum (0.001 ms)
    snap = uniform_links(t, make_link(10.0, 0.0, 0.0, 0.0, 40.0));
    CHECK(path_throughput(t, snap, path, 0.4) == doctest::Approx(2.0e7).epsilon(1e-12));
}

TEST_CASE("per-path scores: throughput sums per edge, the rest average per edge") {
    const topo::topology_spec line = line_topology();
    const topo::link_snapshot snap = fixture_snapshot(line);
    const std::vector<int> path = {0, 1, 2};

    const path_metrics m = score_path(line, snap, path, 5.0);
    // frozen hand values for the two edge terms (8 Mbps and 12 Mbps hops)
    CHECK(m.throughput_mbps == doctest::Approx(167349.42425073113).epsilon(1e-12));
    CHECK(path_throughput(line, snap, path, 5.0) ==
          doctest::Approx(79397.73296511683 + 87951.69128561429).epsilon(1e-12));
    CHECK(m.delay_ms == doctest::Approx(3.0));
    CHECK(m.loss_pct == doctest::Approx(2.0));
    CHECK(m.err_pct == doctest::Approx(1.0));
    CHECK(m.distance_m == doctest::Approx(50.0));

    SUBCASE("bad inputs are rejected") {
        CHECK_THROWS_AS(score_path(line, snap, {0}, 5.0), config_error);
        CHECK_THROWS_AS(score_path(line, snap, {0, 2}, 5.0), config_error); // no 0-2 link
        CHECK_THROWS_AS(score_path(line, snap, path, 0.0), config_error);
        CHECK_THROWS_AS(score_path(line, snap, path, -1.0), config_error);
        topo::link_snapshot bad = snap;
        bad.links.pop_back();
        CHECK_THROWS_AS(score_path(line, bad, path, 5.0), dimension_error);
    }
}

TEST_CASE("aggregation is the field-wise mean over snapshots") {
    path_metrics a{10.0, 2.0, 1.0, 0.5, 40.0};
    path_metrics b{20.0, 4.0, 3.0, 1.5, 60.0};

    const path_metrics mean = aggregate({a, b});
    CHECK(mean.throughput_mbps == doctest::Approx(15.0));
    CHECK(mean.delay_ms == doctest::Approx(3.0));
    CHECK(mean.loss_pct == doctest::Approx(2.0));
    CHECK(mean.err_pct == doctest::Approx(1.0));
    CHECK(mean.distance_m == doctest::Approx(50.0));

    // single snapshot: aggregate is the identity
    const path_metrics one = aggregate({a});
    CHECK(one.throughput_mbps == a.throughput_mbps);
    CHECK(one.delay_ms == a.delay_ms);
    CHECK(one.distance_m == a.distance_m);

    CHECK_THROWS_AS(aggregate({}), state_error);
}

TEST_CASE("two-snapshot fixture matches an independent brute-force re-summation") {
    const topo::topology_spec line = line_topology();
    const std::vector<int> path = {0, 1, 2};
    const double interval = 5.0;

    topo::link_snapshot s0 = fixture_snapshot(line);
    topo::link_snapshot s1 = fixture_snapshot(line);
    s1.links[0] = make_link(8.0, 4.0, 2.0, 1.0, 40.0); // doubled delay and rates
    s1.links[1] = make_link(12.0, 8.0, 6.0, 3.0, 60.0);

    const path_metrics agg = aggregate({score_path(line, s0, path, interval),
                                        score_path(line, s1, path, interval)});

    // brute force: loop every snapshot and edge with the raw formula
    double th = 0.0, de = 0.0, lo = 0.0, er = 0.0, di = 0.0;
    for (const auto& s : {s0, s1}) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto& m = s.links[line.link_index(path[i], path[i + 1])];
            const double drop = (m.loss_pct + m.pkt_err_pct) / 100.0;
            th += m.bw_use_mbps * std::sqrt(1.0 - drop) * (m.bw_use_mbps * interval) /
                  (2.0 * m.delay_ms / 1000.0);
            de += m.delay_ms;
            lo += m.loss_pct;
            er += m.pkt_err_pct;
            di += m.distance_m;
        }
    }
    const double snaps = 2.0, edges = 2.0;
    CHECK(agg.throughput_mbps == doctest::Approx(th / snaps).epsilon(1e-12));
    CHECK(agg.delay_ms == doctest::Approx(de / (snaps * edges)).epsilon(1e-12));
    CHECK(agg.loss_pct == doctest::Approx(lo / (snaps * edges)).epsilon(1e-12));
    CHECK(agg.err_pct == doctest::Approx(er / (snaps * edges)).epsilon(1e-12));
    CHECK(agg.distance_m == doctest::Approx(di / (snaps * edges)).epsilon(1e-12));
    // frozen spot values for the fixture
    CHECK(agg.throughput_mbps == doctest::Approx(124836.05976083905).epsilon(1e-12));
}

TEST_CASE("throughput never rises when an edge slows down, all else equal") {
    const topo::topology_spec line = line_topology();
    const std::vector<int> path = {0, 1, 2, 3};
    rng r(derive_seed(99, "eval-mono"));

    for (int trial = 0; trial < 50; ++trial) {
        topo::link_snapshot snap;
        for (std::size_t k = 0; k < line.link_count(); ++k)
            snap.links.push_back(make_link(r.uniform(1.0, 15.0), r.uniform(1.0, 10.0),
                                           r.uniform(0.0, 5.0), r.uniform(0.0, 2.0),
                                           r.uniform(30.0, 110.0)));
        const double before = path_throughput(line, snap, path, 5.0);
        topo::link_snapshot slower = snap;
        const std::size_t which = r.uniform_index(line.link_count());
        slower.links[which].delay_ms *= 1.0 + r.uniform(0.1, 4.0);
        CHECK(path_throughput(line, slower, path, 5.0) <= before);
    }
}

TEST_CASE("percent deltas: sign, identity and the zero-base edge case") {
    CHECK(pct_delta(110.0, 100.0) == doctest::Approx(10.0));
    CHECK(pct_delta(90.0, 100.0) == doctest::Approx(-10.0));
    CHECK(pct_delta(5.0, 5.0) == 0.0);
    CHECK(pct_delta(0.0, 0.0) == 0.0);
    CHECK(std::isinf(pct_delta(1.0, 0.0)));
    CHECK(pct_delta(1.0, 0.0) > 0.0);
}

TEST_CASE("uniform metrics make every algorithm tie on every reported figure") {
    const topo::topology_spec t = diamond_topology();
    const auto snap = uniform_links(t, make_link(6.0, 3.0, 1.0, 0.5, 40.0));
    const traffic::traffic_series series = make_series(t, {snap, snap, snap});

    const auto routers = standard_routers(t, series, nullptr, routing::reward_config{});
    REQUIRE(routers.size() == 3);
    compare_config cc;
    cc.pair_count = 10;
    cc.seed = 5;
    const compare_report rep = compare(t, series, routers, cc);

    REQUIRE(rep.algorithms == std::vector<std::string>{"ospf", "dvrp", "lsrp"});
    for (std::size_t a = 1; a < rep.algorithms.size(); ++a) {
        for (std::size_t b = 0; b < rep.bucket_count; ++b) {
            const auto& x = rep.per_bucket[0][b];
            const auto& y = rep.per_bucket[a][b];
            CHECK(x.cells == y.cells);
            CHECK(std::abs(x.mean.throughput_mbps - y.mean.throughput_mbps) <= 1e-9);
            CHECK(std::abs(x.mean.delay_ms - y.mean.delay_ms) <= 1e-9);
            CHECK(std::abs(x.mean.loss_pct - y.mean.loss_pct) <= 1e-9);
            CHECK(std::abs(x.mean.err_pct - y.mean.err_pct) <= 1e-9);
            CHECK(std::abs(x.mean.distance_m - y.mean.distance_m) <= 1e-9);
        }
        CHECK(std::abs(rep.overall[0].mean.throughput_mbps -
                       rep.overall[a].mean.throughput_mbps) <= 1e-9);
    }
    // uniform per-edge figures equal the configured link values exactly
    CHECK(rep.overall[0].mean.delay_ms == doctest::Approx(3.0));
    CHECK(rep.overall[0].mean.loss_pct == doctest::Approx(1.0));
    CHECK(rep.overall[0].no_path == 0);
}

TEST_CASE("a router compared against itself reports zero deltas everywhere") {
    const topo::topology_spec t = diamond_topology();
    const auto snap = uniform_links(t, make_link(6.0, 3.0, 1.0, 0.5, 40.0));
    const traffic::traffic_series series = make_series(t, {snap, snap});

    const auto base = standard_routers(t, series, nullptr, routing::reward_config{});
    const std::vector<router> twins = {{"agent", base[0].route}, {"again", base[0].route}};
    compare_config cc;
    cc.pair_count = 8;
    cc.seed = 3;
    const compare_report rep = compare(t, series, twins, cc);

    CHECK(pct_delta(rep.overall[0].mean.throughput_mbps, rep.overall[1].mean.throughput_mbps) == 0.0);
    CHECK(pct_delta(rep.overall[0].mean.delay_ms, rep.overall[1].mean.delay_ms) == 0.0);
    CHECK(pct_delta(rep.overall[0].mean.loss_pct, rep.overall[1].mean.loss_pct) == 0.0);
    CHECK(pct_delta(rep.overall[0].mean.err_pct, rep.overall[1].mean.err_pct) == 0.0);
    CHECK(pct_delta(rep.overall[0].mean.distance_m, rep.overall[1].mean.distance_m) == 0.0);
    CHECK(rep.summary().find("+0.00%") != std::string::npos);
    CHECK(rep.summary().find("vs again") != std::string::npos);
}

TEST_CASE("failed routes are counted out of the means, not into them") {
    const topo::topology_spec line = line_topology();
    // middle link down in every snapshot: components {0,1} and {2,3}
    auto snap = uniform_links(line, make_link(6.0, 3.0, 1.0, 0.5, 40.0));
    snap.links[1].bw_free_mbps = std::numeric_limits<double>::quiet_NaN();
    snap.links[1].delay_ms = std::numeric_limits<double>::quiet_NaN();
    snap.links[1].pkt_err_pct = std::numeric_limits<double>::quiet_NaN();
    snap.links[1].distance_m = std::numeric_limits<double>::quiet_NaN();
    snap.links[1].loss_pct = std::numeric_limits<double>::quiet_NaN();
    const traffic::traffic_series series = make_series(line, {snap, snap});

    const auto routers = standard_routers(line, series, nullptr, routing::reward_config{});
    compare_config cc;
    cc.pair_count = 24;
    cc.seed = 11;
    const compare_report rep = compare(line, series, routers, cc);

    std::size_t cross = 0;
    for (const auto& [s, d] : rep.pairs)
        if ((s <= 1) != (d <= 1)) ++cross;
    REQUIRE(cross > 0); // 24 draws over a 4-node graph always hit a cross pair

    for (std::size_t a = 0; a < rep.algorithms.size(); ++a) {
        const auto& o = rep.overall[a];
        CHECK(o.no_path == cross * series.snapshots.size());
        CHECK(o.cells + o.no_path == cc.pair_count * series.snapshots.size());
        // every reachable pair is a single surviving edge: means equal its raw values
        CHECK(o.mean.delay_ms == doctest::Approx(3.0));
        CHECK(o.mean.distance_m == doctest::Approx(40.0));
    }
}

TEST_CASE("buckets split on simulated clock time and add up to the overall row") {
    const topo::topology_spec t = diamond_topology();
    const auto snap = uniform_links(t, make_link(6.0, 3.0, 1.0, 0.5, 40.0));
    // wall clock ticks 86.4 s apart; a 200 s bucket puts snapshots 0-2 in
    // bucket 0 and snapshot 3 in bucket 1
    const traffic::traffic_series series = make_series(t, {snap, snap, snap, snap});

    const auto routers = standard_routers(t, series, nullptr, routing::reward_config{});
    compare_config cc;
    cc.pair_count = 5;
    cc.seed = 21;
    cc.bucket_seconds = 200.0;
    const compare_report rep = compare(t, series, routers, cc);

    REQUIRE(rep.bucket_count == 2);
    for (std::size_t a = 0; a < rep.algorithms.size(); ++a) {
        CHECK(rep.per_bucket[a][0].cells == 3 * cc.pair_count);
        CHECK(rep.per_bucket[a][1].cells == 1 * cc.pair_count);
        CHECK(rep.per_bucket[a][0].cells + rep.per_bucket[a][1].cells == rep.overall[a].cells);
    }
    CHECK(rep.stats_for("ospf").cells == 4 * cc.pair_count);
    CHECK_THROWS_AS(rep.stats_for("rip"), missing_data_error);
}

TEST_CASE("reports over a generated series regenerate byte-identically") {
    const topo::topology_spec t = diamond_topology();
    traffic::traffic_config tc;
    tc.sample_count = 8;
    const traffic::traffic_series series = traffic::generate_series(t, tc, 314);

    routing::routing_env env(t, routing::reward_config{});
    routing::actor_critic agent(env.observation_size(), env.action_count(), 8, 2718);
    const auto routers = standard_routers(t, series, &agent, routing::reward_config{});
    REQUIRE(routers.size() == 4);
    REQUIRE(routers[0].name == "agent");

    compare_config cc;
    cc.pair_count = 6;
    cc.seed = 77;
    const compare_report r1 = compare(t, series, routers, cc);
    const compare_report r2 = compare(t, series, routers, cc);
    CHECK(r1.csv() == r2.csv());
    CHECK(r1.summary() == r2.summary());

    // csv shape: long format with the fixed header and counter rows per group
    const std::string csv = r1.csv();
    CHECK(csv.rfind("algorithm,bucket,metric,value\n", 0) == 0);
    CHECK(csv.find("ospf,overall,cells,") != std::string::npos);
    CHECK(csv.find("agent,overall,no_path,") != std::string::npos);
    CHECK(csv.find("lsrp,0,degraded_edges,") != std::string::npos);

    // every cell is attempted by every router
    for (std::size_t a = 0; a < r1.algorithms.size(); ++a)
        CHECK(r1.overall[a].cells + r1.overall[a].no_path ==
              cc.pair_count * series.snapshots.size());
    // the classics always route a connected graph
    CHECK(r1.stats_for("ospf").no_path == 0);
    CHECK(r1.stats_for("dvrp").no_path == 0);
    CHECK(r1.stats_for("lsrp").no_path == 0);

    SUBCASE("a different pair seed changes the sampled endpoints") {
        compare_config other = cc;
        other.seed = 78;
        CHECK(compare(t, series, routers, other).pairs != r1.pairs);
    }
}

TEST_CASE("comparison inputs are validated before any routing happens") {
    const topo::topology_spec t = diamond_topology();
    const auto snap = uniform_links(t, make_link(6.0, 3.0, 1.0, 0.5, 40.0));
    const traffic::traffic_series series = make_series(t, {snap});
    const auto routers = standard_routers(t, series, nullptr, routing::reward_config{});

    compare_config cc;
    CHECK_THROWS_AS(compare(t, series, {}, cc), config_error);

    traffic::traffic_series empty = series;
    empty.snapshots.clear();
    CHECK_THROWS_AS(compare(t, empty, routers, cc), state_error);

    compare_config zero_pairs;
    zero_pairs.pair_count = 0;
    CHECK_THROWS_AS(compare(t, series, routers, zero_pairs), config_error);

    compare_config bad_bucket;
    bad_bucket.bucket_seconds = 0.0;
    CHECK_THROWS_AS(compare(t, series, routers, bad_bucket), config_error);

    std::vector<router> nameless = {{"", routers[0].route}};
    CHECK_THROWS_AS(compare(t, series, nameless, cc), config_error);
}

TEST_SUITE_END();
