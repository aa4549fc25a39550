#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/routing/env.hpp"
#include "sdwnlab/topology/topology.hpp"

using namespace sdwnlab;
using namespace sdwnlab::routing;
using topo::build_small_topology;

namespace {

// unit matrices with one fixed value vector on every link
topo::info_matrices uniform_unit(const topo::topology_spec& t,
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

// unit matrices where every channel of link k carries base + spread * k
topo::info_matrices graded_unit(const topo::topology_spec& t, double base, double spread) {
    const std::size_t n = t.node_count();
    topo::info_matrices m;
    for (int c = 0; c < topo::metric_channel_count; ++c) m.channel[c] = num::matrix(n, n, topo::sentinel());
    for (std::size_t k = 0; k < t.links.size(); ++k) {
        const auto& l = t.links[k];
        for (int c = 0; c < topo::metric_channel_count; ++c) {
            const double v = base + spread * static_cast<double>(k);
            m.channel[c](l.a, l.b) = v;
            m.channel[c](l.b, l.a) = v;
        }
    }
    return m;
}

} // namespace

TEST_SUITE_BEGIN("env");

TEST_CASE("reward config: defaults give the fixed penalty pair and bad fields are refused") {
    reward_config cfg;
    cfg.validate();
    CHECK(cfg.loop_penalty() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(cfg.invalid_penalty() == doctest::Approx(-0.8).epsilon(1e-12));

    reward_config bad = cfg;
    bad.beta[0] = 1.5;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.xi2 = -0.1;
    CHECK_THROWS_AS(bad.validate(), config_error);

    nlohmann::json j = cfg.to_json();
    j["betaa"] = 1;
    CHECK_THROWS_WITH_AS(reward_config::from_json(j), doctest::Contains("betaa"), config_error);
    nlohmann::json round = cfg.to_json();
    reward_config back = reward_config::from_json(round);
    CHECK(back.to_json() == round);
}

TEST_CASE("link score: hand-evaluated weighted combinations") {
    auto t = build_small_topology();
    reward_config cfg;

    auto best = uniform_unit(t, {1.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(link_reward(t, 0, 1, best, cfg) == doctest::Approx(0.7).epsilon(1e-12));

    auto all_one = uniform_unit(t, {1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK(link_reward(t, 0, 1, all_one, cfg) == doctest::Approx(0.1).epsilon(1e-12));

    auto all_zero = uniform_unit(t, {0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(link_reward(t, 0, 1, all_zero, cfg) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(link_reward(t, 0, 5, best, cfg), state_error); // not linked
    auto holey = best;
    holey.channel[1](0, 1) = topo::sentinel();
    CHECK_THROWS_AS(link_reward(t, 0, 1, holey, cfg), missing_data_error);
}

TEST_CASE("path score: sums per-hop scores and respects undirected symmetry") {
    auto t = build_small_topology();
    reward_config cfg;
    auto m = graded_unit(t, 0.1, 0.02);

    // one hop equals that link's score
    std::vector<int> hop = {0, 1};
    CHECK(total_reward(t, hop, m, cfg) == doctest::Approx(link_reward(t, 0, 1, m, cfg)).epsilon(1e-12));

    // hand evaluation for 0-1-4-5: graded value v_k = 0.1 + 0.02k on every
    // channel gives hop score 0.1 * v_k (weights sum to 0.7 - 0.6)
    std::vector<int> path = {0, 1, 4, 5};
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double v = 0.1 + 0.02 * static_cast<double>(t.link_index(path[i], path[i + 1]));
        expect += 0.1 * v;
    }
    CHECK(total_reward(t, path, m, cfg) == doctest::Approx(expect).epsilon(1e-12));

    std::vector<int> rev(path.rbegin(), path.rend());
    CHECK(total_reward(t, rev, m, cfg) == doctest::Approx(total_reward(t, path, m, cfg)).epsilon(1e-12));

    std::vector<int> broken = {0, 5};
    CHECK_THROWS_AS(total_reward(t, broken, m, cfg), state_error);
}

TEST_CASE("reset: channel layout, endpoint markers and determinism") {
    auto t = topo::build_lab_topology();
    routing_env env(t, reward_config{});
    auto m = uniform_unit(t, {0.5, 0.2, 0.1, 0.3, 0.1});
    env.reset(2, 9, m);

    auto ch = env.state_channels();
    REQUIRE(ch.size() == state_channel_count);
    for (const auto& c : ch) {
        CHECK(c.rows() == t.node_count());
        CHECK(c.cols() == t.node_count());
    }

    // position: nonzero only at (src,src) and (dst,dst)
    for (std::size_t i = 0; i < t.node_count(); ++i)
        for (std::size_t j = 0; j < t.node_count(); ++j) {
            const double v = ch[0](i, j);
            if (i == 2 && j == 2) {
                CHECK(v == marker_current);
            } else if (i == 9 && j == 9) {
                CHECK(v == marker_destination);
            } else {
                CHECK(v == 0.0);
            }
        }

    // metric channels: observed values on links, zero elsewhere, all in [0,1]
    for (int c = 0; c < topo::metric_channel_count; ++c)
        for (std::size_t i = 0; i < t.node_count(); ++i)
            for (std::size_t j = 0; j < t.node_count(); ++j) {
                const double v = ch[c + 1](i, j);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                if (t.has_link(static_cast<int>(i), static_cast<int>(j))) {
                    CHECK(v == m.channel[c](i, j));
                } else {
                    CHECK(v == 0.0);
                }
            }

    routing_env env2(t, reward_config{});
    env2.reset(2, 9, m);
    CHECK(env.observation() == env2.observation());
    CHECK(env.observation().size() == state_channel_count * t.node_count() * t.node_count());

    CHECK_THROWS_AS(env.reset(3, 3, m), config_error);
    CHECK_THROWS_AS(env.reset(-1, 3, m), config_error);
    CHECK_THROWS_AS(env.reset(0, 99, m), config_error);
    auto small = build_small_topology();
    auto small_m = uniform_unit(small, {0.5, 0.2, 0.1, 0.3, 0.1});
    CHECK_THROWS_AS(env.reset(0, 1, small_m), dimension_error);
}

TEST_CASE("step: the three action cases pay their contracted rewards") {
    auto t = build_small_topology(); // links 01 12 34 45 03 14 25 13
    routing_env env(t, reward_config{});
    auto m = uniform_unit(t, {1.0, 0.0, 0.0, 0.0, 0.0}); // every hop scores 0.7
    env.reset(0, 5, m);

    // non-adjacent pick: fixed penalty, position frozen
    auto r1 = env.step(5);
    CHECK(r1.reward == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK_FALSE(r1.done);
    CHECK(env.current() == 0);
    CHECK(env.path() == std::vector<int>{0});

    // fresh neighbor: link score, position advances, markers move
    auto r2 = env.step(1);
    CHECK(r2.reward == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(env.current() == 1);
    CHECK(env.path() == std::vector<int>{0, 1});
    auto ch = env.state_channels();
    CHECK(ch[0](0, 0) == marker_visited);
    CHECK(ch[0](1, 1) == marker_current);
    CHECK(ch[0](5, 5) == marker_destination);

    // revisit: smaller penalty and the cycle is excised
    env.step(4); // path 0 1 4
    auto r3 = env.step(1);
    CHECK(r3.reward == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(env.current() == 1);
    CHECK(env.path() == std::vector<int>{0, 1});

    // arrival: final hop score plus the arrival bonus
    env.step(4);
    auto r4 = env.step(5);
    CHECK(r4.reward == doctest::Approx(0.7 + 1.0).epsilon(1e-12));
    CHECK(r4.done);
    CHECK(r4.arrived);
    CHECK_FALSE(r4.truncated);
    CHECK(env.path() == std::vector<int>{0, 1, 4, 5});
    CHECK_FALSE(env.active());
    CHECK_THROWS_AS(env.step(1), state_error);
}

TEST_CASE("step: every action falls in exactly one case") {
    auto t = build_small_topology();
    reward_config cfg;
    auto m = graded_unit(t, 0.2, 0.03);
    for (int probe = 0; probe < static_cast<int>(t.node_count()); ++probe) {
        routing_env env(t, cfg);
        env.reset(0, 5, m);
        env.step(1); // path 0 1, current 1
        const bool adjacent = t.has_link(1, probe);
        const bool visited = probe == 0 || probe == 1;
        auto res = env.step(probe);
        if (!adjacent) {
            CHECK(res.reward == doctest::Approx(cfg.invalid_penalty()).epsilon(1e-12));
        } else if (visited) {
            CHECK(res.reward == doctest::Approx(cfg.loop_penalty()).epsilon(1e-12));
        } else {
            double expect = link_reward(t, 1, probe, m, cfg);
            if (probe == 5) expect += cfg.r_s;
            CHECK(res.reward == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    routing_env env(t, cfg);
    env.reset(0, 5, m);
    CHECK_THROWS_AS(env.step(-1), config_error);
    CHECK_THROWS_AS(env.step(6), config_error);
}

TEST_CASE("step: metric channels stay fixed while the episode runs") {
    auto t = build_small_topology();
    routing_env env(t, reward_config{});
    auto m = graded_unit(t, 0.2, 0.03);
    env.reset(0, 5, m);
    auto before = env.state_channels();
    env.step(1);
    env.step(3); // fresh hop
    env.step(0); // revisit
    auto after = env.state_channels();
    for (int c = 1; c < state_channel_count; ++c)
        for (std::size_t i = 0; i < before[c].size(); ++i)
            CHECK(before[c].data()[i] == after[c].data()[i]);
}

TEST_CASE("step cap: a stuck policy is truncated after 2n steps") {
    auto t = build_small_topology();
    routing_env env(t, reward_config{});
    auto m = uniform_unit(t, {0.5, 0.5, 0.5, 0.5, 0.5});
    env.reset(0, 5, m);
    step_result last;
    for (std::size_t i = 0; i < env.step_cap(); ++i) {
        CHECK(env.active());
        last = env.step(5); // never adjacent to 0: frozen forever
    }
    CHECK(last.done);
    CHECK(last.truncated);
    CHECK_FALSE(last.arrived);
    CHECK(env.steps_taken() == 2 * t.node_count());
}

TEST_CASE("looping walks still report a simple final path") {
    auto t = build_small_topology();
    routing_env env(t, reward_config{});
    auto m = uniform_unit(t, {0.8, 0.1, 0.1, 0.1, 0.1});
    env.reset(0, 2, m);
    // wander with two revisits before arriving
    for (int a : {1, 4, 1, 3, 1, 2}) env.step(a);
    const auto& trace = env.trace();
    CHECK(trace.src == 0);
    CHECK(trace.dst == 2);
    CHECK(trace.actions.size() == 6);
    CHECK(trace.rewards.size() == 6);
    CHECK(trace.final_path == std::vector<int>{0, 1, 2});
    std::vector<int> sorted = trace.final_path;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()); // no repeats

    nlohmann::json j = trace.to_json();
    CHECK(j.at("final_path").size() == 3);
    CHECK(j.at("rewards").size() == 6);
}

TEST_CASE("uniform costly links make longer paths strictly worse") {
    auto t = build_small_topology();
    reward_config cfg;
    auto m = uniform_unit(t, {0.0, 1.0, 1.0, 1.0, 1.0}); // every hop scores -0.6
    std::vector<int> one_hop = {0, 1};
    std::vector<int> two_hop = {0, 3, 1};
    std::vector<int> three_hop = {0, 3, 4, 1};
    const double r1 = total_reward(t, one_hop, m, cfg);
    const double r2 = total_reward(t, two_hop, m, cfg);
    const double r3 = total_reward(t, three_hop, m, cfg);
    CHECK(r1 == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(r2 == doctest::Approx(-1.2).epsilon(1e-12));
    CHECK(r3 == doctest::Approx(-1.8).epsilon(1e-12));
    CHECK(r1 > r2);
    CHECK(r2 > r3);
}

TEST_SUITE_END();
