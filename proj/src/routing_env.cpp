#include "sdwnlab/routing/env.hpp"

#include <algorithm>
#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::routing {

void reward_config::validate() const {
    for (double b : beta)
        if (!(b >= 0.0 && b <= 1.0)) throw config_error("reward config: beta weights must lie in [0,1]");
    if (!(xi1 >= 0.0 && xi1 <= 1.0)) throw config_error("reward config: xi1 must lie in [0,1]");
    if (!(xi2 >= 0.0 && xi2 <= 1.0)) throw config_error("reward config: xi2 must lie in [0,1]");
    if (!(r_s >= 0.0 && r_s <= 1.0)) throw config_error("reward config: r_s must lie in [0,1]");
}

nlohmann::json reward_config::to_json() const {
    return nlohmann::json{{"beta", beta}, {"xi1", xi1}, {"xi2", xi2}, {"r_s", r_s}};
}

reward_config reward_config::from_json(const nlohmann::json& j) {
    reward_config cfg;
    const nlohmann::json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw config_error("reward config: unknown key '" + key + "'");
        (void)value;
    }
    try {
        if (j.contains("beta")) {
            if (j.at("beta").size() != cfg.beta.size())
                throw config_error("reward config: beta needs exactly 5 weights");
            for (std::size_t i = 0; i < cfg.beta.size(); ++i) cfg.beta[i] = j.at("beta").at(i).get<double>();
        }
        cfg.xi1 = j.value("xi1", cfg.xi1);
        cfg.xi2 = j.value("xi2", cfg.xi2);
        cfg.r_s = j.value("r_s", cfg.r_s);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("reward config: bad value type: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

double link_reward(const topo::topology_spec& t, int a, int b, const topo::info_matrices& unit,
                   const reward_config& cfg) {
    if (!t.has_link(a, b))
        throw state_error("link reward: no link between nodes " + std::to_string(a) + " and " +
                          std::to_string(b));
    double score = 0.0;
    for (int c = 0; c < topo::metric_channel_count; ++c) {
        const double v = unit.channel[c](static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        if (topo::is_sentinel(v))
            throw missing_data_error("link reward: sentinel metric on link " + std::to_string(a) + "-" +
                                     std::to_string(b));
        score += (c == static_cast<int>(topo::metric_channel::bw_free) ? cfg.beta[c] : -cfg.beta[c]) * v;
    }
    return score;
}

double total_reward(const topo::topology_spec& t, const std::vector<int>& path,
                    const topo::info_matrices& unit, const reward_config& cfg) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) sum += link_reward(t, path[i], path[i + 1], unit, cfg);
    return sum;
}

nlohmann::json episode_trace::to_json() const {
    return nlohmann::json{
        {"src", src}, {"dst", dst}, {"actions", actions}, {"rewards", rewards}, {"final_path", final_path}};
}

routing_env::routing_env(const topo::topology_spec& t, reward_config cfg)
    : topo_(t), cfg_(cfg), n_(t.node_count()) {
    cfg_.validate();
}

void routing_env::reset(int src, int dst, const topo::info_matrices& reward_basis,
                        const topo::info_matrices& observed) {
    if (src == dst) throw config_error("routing episode: source equals destination");
    if (src < 0 || dst < 0 || src >= static_cast<int>(n_) || dst >= static_cast<int>(n_))
        throw config_error("routing episode: endpoint outside the topology");
    if (reward_basis.node_count() != n_ || observed.node_count() != n_)
        throw dimension_error("routing episode: snapshot size does not match the topology");
    basis_ = reward_basis;
    observed_ = observed;
    src_ = src;
    dst_ = dst;
    current_ = src;
    path_ = {src};
    steps_ = 0;
    active_ = true;
    trace_ = episode_trace{};
    trace_.src = src;
    trace_.dst = dst;
}

void routing_env::reset(int src, int dst, const topo::info_matrices& snapshot) {
    reset(src, dst, snapshot, snapshot);
}

step_result routing_env::step(int action) {
    if (!active_) throw state_error("routing episode: step after the episode ended");
    if (action < 0 || action >= static_cast<int>(n_))
        throw config_error("routing episode: action outside the node range");

    ++steps_;
    step_result res;
    if (!topo_.has_link(current_, action)) {
        res.reward = cfg_.invalid_penalty(); // position unchanged
    } else if (std::find(path_.begin(), path_.end(), action) != path_.end()) {
        // revisit: stand on the revisited node and drop the cycle from the path
        while (path_.back() != action) path_.pop_back();
        current_ = action;
        res.reward = cfg_.loop_penalty();
    } else {
        res.reward = link_reward(topo_, current_, action, basis_, cfg_);
        path_.push_back(action);
        current_ = action;
        if (action == dst_) {
            res.arrived = true;
            res.reward += cfg_.r_s; // arrival bonus on top of the final hop score
        }
    }

    if (res.arrived) {
        res.done = true;
    } else if (steps_ >= step_cap()) {
        res.done = true;
        res.truncated = true;
    }
    if (res.done) active_ = false;

    trace_.actions.push_back(action);
    trace_.rewards.push_back(res.reward);
    trace_.final_path = path_;
    return res;
}

std::vector<num::matrix> routing_env::state_channels() const {
    if (src_ < 0) throw state_error("routing episode: state requested before reset");
    std::vector<num::matrix> ch;
    ch.reserve(state_channel_count);

    num::matrix pos(n_, n_, 0.0);
    for (int v : path_) pos(static_cast<std::size_t>(v), static_cast<std::size_t>(v)) = marker_visited;
    pos(static_cast<std::size_t>(current_), static_cast<std::size_t>(current_)) = marker_current;
    pos(static_cast<std::size_t>(dst_), static_cast<std::size_t>(dst_)) = marker_destination;
    ch.push_back(std::move(pos));

    for (int c = 0; c < topo::metric_channel_count; ++c) {
        num::matrix m = observed_.channel[c];
        for (std::size_t i = 0; i < m.size(); ++i)
            if (topo::is_sentinel(m.data()[i])) m.data()[i] = 0.0;
        ch.push_back(std::move(m));
    }
    return ch;
}

std::vector<double> routing_env::observation() const {
    std::vector<num::matrix> ch = state_channels();
    std::vector<double> flat;
    flat.reserve(observation_size());
    for (const auto& m : ch) flat.insert(flat.end(), m.data(), m.data() + m.size());
    return flat;
}

} // namespace sdwnlab::routing
