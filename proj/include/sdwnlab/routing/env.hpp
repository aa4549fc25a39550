#pragma once

#include <vector>

#include <json.hpp>

#include "sdwnlab/numcore/matrix.hpp"
#include "sdwnlab/topology/info_matrix.hpp"
#include "sdwnlab/topology/topology.hpp"

namespace sdwnlab::routing {

// Per-hop scoring weights and the two penalty discounts. With the defaults the
// three action cases pay {weighted link score, -0.5, -0.8} and arrival adds +1.
struct reward_config {
    std::array<double, topo::metric_channel_count> beta = {0.7, 0.3, 0.1, 0.1, 0.1};
    double xi1 = 0.5; // revisit discount
    double xi2 = 0.8; // invalid-pick discount
    double r_s = 1.0; // standard reward unit

    double loop_penalty() const { return -xi1 * r_s; }
    double invalid_penalty() const { return -xi2 * r_s; }

    void validate() const; // every field within [0,1]
    nlohmann::json to_json() const;
    static reward_config from_json(const nlohmann::json& j); // rejects unknown keys
};

// Quality of one hop on unit-scaled metrics: free bandwidth pays, the other four
// channels (delay, error, distance, loss) charge. Throws if the link is absent
// or its metrics are sentinel.
double link_reward(const topo::topology_spec& t, int a, int b, const topo::info_matrices& unit,
                   const reward_config& cfg);

// Sum of link_reward over consecutive pairs; throws on a disconnected pair.
double total_reward(const topo::topology_spec& t, const std::vector<int>& path,
                    const topo::info_matrices& unit, const reward_config& cfg);

inline constexpr int state_channel_count = topo::metric_channel_count + 1; // position first
inline constexpr double marker_current = 0.5;
inline constexpr double marker_destination = 1.0;
inline constexpr double marker_visited = 0.25;

struct step_result {
    double reward = 0.0;
    bool done = false;      // episode over, by arrival or truncation
    bool arrived = false;
    bool truncated = false; // step cap hit before arrival
};

struct episode_trace {
    int src = -1, dst = -1;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<int> final_path; // loop-free walk as of the last step
    nlohmann::json to_json() const;
};

// Single-flow next-hop routing episode. Any node id is a legal action: picking a
// non-neighbor leaves the position unchanged at a fixed penalty, revisiting a
// path node excises the cycle at a smaller penalty, and a fresh neighbor advances
// at the link score. Rewards are scored against `reward_basis`; the agent's
// observation is built from `observed`, which may be a stale or forecast frame.
class routing_env {
public:
    routing_env(const topo::topology_spec& t, reward_config cfg);

    void reset(int src, int dst, const topo::info_matrices& reward_basis,
               const topo::info_matrices& observed);
    void reset(int src, int dst, const topo::info_matrices& snapshot);

    step_result step(int action); // throws state_error once the episode is done

    // position channel (markers on the diagonal) + five metric channels, with
    // sentinels flattened to 0 so the tensor can feed dense layers
    std::vector<num::matrix> state_channels() const;
    std::vector<double> observation() const; // state_channels flattened channel-major

    std::size_t observation_size() const { return state_channel_count * n_ * n_; }
    std::size_t action_count() const { return n_; }
    std::size_t step_cap() const { return 2 * n_; }

    bool active() const { return active_; }
    int current() const { return current_; }
    int source() const { return src_; }
    int destination() const { return dst_; }
    std::size_t steps_taken() const { return steps_; }
    const std::vector<int>& path() const { return path_; }
    const episode_trace& trace() const { return trace_; }

    const topo::topology_spec& topology() const { return topo_; }
    const reward_config& config() const { return cfg_; }
    const topo::info_matrices& reward_basis() const { return basis_; }

private:
    const topo::topology_spec& topo_;
    reward_config cfg_;
    std::size_t n_;
    topo::info_matrices basis_, observed_;
    int src_ = -1, dst_ = -1, current_ = -1;
    std::vector<int> path_;
    std::size_t steps_ = 0;
    bool active_ = false;
    episode_trace trace_;
};

} // namespace sdwnlab::routing
