#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/numcore/layers.hpp"
#include "sdwnlab/numcore/optim.hpp"
#include "sdwnlab/predictor/predictor.hpp"
#include "sdwnlab/routing/env.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

namespace sdwnlab::routing {

struct ppo_config {
    double alpha1 = 1e-3;               // actor step size
    double alpha2 = 3e-3;               // critic step size
    std::size_t batch_size = 32;        // minibatch rows per optimizer step (k)
    double clip_epsilon = 0.2;          // ratio band half-width
    std::size_t update_count = 10;      // passes over the buffer per update round (f)
    std::size_t buffer_capacity = 3000; // rollout entries kept at most (B)
    double reward_discount = 0.99;      // gamma
    std::size_t episodes = 1000;        // training episodes (M)
    double kl_sigma = 0.5;              // KL-variant regularizer weight
    std::size_t n_step = 8;             // critic-target lookahead
    std::string objective_variant = "clip"; // "clip" | "kl"
    std::size_t snapshot_start = 8;     // first series index episodes may use
    std::size_t hidden_width = 128;     // actor/critic hidden layer width
    bool normalize_advantage = true;    // standardize advantages per update round

    void validate() const;
    nlohmann::json to_json() const;
    static ppo_config from_json(const nlohmann::json& j); // rejects unknown keys
};

// fixed by design: the paper mandates gradient clipping without a norm
inline constexpr double gradient_clip_norm = 0.5;

// Policy and value heads over the flattened routing state: two tanh hidden
// layers each, logits out for the actor, a scalar out for the critic.
class actor_critic {
public:
    actor_critic(std::size_t obs_dim, std::size_t action_count, std::size_t hidden_width,
                 std::uint64_t init_seed);

    num::matrix actor_forward(const num::matrix& obs);  // rows -> logit rows
    num::matrix critic_forward(const num::matrix& obs); // rows -> value column
    void actor_backward(const num::matrix& grad_logits);
    void critic_backward(const num::matrix& grad_value);
    void zero_grads();
    void clear_caches();

    std::vector<num::param_view> actor_views();
    std::vector<num::param_view> critic_views();
    std::vector<num::param_view> all_views();

    std::size_t obs_dim() const { return obs_dim_; }
    std::size_t action_count() const { return action_count_; }

private:
    std::size_t obs_dim_, action_count_;
    rng init_rng_; // declared before the nets: weight-init order is part of the contract
    num::mlp actor_, critic_;
};

// row-wise softmax of logit rows; every output row sums to 1 with positive entries
num::matrix policy_probs(const num::matrix& logits);

// probability-ratio weight of an off-policy sample; p_old must be positive
double importance_ratio(double p_new, double p_old);

// one-step bootstrapped advantage: r + gamma * v_next - v_now
double advantage(double r, double v_next, double v_now, double gamma);

// per-step advantages for a whole episode; tail_value bootstraps past the last
// step (0 when the episode terminated at the destination)
std::vector<double> td_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                                  double tail_value, double gamma);

// returns[t] = discounted reward sum over up to n steps plus a bootstrap from
// the first state beyond the window (tail_value past the episode end)
std::vector<double> n_step_returns(const std::vector<double>& rewards, const std::vector<double>& values,
                                   double tail_value, double gamma, std::size_t n);

// pessimistic clipped surrogate: min(eta * adv, clamp(eta, 1-eps, 1+eps) * adv)
double clipped_objective(double eta, double adv, double eps);

// ratio-weighted advantage with a KL penalty toward the old distribution:
// eta * adv - sigma * KL(old || new); zero new-probability in old support throws
double kl_objective(double eta, double adv, double sigma, const std::vector<double>& new_dist,
                    const std::vector<double>& old_dist);

struct rollout_entry {
    std::vector<double> obs;
    int action = 0;
    double p_old = 0.0;           // probability of the action when collected
    std::vector<double> old_dist; // full distribution when collected (KL variant)
    double advantage = 0.0;
    double ret = 0.0;             // n-step critic target
};

// Mean negative surrogate over the indexed rows under the configured variant;
// fills actor gradients when asked (forward-only otherwise). Advantages are
// passed separately (aligned with `buffer`) so normalization stays the
// caller's choice.
double actor_surrogate_loss(actor_critic& model, const std::vector<rollout_entry>& buffer,
                            const std::vector<std::size_t>& idx, const std::vector<double>& advantages,
                            const ppo_config& cfg, bool fill_grads);

// Mean squared (return - value) over the indexed rows; fills critic gradients
// when asked.
double critic_value_loss(actor_critic& model, const std::vector<rollout_entry>& buffer,
                         const std::vector<std::size_t>& idx, bool fill_grads);

struct update_stats {
    std::vector<double> actor_loss;  // one entry per pass
    std::vector<double> critic_loss;
};

// Owns the rollout buffer and both optimizers; one update round runs
// update_count shuffled passes of batch_size minibatches and then discards the
// buffer (each sample is used in exactly one round).
class ppo_trainer {
public:
    ppo_trainer(actor_critic& model, const ppo_config& cfg);

    void push(rollout_entry e); // oldest entries fall out past buffer_capacity
    std::size_t buffered() const { return buffer_.size(); }
    bool ready(bool episode_end) const;

    update_stats update(rng& shuffle_rng); // throws numeric_error naming the pass

private:
    actor_critic& model_;
    ppo_config cfg_;
    num::adam opt_actor_, opt_critic_;
    std::vector<rollout_entry> buffer_;
};

struct train_result {
    std::vector<double> episode_reward;
    std::vector<std::size_t> episode_steps;
    std::size_t best_episode = 0; // last episode of the best moving-average window
    double best_ma = 0.0;
    double final_ma = 0.0;
    std::size_t arrivals = 0; // episodes that reached their destination
};

// Trains over random endpoint pairs and rotating snapshots. Observations come
// from the forecast of the scored snapshot when a predictor is given, otherwise
// from the previous (stale) snapshot; rewards always score the current one.
// Writes the best-moving-average checkpoint. Deterministic per (inputs, seed).
train_result train_agent(const topo::topology_spec& t, const traffic::traffic_series& series,
                         pred::predictor_oracle* forecast, const ppo_config& pcfg,
                         const reward_config& rcfg, std::uint64_t seed,
                         const std::filesystem::path& checkpoint_path);

struct route_result {
    bool reached = false;
    std::vector<int> path;
    double reward_sum = 0.0; // episode reward including penalties and the bonus
    std::size_t steps = 0;
};

// Greedy (argmax) rollout of the trained policy; no-path when the cap is hit.
route_result select_path(actor_critic& model, const topo::topology_spec& t, const reward_config& rcfg,
                         int src, int dst, const topo::info_matrices& reward_basis,
                         const topo::info_matrices& observed);

struct loaded_agent {
    ppo_config ppo;
    reward_config reward;
    std::uint64_t seed = 0;
    std::unique_ptr<actor_critic> model;
};

void save_agent(actor_critic& model, const ppo_config& pcfg, const reward_config& rcfg,
                const topo::topology_spec& t, std::uint64_t seed, const std::filesystem::path& p);
loaded_agent load_agent(const std::filesystem::path& p, const topo::topology_spec& t);

} // namespace sdwnlab::routing
