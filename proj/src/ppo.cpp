#include "sdwnlab/routing/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/numcore/checkpoint.hpp"

namespace sdwnlab::routing {

void ppo_config::validate() const {
    if (!(alpha1 > 0.0)) throw config_error("ppo: alpha1 must be > 0");
    if (!(alpha2 > 0.0)) throw config_error("ppo: alpha2 must be > 0");
    if (batch_size < 1) throw config_error("ppo: batch_size must be >= 1");
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw config_error("ppo: clip_epsilon must lie in (0,1)");
    if (update_count < 1) throw config_error("ppo: update_count must be >= 1");
    if (buffer_capacity < batch_size) throw config_error("ppo: buffer_capacity must hold one batch");
    if (!(reward_discount > 0.0 && reward_discount <= 1.0))
        throw config_error("ppo: reward_discount must lie in (0,1]");
    if (episodes < 1) throw config_error("ppo: episodes must be >= 1");
    if (kl_sigma < 0.0) throw config_error("ppo: kl_sigma must be >= 0");
    if (n_step < 1) throw config_error("ppo: n_step must be >= 1");
    if (objective_variant != "clip" && objective_variant != "kl")
        throw config_error("ppo: objective_variant must be 'clip' or 'kl'");
    if (snapshot_start < 1) throw config_error("ppo: snapshot_start must be >= 1");
    if (hidden_width < 1) throw config_error("ppo: hidden_width must be >= 1");
}

nlohmann::json ppo_config::to_json() const {
    return nlohmann::json{{"alpha1", alpha1},
                          {"alpha2", alpha2},
                          {"batch_size", batch_size},
                          {"clip_epsilon", clip_epsilon},
                          {"update_count", update_count},
                          {"buffer_capacity", buffer_capacity},
                          {"reward_discount", reward_discount},
                          {"episodes", episodes},
                          {"kl_sigma", kl_sigma},
                          {"n_step", n_step},
                          {"objective_variant", objective_variant},
                          {"snapshot_start", snapshot_start},
                          {"hidden_width", hidden_width},
                          {"normalize_advantage", normalize_advantage}};
}

ppo_config ppo_config::from_json(const nlohmann::json& j) {
    ppo_config cfg;
    const nlohmann::json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw config_error("ppo config: unknown key '" + key + "'");
        (void)value;
    }
    try {
        cfg.alpha1 = j.value("alpha1", cfg.alpha1);
        cfg.alpha2 = j.value("alpha2", cfg.alpha2);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.clip_epsilon = j.value("clip_epsilon", cfg.clip_epsilon);
        cfg.update_count = j.value("update_count", cfg.update_count);
        cfg.buffer_capacity = j.value("buffer_capacity", cfg.buffer_capacity);
        cfg.reward_discount = j.value("reward_discount", cfg.reward_discount);
        cfg.episodes = j.value("episodes", cfg.episodes);
        cfg.kl_sigma = j.value("kl_sigma", cfg.kl_sigma);
        cfg.n_step = j.value("n_step", cfg.n_step);
        cfg.objective_variant = j.value("objective_variant", cfg.objective_variant);
        cfg.snapshot_start = j.value("snapshot_start", cfg.snapshot_start);
        cfg.hidden_width = j.value("hidden_width", cfg.hidden_width);
        cfg.normalize_advantage = j.value("normalize_advantage", cfg.normalize_advantage);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("ppo config: bad value type: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

actor_critic::actor_critic(std::size_t obs_dim, std::size_t action_count, std::size_t hidden_width,
                           std::uint64_t init_seed)
    : obs_dim_(obs_dim), action_count_(action_count), init_rng_(init_seed),
      actor_({obs_dim, hidden_width, hidden_width, action_count}, num::activation::tanh_fn,
             num::activation::identity, init_rng_),
      critic_({obs_dim, hidden_width, hidden_width, 1}, num::activation::tanh_fn, num::activation::identity,
              init_rng_) {}

num::matrix actor_critic::actor_forward(const num::matrix& obs) { return actor_.forward(obs); }
num::matrix actor_critic::critic_forward(const num::matrix& obs) { return critic_.forward(obs); }
void actor_critic::actor_backward(const num::matrix& g) { actor_.backward(g); }
void actor_critic::critic_backward(const num::matrix& g) { critic_.backward(g); }

void actor_critic::zero_grads() {
    actor_.zero_grads();
    critic_.zero_grads();
}

void actor_critic::clear_caches() {
    actor_.clear_cache();
    critic_.clear_cache();
}

std::vector<num::param_view> actor_critic::actor_views() {
    std::vector<num::param_view> v;
    actor_.collect_params("actor.", v);
    return v;
}

std::vector<num::param_view> actor_critic::critic_views() {
    std::vector<num::param_view> v;
    critic_.collect_params("critic.", v);
    return v;
}

std::vector<num::param_view> actor_critic::all_views() {
    std::vector<num::param_view> v = actor_views();
    for (auto& pv : critic_views()) v.push_back(pv);
    return v;
}

num::matrix policy_probs(const num::matrix& logits) {
    num::matrix probs(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        std::vector<double> row(logits.row(r), logits.row(r) + logits.cols());
        std::vector<double> p = num::softmax(row);
        std::copy(p.begin(), p.end(), probs.row(r));
    }
    return probs;
}

double importance_ratio(double p_new, double p_old) {
    if (!(p_old > 0.0)) throw numeric_error("importance ratio: old action probability must be positive");
    return p_new / p_old;
}

double advantage(double r, double v_next, double v_now, double gamma) {
    return r + gamma * v_next - v_now;
}

std::vector<double> td_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                                  double tail_value, double gamma) {
    if (rewards.size() != values.size()) throw dimension_error("td advantages: reward/value length mismatch");
    const std::size_t T = rewards.size();
    std::vector<double> adv(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double v_next = t + 1 < T ? values[t + 1] : tail_value;
        adv[t] = advantage(rewards[t], v_next, values[t], gamma);
    }
    return adv;
}

std::vector<double> n_step_returns(const std::vector<double>& rewards, const std::vector<double>& values,
                                   double tail_value, double gamma, std::size_t n) {
    if (rewards.size() != values.size()) throw dimension_error("n-step returns: reward/value length mismatch");
    if (n < 1) throw config_error("n-step returns: n must be >= 1");
    const std::size_t T = rewards.size();
    std::vector<double> ret(T);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t h = std::min(t + n, T);
        double acc = 0.0, disc = 1.0;
        for (std::size_t u = t; u < h; ++u) {
            acc += disc * rewards[u];
            disc *= gamma;
        }
        acc += disc * (h < T ? values[h] : tail_value);
        ret[t] = acc;
    }
    return ret;
}

double clipped_objective(double eta, double adv, double eps) {
    const double clamped = std::clamp(eta, 1.0 - eps, 1.0 + eps);
    return std::min(eta * adv, clamped * adv);
}

double kl_objective(double eta, double adv, double sigma, const std::vector<double>& new_dist,
                    const std::vector<double>& old_dist) {
    if (new_dist.size() != old_dist.size()) throw dimension_error("kl objective: distribution size mismatch");
    double kl = 0.0;
    for (std::size_t k = 0; k < old_dist.size(); ++k) {
        if (old_dist[k] == 0.0) continue;
        if (!(new_dist[k] > 0.0))
            throw numeric_error("kl objective: zero new probability inside the old support");
        kl += old_dist[k] * std::log(old_dist[k] / new_dist[k]);
    }
    return eta * adv - sigma * kl;
}

double actor_surrogate_loss(actor_critic& model, const std::vector<rollout_entry>& buffer,
                            const std::vector<std::size_t>& idx, const std::vector<double>& advantages,
                            const ppo_config& cfg, bool fill_grads) {
    if (idx.empty()) throw state_error("actor loss: empty minibatch");
    const std::size_t m = idx.size();
    const bool use_kl = cfg.objective_variant == "kl";

    num::matrix obs(m, model.obs_dim());
    for (std::size_t r = 0; r < m; ++r) {
        const auto& e = buffer[idx[r]];
        if (e.obs.size() != model.obs_dim()) throw dimension_error("actor loss: observation size mismatch");
        std::copy(e.obs.begin(), e.obs.end(), obs.row(r));
    }

    const num::matrix logits = model.actor_forward(obs);
    const num::matrix probs = policy_probs(logits);

    double obj_sum = 0.0;
    num::matrix grad_probs(m, probs.cols(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto& e = buffer[idx[r]];
        const double adv = advantages[idx[r]];
        const double p_new = probs(r, static_cast<std::size_t>(e.action));
        const double eta = importance_ratio(p_new, e.p_old);
        if (use_kl) {
            std::vector<double> new_dist(probs.row(r), probs.row(r) + probs.cols());
            obj_sum += kl_objective(eta, adv, cfg.kl_sigma, new_dist, e.old_dist);
            for (std::size_t k = 0; k < new_dist.size(); ++k)
                if (e.old_dist[k] > 0.0) grad_probs(r, k) += cfg.kl_sigma * e.old_dist[k] / new_dist[k];
            grad_probs(r, static_cast<std::size_t>(e.action)) += adv / e.p_old;
        } else {
            obj_sum += clipped_objective(eta, adv, cfg.clip_epsilon);
            // gradient flows only while the unclipped term is the active branch
            const double clamped = std::clamp(eta, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
            if (eta * adv <= clamped * adv)
                grad_probs(r, static_cast<std::size_t>(e.action)) = adv / e.p_old;
        }
    }
    const double loss = -obj_sum / static_cast<double>(m);

    if (!fill_grads) {
        model.clear_caches();
        return loss;
    }

    // chain through the softmax, scaled by the -1/m of the mean negation
    num::matrix grad_logits(m, probs.cols());
    for (std::size_t r = 0; r < m; ++r) {
        double inner = 0.0;
        for (std::size_t k = 0; k < probs.cols(); ++k) inner += grad_probs(r, k) * probs(r, k);
        for (std::size_t j = 0; j < probs.cols(); ++j)
            grad_logits(r, j) = -(probs(r, j) * (grad_probs(r, j) - inner)) / static_cast<double>(m);
    }
    model.actor_backward(grad_logits);
    return loss;
}

double critic_value_loss(actor_critic& model, const std::vector<rollout_entry>& buffer,
                         const std::vector<std::size_t>& idx, bool fill_grads) {
    if (idx.empty()) throw state_error("critic loss: empty minibatch");
    const std::size_t m = idx.size();
    num::matrix obs(m, model.obs_dim());
    for (std::size_t r = 0; r < m; ++r) std::copy(buffer[idx[r]].obs.begin(), buffer[idx[r]].obs.end(), obs.row(r));

    const num::matrix v = model.critic_forward(obs);
    double loss = 0.0;
    num::matrix grad(m, 1);
    for (std::size_t r = 0; r < m; ++r) {
        const double d = buffer[idx[r]].ret - v(r, 0);
        loss += d * d;
        grad(r, 0) = -2.0 * d / static_cast<double>(m);
    }
    loss /= static_cast<double>(m);

    if (!fill_grads) {
        model.clear_caches();
        return loss;
    }
    model.critic_backward(grad);
    return loss;
}

ppo_trainer::ppo_trainer(actor_critic& model, const ppo_config& cfg)
    : model_(model), cfg_(cfg), opt_actor_(cfg.alpha1), opt_critic_(cfg.alpha2) {
    cfg_.validate();
    opt_actor_.attach(model_.actor_views());
    opt_critic_.attach(model_.critic_views());
}

void ppo_trainer::push(rollout_entry e) {
    buffer_.push_back(std::move(e));
    if (buffer_.size() > cfg_.buffer_capacity)
        buffer_.erase(buffer_.begin(), buffer_.begin() + (buffer_.size() - cfg_.buffer_capacity));
}

bool ppo_trainer::ready(bool episode_end) const {
    if (buffer_.size() >= cfg_.batch_size * cfg_.update_count) return true;
    return episode_end && buffer_.size() >= cfg_.batch_size;
}

update_stats ppo_trainer::update(rng& shuffle_rng) {
    if (buffer_.size() < cfg_.batch_size) throw state_error("ppo update: buffer smaller than one batch");

    std::vector<double> adv(buffer_.size());
    for (std::size_t i = 0; i < buffer_.size(); ++i) adv[i] = buffer_[i].advantage;
    if (cfg_.normalize_advantage) {
        const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
        double var = 0.0;
        for (double a : adv) var += (a - mean) * (a - mean);
        const double sd = std::sqrt(var / static_cast<double>(adv.size()));
        for (double& a : adv) {
            a -= mean;
            if (sd > 1e-8) a /= sd;
        }
    }

    std::vector<std::size_t> order(buffer_.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<num::param_view> actor_views = model_.actor_views();
    std::vector<num::param_view> critic_views = model_.critic_views();

    update_stats stats;
    for (std::size_t pass = 0; pass < cfg_.update_count; ++pass) {
        try {
            shuffle_rng.shuffle(order);
            double actor_acc = 0.0, critic_acc = 0.0;
            for (std::size_t pos = 0; pos < order.size(); pos += cfg_.batch_size) {
                const std::size_t take = std::min(cfg_.batch_size, order.size() - pos);
                const std::vector<std::size_t> chunk(order.begin() + pos, order.begin() + pos + take);

                model_.zero_grads();
                actor_acc += actor_surrogate_loss(model_, buffer_, chunk, adv, cfg_, true) *
                             static_cast<double>(take);
                num::clip_gradients(actor_views, gradient_clip_norm);
                opt_actor_.step();

                model_.zero_grads();
                critic_acc += critic_value_loss(model_, buffer_, chunk, true) * static_cast<double>(take);
                num::clip_gradients(critic_views, gradient_clip_norm);
                opt_critic_.step();
            }
            const double n = static_cast<double>(order.size());
            if (!std::isfinite(actor_acc) || !std::isfinite(critic_acc))
                throw numeric_error("ppo update: non-finite loss");
            stats.actor_loss.push_back(actor_acc / n);
            stats.critic_loss.push_back(critic_acc / n);
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " (pass " + std::to_string(pass) + ")");
        }
    }
    buffer_.clear(); // online contract: every sample feeds exactly one round
    return stats;
}

namespace {

int sample_action(const num::matrix& probs_row, rng& r) {
    const double u = r.uniform();
    double cum = 0.0;
    for (std::size_t k = 0; k < probs_row.cols(); ++k) {
        cum += probs_row(0, k);
        if (u < cum) return static_cast<int>(k);
    }
    return static_cast<int>(probs_row.cols() - 1);
}

num::matrix obs_row(const routing_env& env) {
    std::vector<double> flat = env.observation();
    num::matrix m(1, flat.size());
    std::copy(flat.begin(), flat.end(), m.row(0));
    return m;
}

} // namespace

train_result train_agent(const topo::topology_spec& t, const traffic::traffic_series& series,
                         pred::predictor_oracle* forecast, const ppo_config& pcfg,
                         const reward_config& rcfg, std::uint64_t seed,
                         const std::filesystem::path& checkpoint_path) {
    pcfg.validate();
    rcfg.validate();
    if (series.topology_hash != t.content_hash())
        throw format_error("train agent: series was generated for a different topology");
    const std::size_t N = series.snapshots.size();
    if (pcfg.snapshot_start >= N) throw config_error("train agent: snapshot_start is past the series end");
    if (forecast) {
        const auto& pc = forecast->config();
        if (pcfg.snapshot_start + 1 < pc.window + pc.horizon)
            throw config_error("train agent: snapshot_start leaves no room for the forecast window");
    }

    // unit-scale frames: index i scored against frame i, observed as i-1 or forecast(i)
    const topo::normalization_config norm{};
    std::vector<topo::info_matrices> unit(N);
    for (std::size_t i = pcfg.snapshot_start - 1; i < N; ++i)
        unit[i] = topo::normalize(topo::to_info_matrices(t, series.snapshots[i]), norm);
    std::vector<std::unique_ptr<topo::info_matrices>> forecast_cache(N);

    const std::size_t n = t.node_count();
    actor_critic model(routing::state_channel_count * n * n, n, pcfg.hidden_width,
                       derive_seed(seed, "agent-init"));
    ppo_trainer trainer(model, pcfg);
    routing_env env(t, rcfg);

    rng pair_rng(derive_seed(seed, "agent-pairs"));
    rng action_rng(derive_seed(seed, "agent-actions"));
    rng update_rng(derive_seed(seed, "agent-updates"));

    const std::size_t usable = N - pcfg.snapshot_start;
    const std::size_t ma_window = std::min<std::size_t>(100, pcfg.episodes);

    train_result out;
    out.episode_reward.reserve(pcfg.episodes);
    std::vector<double> best_params;
    double window_sum = 0.0;
    bool have_best = false;

    for (std::size_t episode = 0; episode < pcfg.episodes; ++episode) {
        const std::size_t idx = pcfg.snapshot_start + (episode % usable);
        const topo::info_matrices* observed;
        if (forecast) {
            if (!forecast_cache[idx])
                forecast_cache[idx] =
                    std::make_unique<topo::info_matrices>(forecast->predict(series, idx));
            observed = forecast_cache[idx].get();
        } else {
            observed = &unit[idx - 1];
        }

        const int src = static_cast<int>(pair_rng.uniform_index(n));
        int dst = static_cast<int>(pair_rng.uniform_index(n - 1));
        if (dst >= src) ++dst;
        env.reset(src, dst, unit[idx], *observed);

        std::vector<double> rewards, values;
        std::vector<rollout_entry> steps;
        double ep_reward = 0.0;
        step_result res;
        while (env.active()) {
            num::matrix obs = obs_row(env);
            num::matrix logits = model.actor_forward(obs);
            num::matrix probs = policy_probs(logits);
            num::matrix v = model.critic_forward(obs);
            model.clear_caches();

            const int a = sample_action(probs, action_rng);
            res = env.step(a);

            rollout_entry e;
            e.obs.assign(obs.row(0), obs.row(0) + obs.cols());
            e.action = a;
            e.p_old = probs(0, static_cast<std::size_t>(a));
            e.old_dist.assign(probs.row(0), probs.row(0) + probs.cols());
            steps.push_back(std::move(e));
            rewards.push_back(res.reward);
            values.push_back(v(0, 0));
            ep_reward += res.reward;
        }
        if (!std::isfinite(ep_reward))
            throw numeric_error("train agent: non-finite reward at episode " + std::to_string(episode));

        double tail = 0.0;
        if (res.truncated) {
            num::matrix obs = obs_row(env);
            tail = model.critic_forward(obs)(0, 0);
            model.clear_caches();
        }
        const std::vector<double> advs = td_advantages(rewards, values, tail, pcfg.reward_discount);
        const std::vector<double> rets =
            n_step_returns(rewards, values, tail, pcfg.reward_discount, pcfg.n_step);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            steps[i].advantage = advs[i];
            steps[i].ret = rets[i];
            trainer.push(std::move(steps[i]));
        }

        if (trainer.ready(true)) {
            try {
                trainer.update(update_rng);
            } catch (const numeric_error& e) {
                throw numeric_error(std::string(e.what()) + " (episode " + std::to_string(episode) + ")");
            }
        }

        out.episode_reward.push_back(ep_reward);
        out.episode_steps.push_back(rewards.size());
        if (res.arrived) ++out.arrivals;

        window_sum += ep_reward;
        if (episode + 1 > ma_window) window_sum -= out.episode_reward[episode - ma_window];
        if (episode + 1 >= ma_window) {
            const double ma = window_sum / static_cast<double>(ma_window);
            if (!have_best || ma > out.best_ma) {
                have_best = true;
                out.best_ma = ma;
                out.best_episode = episode;
                auto views = model.all_views();
                best_params = num::pack_values(views);
            }
            out.final_ma = ma;
        }
    }

    if (have_best) {
        auto views = model.all_views();
        num::unpack_values(views, best_params);
    }
    save_agent(model, pcfg, rcfg, t, seed, checkpoint_path);
    return out;
}

route_result select_path(actor_critic& model, const topo::topology_spec& t, const reward_config& rcfg,
                         int src, int dst, const topo::info_matrices& reward_basis,
                         const topo::info_matrices& observed) {
    routing_env env(t, rcfg);
    env.reset(src, dst, reward_basis, observed);
    route_result out;
    step_result res;
    while (env.active()) {
        num::matrix obs = obs_row(env);
        num::matrix logits = model.actor_forward(obs);
        model.clear_caches();
        std::size_t best = 0;
        for (std::size_t k = 1; k < logits.cols(); ++k)
            if (logits(0, k) > logits(0, best)) best = k;
        res = env.step(static_cast<int>(best));
        out.reward_sum += res.reward;
    }
    out.reached = res.arrived;
    out.steps = env.steps_taken();
    if (out.reached) out.path = env.path();
    return out;
}

void save_agent(actor_critic& model, const ppo_config& pcfg, const reward_config& rcfg,
                const topo::topology_spec& t, std::uint64_t seed, const std::filesystem::path& p) {
    nlohmann::json config;
    config["ppo"] = pcfg.to_json();
    config["reward"] = rcfg.to_json();
    config["topology_hash"] = t.content_hash();
    config["obs_dim"] = model.obs_dim();
    config["action_count"] = model.action_count();
    const auto views = model.all_views();
    num::checkpoint::from_views("agent", seed, config, views).save(p);
}

loaded_agent load_agent(const std::filesystem::path& p, const topo::topology_spec& t) {
    const num::checkpoint ck = num::checkpoint::load(p);
    if (ck.kind != "agent") throw format_error("agent checkpoint: wrong kind '" + ck.kind + "'");
    loaded_agent out;
    try {
        out.ppo = ppo_config::from_json(ck.config.at("ppo"));
        out.reward = reward_config::from_json(ck.config.at("reward"));
        if (ck.config.at("topology_hash").get<std::string>() != t.content_hash())
            throw format_error("agent checkpoint: topology hash mismatch");
        const auto obs_dim = ck.config.at("obs_dim").get<std::size_t>();
        const auto actions = ck.config.at("action_count").get<std::size_t>();
        if (obs_dim != routing::state_channel_count * t.node_count() * t.node_count() ||
            actions != t.node_count())
            throw format_error("agent checkpoint: dimensions do not match the topology");
        out.seed = ck.seed;
        out.model = std::make_unique<actor_critic>(obs_dim, actions, out.ppo.hidden_width, ck.seed);
    } catch (const nlohmann::json::exception& e) {
        throw format_error("agent checkpoint: missing metadata: " + std::string(e.what()));
    }
    auto views = out.model->all_views();
    ck.restore_into(views);
    return out;
}

} // namespace sdwnlab::routing
