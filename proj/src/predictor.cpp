#include "sdwnlab/predictor/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/numcore/optim.hpp"

namespace sdwnlab::pred {

num::matrix normalize_adjacency(const topo::topology_spec& t) {
    const std::size_t n = t.node_count();
    num::matrix a(n, n, 0.0);
    for (const auto& l : t.links) {
        a(l.a, l.b) = 1.0;
        a(l.b, l.a) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0; // self-loops
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
    return a;
}

void predictor_config::validate() const {
    if (window < 1) throw config_error("predictor: window must be >= 1");
    if (horizon < 1) throw config_error("predictor: horizon must be >= 1");
    if (hidden_dim < 1) throw config_error("predictor: hidden_dim must be >= 1");
    if (episodes < 1) throw config_error("predictor: episodes must be >= 1");
    if (batch_size < 1) throw config_error("predictor: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw config_error("predictor: learning_rate must be > 0");
    if (weight_decay < 0.0) throw config_error("predictor: weight_decay must be >= 0");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw config_error("predictor: train_fraction must be in (0,1)");
}

nlohmann::json predictor_config::to_json() const {
    return nlohmann::json{{"window", window},
                          {"horizon", horizon},
                          {"hidden_dim", hidden_dim},
                          {"episodes", episodes},
                          {"batch_size", batch_size},
                          {"learning_rate", learning_rate},
                          {"weight_decay", weight_decay},
                          {"train_fraction", train_fraction}};
}

predictor_config predictor_config::from_json(const nlohmann::json& j) {
    predictor_config cfg;
    const nlohmann::json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw config_error("predictor config: unknown key '" + key + "'");
        (void)value;
    }
    try {
        cfg.window = j.value("window", cfg.window);
        cfg.horizon = j.value("horizon", cfg.horizon);
        cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
        cfg.episodes = j.value("episodes", cfg.episodes);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
        cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("predictor config: bad value type: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

double channel_stats::to_unit(int channel, double raw) const {
    return (raw - mn[channel]) / (mx[channel] - mn[channel] + 1e-6);
}

nlohmann::json channel_stats::to_json() const { return nlohmann::json{{"min", mn}, {"max", mx}}; }

channel_stats channel_stats::from_json(const nlohmann::json& j) {
    channel_stats s;
    try {
        auto mn = j.at("min"), mx = j.at("max");
        for (int c = 0; c < topo::metric_channel_count; ++c) {
            s.mn[c] = mn.at(c).get<double>();
            s.mx[c] = mx.at(c).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("channel stats: " + std::string(e.what()));
    }
    return s;
}

num::matrix snapshot_features(const topo::topology_spec& t, const topo::link_snapshot& snap,
                              const channel_stats& stats) {
    const std::size_t n = t.node_count();
    const topo::info_matrices raw = topo::to_info_matrices(t, snap);
    num::matrix f(n, n * topo::metric_channel_count, 0.0);
    for (int c = 0; c < topo::metric_channel_count; ++c) {
        const num::matrix& m = raw.channel[c];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double v = m(i, j);
                if (!topo::is_sentinel(v)) f(i, c * n + j) = std::clamp(stats.to_unit(c, v), 0.0, 1.0);
            }
    }
    return f;
}

std::size_t prediction_dataset::sample_count() const {
    const std::size_t span = window + horizon;
    return features.size() >= span ? features.size() - span + 1 : 0;
}

prediction_dataset build_dataset(const topo::topology_spec& t, const traffic::traffic_series& series,
                                 const predictor_config& cfg) {
    cfg.validate();
    const std::size_t n = t.node_count(), N = series.snapshots.size();
    if (N < cfg.window + cfg.horizon + 1)
        throw config_error("predictor: series too short for the window and horizon");

    prediction_dataset ds;
    ds.window = cfg.window;
    ds.horizon = cfg.horizon;
    ds.first_holdout_target = static_cast<std::size_t>(static_cast<double>(N) * cfg.train_fraction);
    if (ds.first_holdout_target < cfg.window + cfg.horizon)
        throw config_error("predictor: train split has no samples; lengthen the series");
    if (ds.first_holdout_target >= N)
        throw config_error("predictor: holdout split has no samples; lengthen the series");

    // channel scaling fitted strictly on the training region
    for (int c = 0; c < topo::metric_channel_count; ++c) {
        ds.stats.mn[c] = std::numeric_limits<double>::infinity();
        ds.stats.mx[c] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t k = 0; k < ds.first_holdout_target; ++k) {
        const topo::info_matrices raw = topo::to_info_matrices(t, series.snapshots[k]);
        for (int c = 0; c < topo::metric_channel_count; ++c)
            for (std::size_t i = 0; i < raw.channel[c].size(); ++i) {
                const double v = raw.channel[c].data()[i];
                if (topo::is_sentinel(v)) continue;
                ds.stats.mn[c] = std::min(ds.stats.mn[c], v);
                ds.stats.mx[c] = std::max(ds.stats.mx[c], v);
            }
    }

    ds.features.reserve(N);
    for (const auto& snap : series.snapshots) ds.features.push_back(snapshot_features(t, snap, ds.stats));

    ds.link_mask = num::matrix(n, n * topo::metric_channel_count, 0.0);
    for (const auto& l : t.links)
        for (int c = 0; c < topo::metric_channel_count; ++c) {
            ds.link_mask(l.a, c * n + l.b) = 1.0;
            ds.link_mask(l.b, c * n + l.a) = 1.0;
        }
    return ds;
}

gcn_gru_model::gcn_gru_model(std::size_t node_count, std::size_t hidden_dim, std::uint64_t init_seed)
    : node_count_(node_count), init_rng_(init_seed),
      gcn_(node_count * topo::metric_channel_count, hidden_dim, num::activation::relu, init_rng_),
      gru_(hidden_dim, hidden_dim, init_rng_),
      head_(hidden_dim, node_count * topo::metric_channel_count, num::activation::identity, init_rng_) {}

num::matrix gcn_gru_model::forward(const std::vector<const num::matrix*>& window, const num::matrix& norm_adj) {
    if (window.empty()) throw dimension_error("gcn_gru forward: empty window");
    num::matrix h(node_count_, gru_.hidden_dim(), 0.0);
    for (const num::matrix* frame : window) {
        num::matrix g = gcn_.forward(*frame, norm_adj);
        h = gru_.forward(g, h);
    }
    last_window_len_ = window.size();
    return head_.forward(h);
}

void gcn_gru_model::backward(const num::matrix& grad_pred) {
    if (last_window_len_ == 0) throw state_error("gcn_gru backward without forward");
    num::matrix gh = head_.backward(grad_pred);
    for (std::size_t t = 0; t < last_window_len_; ++t) {
        auto [gx, gh_prev] = gru_.backward(gh);
        gcn_.backward(gx);
        gh = std::move(gh_prev);
    }
    last_window_len_ = 0;
}

void gcn_gru_model::zero_grads() {
    gcn_.zero_grads();
    gru_.zero_grads();
    head_.zero_grads();
}

void gcn_gru_model::clear_cache() {
    gcn_.clear_cache();
    gru_.clear_cache();
    head_.clear_cache();
    last_window_len_ = 0;
}

std::vector<num::param_view> gcn_gru_model::param_views() {
    std::vector<num::param_view> views;
    gcn_.collect_params("gcn.", views);
    gru_.collect_params("gru.", views);
    head_.collect_params("head.", views);
    return views;
}

double masked_mse(const num::matrix& pred, const num::matrix& target, const num::matrix& mask) {
    if (!pred.same_shape(target) || !pred.same_shape(mask))
        throw dimension_error("masked_mse: shape mismatch");
    double acc = 0.0, cnt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (mask.data()[i] == 0.0) continue;
        const double d = pred.data()[i] - target.data()[i];
        acc += d * d;
        cnt += 1.0;
    }
    if (cnt == 0.0) throw missing_data_error("masked_mse: empty mask");
    return acc / cnt;
}

num::matrix masked_mse_grad(const num::matrix& pred, const num::matrix& target, const num::matrix& mask) {
    if (!pred.same_shape(target) || !pred.same_shape(mask))
        throw dimension_error("masked_mse_grad: shape mismatch");
    num::matrix g(pred.rows(), pred.cols(), 0.0);
    double cnt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (mask.data()[i] != 0.0) cnt += 1.0;
    if (cnt == 0.0) throw missing_data_error("masked_mse_grad: empty mask");
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (mask.data()[i] != 0.0) g.data()[i] = 2.0 * (pred.data()[i] - target.data()[i]) / cnt;
    return g;
}

train_report train_predictor(const topo::topology_spec& t, const traffic::traffic_series& series,
                             const predictor_config& cfg, std::uint64_t seed,
                             const std::filesystem::path& checkpoint_path) {
    cfg.validate();
    if (series.topology_hash != t.content_hash())
        throw format_error("train_predictor: series was generated for a different topology");

    const prediction_dataset ds = build_dataset(t, series, cfg);
    const num::matrix norm_adj = normalize_adjacency(t);

    gcn_gru_model model(t.node_count(), cfg.hidden_dim, derive_seed(seed, "predictor-init"));
    std::vector<num::param_view> views = model.param_views();

    std::vector<std::size_t> train_ids;
    for (std::size_t s = 0; s < ds.sample_count(); ++s)
        if (!ds.is_holdout(s)) train_ids.push_back(s);
    if (train_ids.empty()) throw config_error("train_predictor: no training samples");

    // Start from climatology: the head bias takes the masked per-column mean of
    // the training targets, so episode 0 already predicts the average network
    // state and gradient steps go into dynamics rather than offsets.
    {
        const std::size_t cols = ds.link_mask.cols();
        std::vector<double> col_sum(cols, 0.0), col_cnt(cols, 0.0);
        for (std::size_t s : train_ids) {
            const num::matrix& tgt = ds.features[ds.target_of(s)];
            for (std::size_t i = 0; i < tgt.rows(); ++i)
                for (std::size_t c = 0; c < cols; ++c)
                    if (ds.link_mask(i, c) != 0.0) {
                        col_sum[c] += tgt(i, c);
                        col_cnt[c] += 1.0;
                    }
        }
        for (std::size_t c = 0; c < cols; ++c)
            if (col_cnt[c] > 0.0) model.head().b.value(0, c) = col_sum[c] / col_cnt[c];
    }

    num::adam opt(cfg.learning_rate);
    opt.attach(views);

    auto window_of = [&](std::size_t s) {
        std::vector<const num::matrix*> w;
        for (std::size_t k = s; k < s + ds.window; ++k) w.push_back(&ds.features[k]);
        return w;
    };

    auto reg_term = [&] {
        double sq = 0.0;
        for (const auto& pv : views)
            for (std::size_t i = 0; i < pv.count(); ++i) sq += pv.value[i] * pv.value[i];
        return 0.5 * cfg.weight_decay * sq;
    };

    train_report report;
    for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
        rng shuffle_rng(derive_seed(seed, "predictor-episode-" + std::to_string(episode)));
        std::vector<std::size_t> order = train_ids;
        shuffle_rng.shuffle(order);

        double episode_mse = 0.0;
        try {
            for (std::size_t pos = 0; pos < order.size();) {
                const std::size_t batch_n = std::min(cfg.batch_size, order.size() - pos);
                model.zero_grads();
                for (std::size_t b = 0; b < batch_n; ++b) {
                    const std::size_t s = order[pos + b];
                    const num::matrix pred = model.forward(window_of(s), norm_adj);
                    const num::matrix& target = ds.features[ds.target_of(s)];
                    episode_mse += masked_mse(pred, target, ds.link_mask);
                    num::matrix g = masked_mse_grad(pred, target, ds.link_mask);
                    g *= 1.0 / static_cast<double>(batch_n);
                    model.backward(g);
                }
                if (cfg.weight_decay > 0.0)
                    for (auto& pv : views)
                        for (std::size_t i = 0; i < pv.count(); ++i)
                            pv.grad[i] += cfg.weight_decay * pv.value[i];
                opt.step();
                pos += batch_n;
            }
        } catch (const numeric_error& e) {
            throw numeric_error(std::string(e.what()) + " (episode " + std::to_string(episode) + ")");
        }
        const double loss = episode_mse / static_cast<double>(order.size()) + reg_term();
        if (!std::isfinite(loss))
            throw numeric_error("train_predictor: loss diverged at episode " + std::to_string(episode));
        report.episode_loss.push_back(loss);
    }

    // chronological holdout: model vs copy-last-frame persistence
    double model_acc = 0.0, pers_acc = 0.0;
    std::size_t holdout_n = 0;
    for (std::size_t s = 0; s < ds.sample_count(); ++s) {
        if (!ds.is_holdout(s)) continue;
        const num::matrix pred = model.forward(window_of(s), norm_adj);
        model.clear_cache();
        const num::matrix& target = ds.features[ds.target_of(s)];
        model_acc += masked_mse(pred, target, ds.link_mask);
        pers_acc += masked_mse(ds.features[s + ds.window - 1], target, ds.link_mask);
        ++holdout_n;
    }
    report.holdout_samples = holdout_n;
    report.holdout_mse = model_acc / static_cast<double>(holdout_n);
    report.persistence_mse = pers_acc / static_cast<double>(holdout_n);

    nlohmann::json ck_config;
    ck_config["config"] = cfg.to_json();
    ck_config["stats"] = ds.stats.to_json();
    ck_config["topology_hash"] = t.content_hash();
    ck_config["node_count"] = t.node_count();
    num::checkpoint::from_views("predictor", seed, ck_config, views).save(checkpoint_path);
    return report;
}

predictor_oracle::predictor_oracle(const topo::topology_spec& t, const std::filesystem::path& checkpoint_path)
    : topo_(t), norm_adj_(normalize_adjacency(t)) {
    const num::checkpoint ck = num::checkpoint::load(checkpoint_path);
    if (ck.kind != "predictor") throw format_error("predictor checkpoint: wrong kind '" + ck.kind + "'");
    try {
        cfg_ = predictor_config::from_json(ck.config.at("config"));
        stats_ = channel_stats::from_json(ck.config.at("stats"));
        if (ck.config.at("node_count").get<std::size_t>() != t.node_count())
            throw format_error("predictor checkpoint: node count does not match topology");
        if (ck.config.at("topology_hash").get<std::string>() != t.content_hash())
            throw format_error("predictor checkpoint: topology hash mismatch");
    } catch (const nlohmann::json::exception& e) {
        throw format_error("predictor checkpoint: missing metadata: " + std::string(e.what()));
    }
    model_ = std::make_unique<gcn_gru_model>(t.node_count(), cfg_.hidden_dim, ck.seed);
    std::vector<num::param_view> views = model_->param_views();
    ck.restore_into(views);
}

topo::info_matrices predictor_oracle::predict(const traffic::traffic_series& series, std::size_t target_idx) {
    if (series.topology_hash != topo_.content_hash())
        throw format_error("predict: series was generated for a different topology");
    const std::size_t lead = cfg_.window + cfg_.horizon - 1;
    if (target_idx < lead || target_idx > series.snapshots.size())
        throw missing_data_error("predict: target index outside the forecastable range");

    std::vector<num::matrix> frames;
    std::vector<const num::matrix*> window;
    frames.reserve(cfg_.window);
    const std::size_t first = target_idx - lead;
    for (std::size_t k = first; k < first + cfg_.window; ++k)
        frames.push_back(snapshot_features(topo_, series.snapshots[k], stats_));
    for (const auto& f : frames) window.push_back(&f);

    num::matrix pred = model_->forward(window, norm_adj_);
    model_->clear_cache();

    const std::size_t n = topo_.node_count();
    topo::info_matrices out;
    for (auto& m : out.channel) m = num::matrix(n, n, topo::sentinel());
    for (const auto& l : topo_.links)
        for (int c = 0; c < topo::metric_channel_count; ++c) {
            const double u1 = std::clamp(pred(l.a, c * n + l.b), 0.0, 1.0);
            const double u2 = std::clamp(pred(l.b, c * n + l.a), 0.0, 1.0);
            const double v = (u1 + u2) / 2.0; // symmetrize the two node views
            out.channel[c](l.a, l.b) = v;
            out.channel[c](l.b, l.a) = v;
        }
    return out;
}

} // namespace sdwnlab::pred
