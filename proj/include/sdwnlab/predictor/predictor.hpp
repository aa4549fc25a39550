#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include <json.hpp>

#include "sdwnlab/numcore/checkpoint.hpp"
#include "sdwnlab/numcore/layers.hpp"
#include "sdwnlab/topology/info_matrix.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

namespace sdwnlab::pred {

// Symmetric degree normalization with self-loops: D^-1/2 (A + I) D^-1/2.
num::matrix normalize_adjacency(const topo::topology_spec& t);

struct predictor_config {
    std::size_t window = 8;      // history snapshots per sample (t)
    std::size_t horizon = 1;     // how many steps ahead the target sits (T)
    std::size_t hidden_dim = 64; // GCN output width and GRU state width
    std::size_t episodes = 60;   // training passes over the train split (M)
    std::size_t batch_size = 32; // samples per optimizer step (K)
    double learning_rate = 3e-3; // Adam step size (alpha)
    double weight_decay = 1e-4;  // L2 regularizer weight (lambda)
    double train_fraction = 0.8; // chronological split point

    void validate() const;
    nlohmann::json to_json() const;
    static predictor_config from_json(const nlohmann::json& j); // rejects unknown keys
};

// Per-channel scaling fitted on the training region only; maps raw metric values
// into the unit range the model works in.
struct channel_stats {
    std::array<double, topo::metric_channel_count> mn{}, mx{};
    double to_unit(int channel, double raw) const;
    nlohmann::json to_json() const;
    static channel_stats from_json(const nlohmann::json& j);
};

// One snapshot flattened for the graph model: row i concatenates node i's rows
// of the five unit-scaled channel matrices (missing links as 0), giving n x 5n.
// Entries are clamped to [0,1] (holdout values can stray past the train range).
num::matrix snapshot_features(const topo::topology_spec& t, const topo::link_snapshot& snap,
                              const channel_stats& stats);

// Series prepared for supervised prediction: sample s maps input frames
// [s, s+window) to the frame at s + window + horizon - 1.
struct prediction_dataset {
    std::vector<num::matrix> features; // one n x 5n frame per snapshot
    num::matrix link_mask;             // n x 5n, 1 where a link entry lives
    channel_stats stats;
    std::size_t window = 0, horizon = 1;
    std::size_t first_holdout_target = 0; // targets at or past this index are held out

    std::size_t target_of(std::size_t sample) const { return sample + window + horizon - 1; }
    std::size_t sample_count() const;
    bool is_holdout(std::size_t sample) const { return target_of(sample) >= first_holdout_target; }
};

prediction_dataset build_dataset(const topo::topology_spec& t, const traffic::traffic_series& series,
                                 const predictor_config& cfg);

// GCN feature extractor -> GRU over the window -> linear head to the target frame.
class gcn_gru_model {
public:
    gcn_gru_model(std::size_t node_count, std::size_t hidden_dim, std::uint64_t init_seed);

    // window of frames (oldest first) -> predicted frame (n x 5n, unit scale)
    num::matrix forward(const std::vector<const num::matrix*>& window, const num::matrix& norm_adj);
    void backward(const num::matrix& grad_pred);
    void zero_grads();
    void clear_cache();
    std::vector<num::param_view> param_views();

    std::size_t node_count() const { return node_count_; }
    std::size_t hidden_dim() const { return gru_.hidden_dim(); }
    num::dense_layer& head() { return head_; }

private:
    std::size_t node_count_;
    rng init_rng_; // declared before the layers: weight-init order is part of the contract
    num::gcn_layer gcn_;
    num::gru_cell gru_;
    num::dense_layer head_;
    std::size_t last_window_len_ = 0;
};

// Masked squared-error primitives shared by the trainer and gradient checks:
// only entries with a nonzero mask (real link slots) contribute.
double masked_mse(const num::matrix& pred, const num::matrix& target, const num::matrix& mask);
num::matrix masked_mse_grad(const num::matrix& pred, const num::matrix& target, const num::matrix& mask);

struct train_report {
    std::vector<double> episode_loss; // masked MSE + L2 term per training episode
    double holdout_mse = 0.0;         // masked MSE on the chronological holdout
    double persistence_mse = 0.0;     // same metric for copy-last-frame
    std::size_t holdout_samples = 0;
};

// Trains on the chronological head of the series, writes the checkpoint
// (weights + scaling stats + config echo), returns the loss trajectory and
// holdout comparison. Deterministic for fixed (series, config, seed).
// Throws numeric_error naming the episode if the loss diverges.
train_report train_predictor(const topo::topology_spec& t, const traffic::traffic_series& series,
                             const predictor_config& cfg, std::uint64_t seed,
                             const std::filesystem::path& checkpoint_path);

// Loaded predictor ready to forecast any in-series index.
class predictor_oracle {
public:
    predictor_oracle(const topo::topology_spec& t, const std::filesystem::path& checkpoint_path);

    const predictor_config& config() const { return cfg_; }

    // Forecast of snapshot `target_idx` built from the window ending
    // horizon steps earlier. Requires target_idx >= window + horizon - 1.
    // Output channels are unit-scale [0,1], symmetric, sentinel off-links.
    topo::info_matrices predict(const traffic::traffic_series& series, std::size_t target_idx);

private:
    const topo::topology_spec& topo_;
    predictor_config cfg_;
    channel_stats stats_;
    num::matrix norm_adj_;
    std::unique_ptr<gcn_gru_model> model_;
};

} // namespace sdwnlab::pred
