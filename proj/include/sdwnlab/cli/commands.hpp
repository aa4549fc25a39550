#pragma once

// Command layer behind the `sdwn` binary. Every subcommand is a plain function
// over an options struct, so tests can drive it in-process; the binary only
// parses flags and dispatches. All randomness flows from one root seed, split
// per stage with derive_seed, and every run logs its fully resolved
// configuration before doing any work.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdwnlab/eval/evaluate.hpp"
#include "sdwnlab/predictor/predictor.hpp"
#include "sdwnlab/routing/env.hpp"
#include "sdwnlab/routing/ppo.hpp"
#include "sdwnlab/topology/topology.hpp"
#include "sdwnlab/traffic/traffic_sim.hpp"

namespace sdwnlab::cli {

// Evaluation knobs carried by the config file; the pair-sampling seed comes
// from the command line, not from here.
struct eval_config {
    std::size_t pair_count = 20;
    double bucket_seconds = 10800.0; // 3-hour windows on the simulated clock
    void validate() const;
    nlohmann::json to_json() const;
    static eval_config from_json(const nlohmann::json& j); // rejects unknown keys
};

// One optional section per stage. Missing sections keep their defaults; an
// unknown section name or key anywhere is rejected.
struct run_config {
    traffic::traffic_config traffic;
    pred::predictor_config predictor;
    routing::ppo_config ppo;
    routing::reward_config reward;
    eval_config eval;

    void validate() const;
    nlohmann::json to_json() const;
    static run_config from_json(const nlohmann::json& j);
    static run_config load(const std::filesystem::path& p); // empty path -> defaults
};

struct make_topology_opts {
    std::filesystem::path out;
    std::string kind = "lab"; // lab | small
    std::uint64_t seed = 42;
};
topo::topology_spec cmd_make_topology(const make_topology_opts& o);

struct gen_traffic_opts {
    std::filesystem::path topology, out;
    std::filesystem::path config; // optional
    std::uint64_t seed = 42;
};
traffic::traffic_series cmd_gen_traffic(const gen_traffic_opts& o);

struct train_predictor_opts {
    std::filesystem::path topology, snapshots, out;
    std::filesystem::path config, curves; // optional
    std::uint64_t seed = 42;
};
pred::train_report cmd_train_predictor(const train_predictor_opts& o);

struct predict_opts {
    std::filesystem::path topology, snapshots, checkpoint;
    std::filesystem::path out; // optional JSON dump of the forecast frame
    std::int64_t at = -1;      // target snapshot index; -1 means the last one
};
topo::info_matrices cmd_predict(const predict_opts& o);

struct train_agent_opts {
    std::filesystem::path topology, snapshots, out;
    std::filesystem::path config, curves, predictor; // optional
    std::uint64_t seed = 42;
};
routing::train_result cmd_train_agent(const train_agent_opts& o);

struct route_opts {
    std::filesystem::path topology, snapshots, checkpoint;
    std::filesystem::path out; // optional JSON route dump
    int src = 0, dst = 0;
    std::int64_t snapshot_at = -1; // -1 means the last snapshot
};
routing::route_result cmd_route(const route_opts& o);

struct route_baseline_opts {
    std::filesystem::path topology, snapshots;
    std::filesystem::path config, out; // optional
    std::string algo = "ospf";         // ospf | dvrp | lsrp
    int src = 0, dst = 0;
    std::int64_t snapshot_at = -1;
};
routing::path_result cmd_route_baseline(const route_baseline_opts& o);

// Races the checkpointed agent (when given) against the classical routers and
// writes comparison.csv plus summary.txt under out_dir. With a checkpoint the
// reward weights echoed in it take precedence over the config file, so paths
// are scored the way the agent was trained.
struct evaluate_opts {
    std::filesystem::path topology, snapshots, out_dir;
    std::filesystem::path checkpoint, config; // optional
    std::uint64_t seed = 42;
};
eval::compare_report cmd_evaluate(const evaluate_opts& o);

// One training run per value with a shared stage seed; curves land in
// out_dir/curve_<param>_<value>.csv and a sweep_summary.csv indexes them.
// A run that dies on non-finite numbers is flagged and the sweep continues.
struct sweep_opts {
    std::filesystem::path topology, snapshots, out_dir;
    std::filesystem::path config, predictor; // optional
    std::string param; // learning_rates | batch_size | update_count |
                       // discount_factors | objective_variant
    std::vector<std::string> values; // raw tokens; pairs use a:b
    std::uint64_t seed = 42;
};
struct sweep_row {
    std::string value;
    bool ok = false;
    std::string error; // set when ok is false
    double final_ma = 0.0, best_ma = 0.0;
    std::size_t arrivals = 0;
    std::filesystem::path curve_file;
};
std::vector<sweep_row> cmd_sweep(const sweep_opts& o);

// Full pipeline under one directory: topology, traffic, predictor, agents
// with and without prediction, and the comparison report. manifest.json lists
// every artifact with its content hash and records per-stage status; it holds
// no timestamps, so equal seeds produce byte-identical manifests. Returns the
// manifest; throws nothing for stage failures (they are recorded instead).
struct end_to_end_opts {
    std::filesystem::path out_dir; // empty -> ./run-<utc-time> (manifest stays timestamp-free)
    std::filesystem::path config;  // optional
    std::uint64_t seed = 42;
};
nlohmann::json cmd_end_to_end(const end_to_end_opts& o);

// argv-level entry used by the binary and by tests; returns the process exit
// code and reports errors on stderr.
int run_cli(int argc, const char* const* argv);

} // namespace sdwnlab::cli
