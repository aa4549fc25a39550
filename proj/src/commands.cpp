#include "sdwnlab/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/common/textio.hpp"
#include "sdwnlab/routing/baselines.hpp"
#include "sdwnlab/topology/info_matrix.hpp"
#include "sdwnlab/traffic/series_io.hpp"

namespace sdwnlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config ----

void eval_config::validate() const {
    if (pair_count == 0) throw config_error("eval config: pair_count must be at least 1");
    if (!std::isfinite(bucket_seconds) || bucket_seconds <= 0.0)
        throw config_error("eval config: bucket_seconds must be finite and positive");
}

json eval_config::to_json() const {
    return json{{"pair_count", pair_count}, {"bucket_seconds", bucket_seconds}};
}

eval_config eval_config::from_json(const json& j) {
    eval_config cfg;
    const json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw config_error("eval config: unknown key '" + key + "'");
        (void)value;
    }
    try {
        cfg.pair_count = j.value("pair_count", cfg.pair_count);
        cfg.bucket_seconds = j.value("bucket_seconds", cfg.bucket_seconds);
    } catch (const json::exception& e) {
        throw config_error("eval config: bad value type: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

void run_config::validate() const {
    traffic.validate();
    predictor.validate();
    ppo.validate();
    reward.validate();
    eval.validate();
}

json run_config::to_json() const {
    return json{{"traffic", traffic.to_json()},
                {"predictor", predictor.to_json()},
                {"ppo", ppo.to_json()},
                {"reward", reward.to_json()},
                {"eval", eval.to_json()}};
}

run_config run_config::from_json(const json& j) {
    run_config cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "traffic")
            cfg.traffic = traffic::traffic_config::from_json(value);
        else if (key == "predictor")
            cfg.predictor = pred::predictor_config::from_json(value);
        else if (key == "ppo")
            cfg.ppo = routing::ppo_config::from_json(value);
        else if (key == "reward")
            cfg.reward = routing::reward_config::from_json(value);
        else if (key == "eval")
            cfg.eval = eval_config::from_json(value);
        else
            throw config_error("run config: unknown section '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

run_config run_config::load(const fs::path& p) {
    if (p.empty()) return run_config{};
    json j;
    try {
        j = json::parse(read_text_file(p));
    } catch (const json::exception& e) {
        throw config_error("run config: cannot parse " + p.string() + ": " + e.what());
    }
    return from_json(j);
}

// --------------------------------------------------------------- helpers ----

namespace {

// every run announces its fully resolved options and config on one line
void log_run(const std::string& subcommand, json options, const run_config* cfg) {
    json j{{"subcommand", subcommand}, {"options", std::move(options)}};
    if (cfg) j["config"] = cfg->to_json();
    std::cout << "resolved config: " << j.dump() << "\n";
}

struct inputs {
    topo::topology_spec t;
    traffic::traffic_series series;
};

inputs load_inputs(const fs::path& topology, const fs::path& snapshots) {
    inputs in;
    in.t = topo::topology_spec::load(topology);
    in.series = traffic::load_series(snapshots, &in.t);
    return in;
}

std::size_t resolve_at(std::int64_t at, std::size_t count, const char* what) {
    if (at < 0) return count - 1;
    if (static_cast<std::size_t>(at) >= count)
        throw config_error(std::string(what) + ": snapshot index " + std::to_string(at) +
                           " out of range (series has " + std::to_string(count) + ")");
    return static_cast<std::size_t>(at);
}

void write_reward_curves(const fs::path& p, const routing::train_result& r) {
    csv_writer w({"episode", "reward", "steps"});
    for (std::size_t i = 0; i < r.episode_reward.size(); ++i)
        w.add_row({std::to_string(i), format_double(r.episode_reward[i]),
                   std::to_string(r.episode_steps[i])});
    w.save(p);
}

json matrix_rows(const num::matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            if (topo::is_sentinel(v))
                row.push_back(nullptr);
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error(std::string(what) + ": bad number '" + s + "'");
    }
}

std::size_t parse_count(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size() || s[0] == '-') throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw config_error(std::string(what) + ": bad count '" + s + "'");
    }
}

std::pair<std::string, std::string> split_pair(const std::string& s, const char* what) {
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos || s.find(':', colon + 1) != std::string::npos)
        throw config_error(std::string(what) + ": expected a:b, got '" + s + "'");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

std::string file_tag(std::string value) {
    for (char& c : value)
        if (c == ':') c = '_';
    return value;
}

} // namespace

// -------------------------------------------------------------- commands ----

topo::topology_spec cmd_make_topology(const make_topology_opts& o) {
    log_run("make-topology",
            {{"out", o.out.string()}, {"kind", o.kind}, {"seed", o.seed}}, nullptr);
    const std::uint64_t stage_seed = derive_seed(o.seed, "topology");
    topo::topology_spec t;
    if (o.kind == "lab")
        t = topo::build_lab_topology(stage_seed);
    else if (o.kind == "small")
        t = topo::build_small_topology(stage_seed);
    else
        throw config_error("make-topology: unknown kind '" + o.kind + "' (lab | small)");
    t.save(o.out);
    std::cout << "topology " << t.name << ": " << t.node_count() << " nodes, " << t.link_count()
              << " links, hash " << t.content_hash() << " -> " << o.out.string() << "\n";
    return t;
}

traffic::traffic_series cmd_gen_traffic(const gen_traffic_opts& o) {
    const run_config cfg = run_config::load(o.config);
    log_run("gen-traffic",
            {{"topology", o.topology.string()},
             {"out", o.out.string()},
             {"config", o.config.string()},
             {"seed", o.seed}},
            &cfg);
    const topo::topology_spec t = topo::topology_spec::load(o.topology);
    const traffic::traffic_series series =
        traffic::generate_series(t, cfg.traffic, derive_seed(o.seed, "traffic"));
    traffic::save_series(o.out, series);
    std::cout << "series: " << series.snapshots.size() << " snapshots every "
              << format_double(series.sample_interval_s) << " s -> " << o.out.string() << "\n";
    return series;
}

pred::train_report cmd_train_predictor(const train_predictor_opts& o) {
    const run_config cfg = run_config::load(o.config);
    log_run("train-predictor",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"out", o.out.string()},
             {"config", o.config.string()},
             {"curves", o.curves.string()},
             {"seed", o.seed}},
            &cfg);
    const inputs in = load_inputs(o.topology, o.snapshots);
    const pred::train_report rep = pred::train_predictor(in.t, in.series, cfg.predictor,
                                                         derive_seed(o.seed, "predictor"), o.out);
    if (!o.curves.empty()) {
        csv_writer w({"episode", "loss"});
        for (std::size_t i = 0; i < rep.episode_loss.size(); ++i)
            w.add_row({std::to_string(i), format_double(rep.episode_loss[i])});
        w.save(o.curves);
    }
    std::cout << "predictor: holdout mse " << format_double(rep.holdout_mse) << " vs persistence "
              << format_double(rep.persistence_mse) << " over " << rep.holdout_samples
              << " samples -> " << o.out.string() << "\n";
    return rep;
}

topo::info_matrices cmd_predict(const predict_opts& o) {
    log_run("predict",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"checkpoint", o.checkpoint.string()},
             {"at", o.at},
             {"out", o.out.string()}},
            nullptr);
    const inputs in = load_inputs(o.topology, o.snapshots);
    pred::predictor_oracle oracle(in.t, o.checkpoint);
    const std::size_t idx = resolve_at(o.at, in.series.snapshots.size(), "predict");
    const topo::info_matrices frame = oracle.predict(in.series, idx);
    if (!o.out.empty()) {
        json j{{"target_index", idx},
               {"window", oracle.config().window},
               {"horizon", oracle.config().horizon}};
        for (int c = 0; c < topo::metric_channel_count; ++c)
            j["channels"][topo::metric_channel_names()[c]] =
                matrix_rows(frame.channel[static_cast<std::size_t>(c)]);
        write_text_file(o.out, j.dump(2) + "\n");
    }
    std::cout << "forecast of snapshot " << idx << " from the " << oracle.config().window
              << "-frame window ending " << oracle.config().horizon << " step(s) earlier\n";
    return frame;
}

routing::train_result cmd_train_agent(const train_agent_opts& o) {
    const run_config cfg = run_config::load(o.config);
    log_run("train-agent",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"out", o.out.string()},
             {"config", o.config.string()},
             {"curves", o.curves.string()},
             {"predictor", o.predictor.string()},
             {"seed", o.seed}},
            &cfg);
    const inputs in = load_inputs(o.topology, o.snapshots);
    std::optional<pred::predictor_oracle> oracle;
    if (!o.predictor.empty()) oracle.emplace(in.t, o.predictor);
    const routing::train_result res =
        routing::train_agent(in.t, in.series, oracle ? &*oracle : nullptr, cfg.ppo, cfg.reward,
                             derive_seed(o.seed, "agent"), o.out);
    if (!o.curves.empty()) write_reward_curves(o.curves, res);
    std::cout << "agent: " << res.episode_reward.size() << " episodes, " << res.arrivals
              << " arrivals, best ma " << format_double(res.best_ma) << ", final ma "
              << format_double(res.final_ma) << " -> " << o.out.string() << "\n";
    return res;
}

routing::route_result cmd_route(const route_opts& o) {
    log_run("route",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"checkpoint", o.checkpoint.string()},
             {"src", o.src},
             {"dst", o.dst},
             {"snapshot_at", o.snapshot_at},
             {"out", o.out.string()}},
            nullptr);
    const inputs in = load_inputs(o.topology, o.snapshots);
    routing::loaded_agent agent = routing::load_agent(o.checkpoint, in.t);
    const std::size_t idx = resolve_at(o.snapshot_at, in.series.snapshots.size(), "route");
    const topo::info_matrices unit =
        normalize(to_info_matrices(in.t, in.series.snapshots[idx]), topo::normalization_config{});
    const routing::route_result r =
        routing::select_path(*agent.model, in.t, agent.reward, o.src, o.dst, unit, unit);

    std::cout << "route " << o.src << " -> " << o.dst << " on snapshot " << idx << ": ";
    if (r.reached) {
        std::cout << "path";
        for (int v : r.path) std::cout << " " << v;
        std::cout << ", reward " << format_double(r.reward_sum) << ", " << r.steps << " steps\n";
    } else {
        std::cout << "no path within the step cap (" << r.steps << " steps)\n";
    }
    if (!o.out.empty()) {
        json j{{"src", o.src},          {"dst", o.dst},
               {"snapshot_index", idx}, {"reached", r.reached},
               {"path", r.path},        {"reward_sum", r.reward_sum},
               {"steps", r.steps}};
        write_text_file(o.out, j.dump(2) + "\n");
    }
    return r;
}

routing::path_result cmd_route_baseline(const route_baseline_opts& o) {
    const run_config cfg = run_config::load(o.config);
    log_run("route-baseline",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"algo", o.algo},
             {"src", o.src},
             {"dst", o.dst},
             {"snapshot_at", o.snapshot_at},
             {"config", o.config.string()},
             {"out", o.out.string()}},
            &cfg);
    const inputs in = load_inputs(o.topology, o.snapshots);
    const std::size_t idx = resolve_at(o.snapshot_at, in.series.snapshots.size(), "route-baseline");
    const topo::info_matrices raw = to_info_matrices(in.t, in.series.snapshots[idx]);
    const routing::path_result r =
        routing::run_baseline(o.algo, in.t, raw, o.src, o.dst, cfg.reward);

    std::cout << o.algo << " " << o.src << " -> " << o.dst << " on snapshot " << idx << ": ";
    if (r.found) {
        std::cout << "path";
        for (int v : r.path) std::cout << " " << v;
        std::cout << ", cost " << format_double(r.cost) << "\n";
    } else {
        std::cout << "no path\n";
    }
    if (!o.out.empty()) {
        json j{{"algorithm", o.algo}, {"src", o.src},   {"dst", o.dst},
               {"snapshot_index", idx}, {"found", r.found}, {"path", r.path},
               {"cost", r.cost}};
        write_text_file(o.out, j.dump(2) + "\n");
    }
    return r;
}

eval::compare_report cmd_evaluate(const evaluate_opts& o) {
    const run_config cfg = run_config::load(o.config);
    log_run("evaluate",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"out", o.out_dir.string()},
             {"checkpoint", o.checkpoint.string()},
             {"config", o.config.string()},
             {"seed", o.seed}},
            &cfg);
    const inputs in = load_inputs(o.topology, o.snapshots);

    std::optional<routing::loaded_agent> agent;
    routing::actor_critic* model = nullptr;
    routing::reward_config rcfg = cfg.reward;
    if (!o.checkpoint.empty()) {
        agent = routing::load_agent(o.checkpoint, in.t);
        model = agent->model.get();
        rcfg = agent->reward; // score paths the way the agent was trained
    }
    const std::vector<eval::router> routers = eval::standard_routers(in.t, in.series, model, rcfg);

    eval::compare_config cc;
    cc.pair_count = cfg.eval.pair_count;
    cc.bucket_seconds = cfg.eval.bucket_seconds;
    cc.seed = o.seed;
    const eval::compare_report rep = eval::compare(in.t, in.series, routers, cc);

    fs::create_directories(o.out_dir);
    write_text_file(o.out_dir / "comparison.csv", rep.csv());
    write_text_file(o.out_dir / "summary.txt", rep.summary());
    std::cout << rep.summary();
    std::cout << "report -> " << (o.out_dir / "comparison.csv").string() << "\n";
    return rep;
}

namespace {

// applies one sweep value to a fresh copy of the base config
run_config patch_config(const run_config& base, const std::string& param,
                        const std::string& value) {
    run_config c = base;
    if (param == "learning_rates") {
        const auto [a, b] = split_pair(value, "sweep learning_rates");
        c.ppo.alpha1 = parse_double(a, "sweep learning_rates");
        c.ppo.alpha2 = parse_double(b, "sweep learning_rates");
    } else if (param == "batch_size") {
        c.ppo.batch_size = parse_count(value, "sweep batch_size");
    } else if (param == "update_count") {
        c.ppo.update_count = parse_count(value, "sweep update_count");
    } else if (param == "discount_factors") {
        const auto [a, b] = split_pair(value, "sweep discount_factors");
        c.reward.xi1 = parse_double(a, "sweep discount_factors");
        c.reward.xi2 = parse_double(b, "sweep discount_factors");
    } else if (param == "objective_variant") {
        c.ppo.objective_variant = value;
    } else {
        throw config_error("sweep: unknown param '" + param +
                           "' (learning_rates | batch_size | update_count | discount_factors | "
                           "objective_variant)");
    }
    c.ppo.validate();
    c.reward.validate();
    return c;
}

} // namespace

std::vector<sweep_row> cmd_sweep(const sweep_opts& o) {
    const run_config base = run_config::load(o.config);
    log_run("sweep",
            {{"topology", o.topology.string()},
             {"snapshots", o.snapshots.string()},
             {"out", o.out_dir.string()},
             {"param", o.param},
             {"values", o.values},
             {"config", o.config.string()},
             {"predictor", o.predictor.string()},
             {"seed", o.seed}},
            &base);
    if (o.values.empty()) throw config_error("sweep: needs at least one value");
    const inputs in = load_inputs(o.topology, o.snapshots);
    std::optional<pred::predictor_oracle> oracle;
    if (!o.predictor.empty()) oracle.emplace(in.t, o.predictor);
    fs::create_directories(o.out_dir);

    // validate every value before spending time on any training run
    std::vector<run_config> patched;
    for (const std::string& value : o.values) patched.push_back(patch_config(base, o.param, value));

    const std::uint64_t stage_seed = derive_seed(o.seed, "agent"); // shared across values
    std::vector<sweep_row> rows;
    for (std::size_t i = 0; i < o.values.size(); ++i) {
        const std::string tag = file_tag(o.values[i]);
        sweep_row row;
        row.value = o.values[i];
        row.curve_file = o.out_dir / ("curve_" + o.param + "_" + tag + ".csv");
        const fs::path ckpt = o.out_dir / ("agent_" + o.param + "_" + tag + ".ckpt");
        try {
            const routing::train_result res =
                routing::train_agent(in.t, in.series, oracle ? &*oracle : nullptr, patched[i].ppo,
                                     patched[i].reward, stage_seed, ckpt);
            write_reward_curves(row.curve_file, res);
            row.ok = true;
            row.final_ma = res.final_ma;
            row.best_ma = res.best_ma;
            row.arrivals = res.arrivals;
            std::cout << "sweep " << o.param << "=" << row.value << ": final ma "
                      << format_double(row.final_ma) << ", best ma " << format_double(row.best_ma)
                      << "\n";
        } catch (const numeric_error& e) {
            row.error = e.what();
            std::cout << "sweep " << o.param << "=" << row.value << ": non-finite run ("
                      << row.error << ")\n";
        }
        rows.push_back(std::move(row));
    }

    csv_writer w({"param", "value", "status", "final_ma", "best_ma", "arrivals", "curve_file"});
    for (const sweep_row& r : rows)
        w.add_row({o.param, r.value, r.ok ? "ok" : "non-finite",
                   r.ok ? format_double(r.final_ma) : "", r.ok ? format_double(r.best_ma) : "",
                   r.ok ? std::to_string(r.arrivals) : "",
                   r.ok ? r.curve_file.filename().string() : ""});
    w.save(o.out_dir / "sweep_summary.csv");
    std::cout << "sweep summary -> " << (o.out_dir / "sweep_summary.csv").string() << "\n";
    return rows;
}

nlohmann::json cmd_end_to_end(const end_to_end_opts& o) {
    fs::path dir = o.out_dir;
    if (dir.empty()) {
        // directory name carries the time; the manifest stays timestamp-free
        char stamp[32];
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm_utc);
        dir = fs::path("run-") += stamp;
    }
    fs::create_directories(dir);

    const run_config cfg = run_config::load(o.config);
    log_run("end-to-end", {{"out", dir.string()}, {"config", o.config.string()}, {"seed", o.seed}},
            &cfg);

    json manifest{{"seed", o.seed},
                  {"config", cfg.to_json()},
                  {"stages", json::array()},
                  {"artifacts", json::array()}};
    bool failed = false;
    auto artifact = [&](const fs::path& p) {
        manifest["artifacts"].push_back(
            json{{"path", p.filename().string()}, {"hash", file_content_hash(p)}});
    };
    auto stage = [&](const std::string& name, auto&& fn) {
        if (failed) {
            manifest["stages"].push_back(json{{"name", name}, {"status", "skipped"}});
            std::cout << "stage " << name << ": skipped\n";
            return;
        }
        try {
            fn();
            manifest["stages"].push_back(json{{"name", name}, {"status", "ok"}});
            std::cout << "stage " << name << ": ok\n";
        } catch (const std::exception& e) {
            failed = true;
            manifest["stages"].push_back(
                json{{"name", name}, {"status", "failed"}, {"error", e.what()}});
            std::cout << "stage " << name << ": failed (" << e.what() << ")\n";
        }
    };

    topo::topology_spec t;
    traffic::traffic_series series;

    stage("topology", [&] {
        t = topo::build_lab_topology(derive_seed(o.seed, "topology"));
        t.save(dir / "topology.json");
        artifact(dir / "topology.json");
    });
    stage("traffic", [&] {
        series = traffic::generate_series(t, cfg.traffic, derive_seed(o.seed, "traffic"));
        traffic::save_series(dir / "series.jsonl", series);
        artifact(dir / "series.jsonl");
    });
    stage("predictor", [&] {
        const pred::train_report rep = pred::train_predictor(
            t, series, cfg.predictor, derive_seed(o.seed, "predictor"), dir / "predictor.ckpt");
        csv_writer w({"episode", "loss"});
        for (std::size_t i = 0; i < rep.episode_loss.size(); ++i)
            w.add_row({std::to_string(i), format_double(rep.episode_loss[i])});
        w.save(dir / "predictor_curve.csv");
        artifact(dir / "predictor.ckpt");
        artifact(dir / "predictor_curve.csv");
        std::cout << "  holdout mse " << format_double(rep.holdout_mse) << " vs persistence "
                  << format_double(rep.persistence_mse) << "\n";
    });
    // both agents share one stage seed so the observation source is the only
    // difference between the runs
    stage("agent-predicted", [&] {
        pred::predictor_oracle oracle(t, dir / "predictor.ckpt");
        const routing::train_result res =
            routing::train_agent(t, series, &oracle, cfg.ppo, cfg.reward,
                                 derive_seed(o.seed, "agent"), dir / "agent_pred.ckpt");
        write_reward_curves(dir / "agent_pred_curve.csv", res);
        artifact(dir / "agent_pred.ckpt");
        artifact(dir / "agent_pred_curve.csv");
        std::cout << "  final ma " << format_double(res.final_ma) << ", arrivals "
                  << res.arrivals << "\n";
    });
    stage("agent-stale", [&] {
        const routing::train_result res =
            routing::train_agent(t, series, nullptr, cfg.ppo, cfg.reward,
                                 derive_seed(o.seed, "agent"), dir / "agent_stale.ckpt");
        write_reward_curves(dir / "agent_stale_curve.csv", res);
        artifact(dir / "agent_stale.ckpt");
        artifact(dir / "agent_stale_curve.csv");
        std::cout << "  final ma " << format_double(res.final_ma) << ", arrivals "
                  << res.arrivals << "\n";
    });
    stage("evaluate", [&] {
        routing::loaded_agent pred_agent = routing::load_agent(dir / "agent_pred.ckpt", t);
        routing::loaded_agent stale_agent = routing::load_agent(dir / "agent_stale.ckpt", t);
        std::vector<eval::router> routers =
            eval::standard_routers(t, series, pred_agent.model.get(), pred_agent.reward);
        eval::router stale =
            eval::standard_routers(t, series, stale_agent.model.get(), stale_agent.reward)[0];
        stale.name = "agent_stale";
        routers.insert(routers.begin() + 1, std::move(stale));

        eval::compare_config cc;
        cc.pair_count = cfg.eval.pair_count;
        cc.bucket_seconds = cfg.eval.bucket_seconds;
        cc.seed = o.seed;
        const eval::compare_report rep = eval::compare(t, series, routers, cc);
        write_text_file(dir / "comparison.csv", rep.csv());
        write_text_file(dir / "summary.txt", rep.summary());
        artifact(dir / "comparison.csv");
        artifact(dir / "summary.txt");
        std::cout << rep.summary();
    });

    manifest["status"] = failed ? "partial" : "complete";
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "manifest -> " << (dir / "manifest.json").string() << "\n";
    return manifest;
}

// ------------------------------------------------------------------- cli ----

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"desk-scale software-defined wireless routing laboratory"};
    app.require_subcommand(1);

    make_topology_opts mt;
    std::string mt_out;
    auto* c_mt = app.add_subcommand("make-topology", "generate a topology file");
    c_mt->add_option("--out", mt_out, "output topology JSON")->required();
    c_mt->add_option("--kind", mt.kind, "lab | small");
    c_mt->add_option("--seed", mt.seed, "root seed");

    gen_traffic_opts gt;
    std::string gt_topo, gt_out, gt_cfg;
    auto* c_gt = app.add_subcommand("gen-traffic", "simulate a measurement series");
    c_gt->add_option("--topology", gt_topo, "topology JSON")->required();
    c_gt->add_option("--out", gt_out, "output series JSONL")->required();
    c_gt->add_option("--config", gt_cfg, "run config JSON");
    c_gt->add_option("--seed", gt.seed, "root seed");

    train_predictor_opts tp;
    std::string tp_topo, tp_snaps, tp_out, tp_cfg, tp_curves;
    auto* c_tp = app.add_subcommand("train-predictor", "fit the traffic forecaster");
    c_tp->add_option("--topology", tp_topo, "topology JSON")->required();
    c_tp->add_option("--snapshots", tp_snaps, "series JSONL")->required();
    c_tp->add_option("--out", tp_out, "output checkpoint")->required();
    c_tp->add_option("--config", tp_cfg, "run config JSON");
    c_tp->add_option("--curves", tp_curves, "loss curve CSV");
    c_tp->add_option("--seed", tp.seed, "root seed");

    predict_opts pr;
    std::string pr_topo, pr_snaps, pr_ckpt, pr_out;
    auto* c_pr = app.add_subcommand("predict", "forecast one snapshot");
    c_pr->add_option("--topology", pr_topo, "topology JSON")->required();
    c_pr->add_option("--snapshots", pr_snaps, "series JSONL")->required();
    c_pr->add_option("--checkpoint", pr_ckpt, "predictor checkpoint")->required();
    c_pr->add_option("--at", pr.at, "target snapshot index (default: last)");
    c_pr->add_option("--out", pr_out, "forecast JSON dump");

    train_agent_opts ta;
    std::string ta_topo, ta_snaps, ta_out, ta_cfg, ta_curves, ta_pred;
    auto* c_ta = app.add_subcommand("train-agent", "train the routing agent");
    c_ta->add_option("--topology", ta_topo, "topology JSON")->required();
    c_ta->add_option("--snapshots", ta_snaps, "series JSONL")->required();
    c_ta->add_option("--out", ta_out, "output checkpoint")->required();
    c_ta->add_option("--config", ta_cfg, "run config JSON");
    c_ta->add_option("--curves", ta_curves, "reward curve CSV");
    c_ta->add_option("--predictor", ta_pred, "predictor checkpoint for forecast observations");
    c_ta->add_option("--seed", ta.seed, "root seed");

    route_opts rt;
    std::string rt_topo, rt_snaps, rt_ckpt, rt_out;
    auto* c_rt = app.add_subcommand("route", "greedy rollout of a trained agent");
    c_rt->add_option("--topology", rt_topo, "topology JSON")->required();
    c_rt->add_option("--snapshots", rt_snaps, "series JSONL")->required();
    c_rt->add_option("--checkpoint", rt_ckpt, "agent checkpoint")->required();
    c_rt->add_option("--src", rt.src, "source node id")->required();
    c_rt->add_option("--dst", rt.dst, "destination node id")->required();
    c_rt->add_option("--snapshot-at", rt.snapshot_at, "snapshot index (default: last)");
    c_rt->add_option("--out", rt_out, "route JSON dump");

    route_baseline_opts rb;
    std::string rb_topo, rb_snaps, rb_cfg, rb_out;
    auto* c_rb = app.add_subcommand("route-baseline", "run a classical router");
    c_rb->add_option("--topology", rb_topo, "topology JSON")->required();
    c_rb->add_option("--snapshots", rb_snaps, "series JSONL")->required();
    c_rb->add_option("--algo", rb.algo, "ospf | dvrp | lsrp")->required();
    c_rb->add_option("--src", rb.src, "source node id")->required();
    c_rb->add_option("--dst", rb.dst, "destination node id")->required();
    c_rb->add_option("--snapshot-at", rb.snapshot_at, "snapshot index (default: last)");
    c_rb->add_option("--config", rb_cfg, "run config JSON");
    c_rb->add_option("--out", rb_out, "route JSON dump");

    evaluate_opts ev;
    std::string ev_topo, ev_snaps, ev_out, ev_ckpt, ev_cfg;
    auto* c_ev = app.add_subcommand("evaluate", "race routers and write the comparison report");
    c_ev->add_option("--topology", ev_topo, "topology JSON")->required();
    c_ev->add_option("--snapshots", ev_snaps, "series JSONL")->required();
    c_ev->add_option("--out", ev_out, "output directory")->required();
    c_ev->add_option("--checkpoint", ev_ckpt, "agent checkpoint (omit for baselines only)");
    c_ev->add_option("--config", ev_cfg, "run config JSON");
    c_ev->add_option("--seed", ev.seed, "root seed");

    sweep_opts sw;
    std::string sw_topo, sw_snaps, sw_out, sw_cfg, sw_pred;
    auto* c_sw = app.add_subcommand("sweep", "train once per hyperparameter value");
    c_sw->add_option("--topology", sw_topo, "topology JSON")->required();
    c_sw->add_option("--snapshots", sw_snaps, "series JSONL")->required();
    c_sw->add_option("--out", sw_out, "output directory")->required();
    c_sw->add_option("--param", sw.param,
                     "learning_rates | batch_size | update_count | discount_factors | "
                     "objective_variant")
        ->required();
    c_sw->add_option("--values", sw.values, "value list; pairs as a:b")
        ->required()
        ->delimiter(',');
    c_sw->add_option("--config", sw_cfg, "run config JSON");
    c_sw->add_option("--predictor", sw_pred, "predictor checkpoint");
    c_sw->add_option("--seed", sw.seed, "root seed");

    end_to_end_opts ee;
    std::string ee_out, ee_cfg;
    auto* c_ee = app.add_subcommand("end-to-end", "full pipeline into one artifact directory");
    c_ee->add_option("--out", ee_out, "output directory (default: run-<utc time>)");
    c_ee->add_option("--config", ee_cfg, "run config JSON");
    c_ee->add_option("--seed", ee.seed, "root seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_mt->parsed()) {
            mt.out = mt_out;
            cmd_make_topology(mt);
        } else if (c_gt->parsed()) {
            gt.topology = gt_topo;
            gt.out = gt_out;
            gt.config = gt_cfg;
            cmd_gen_traffic(gt);
        } else if (c_tp->parsed()) {
            tp.topology = tp_topo;
            tp.snapshots = tp_snaps;
            tp.out = tp_out;
            tp.config = tp_cfg;
            tp.curves = tp_curves;
            cmd_train_predictor(tp);
        } else if (c_pr->parsed()) {
            pr.topology = pr_topo;
            pr.snapshots = pr_snaps;
            pr.checkpoint = pr_ckpt;
            pr.out = pr_out;
            cmd_predict(pr);
        } else if (c_ta->parsed()) {
            ta.topology = ta_topo;
            ta.snapshots = ta_snaps;
            ta.out = ta_out;
            ta.config = ta_cfg;
            ta.curves = ta_curves;
            ta.predictor = ta_pred;
            cmd_train_agent(ta);
        } else if (c_rt->parsed()) {
            rt.topology = rt_topo;
            rt.snapshots = rt_snaps;
            rt.checkpoint = rt_ckpt;
            rt.out = rt_out;
            cmd_route(rt);
        } else if (c_rb->parsed()) {
            rb.topology = rb_topo;
            rb.snapshots = rb_snaps;
            rb.config = rb_cfg;
            rb.out = rb_out;
            cmd_route_baseline(rb);
        } else if (c_ev->parsed()) {
            ev.topology = ev_topo;
            ev.snapshots = ev_snaps;
            ev.out_dir = ev_out;
            ev.checkpoint = ev_ckpt;
            ev.config = ev_cfg;
            cmd_evaluate(ev);
        } else if (c_sw->parsed()) {
            sw.topology = sw_topo;
            sw.snapshots = sw_snaps;
            sw.out_dir = sw_out;
            sw.config = sw_cfg;
            sw.predictor = sw_pred;
            cmd_sweep(sw);
        } else if (c_ee->parsed()) {
            ee.out_dir = ee_out;
            ee.config = ee_cfg;
            const json manifest = cmd_end_to_end(ee);
            if (manifest.at("status") != "complete") {
                std::cerr << "error: pipeline finished partially; see manifest\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace sdwnlab::cli
