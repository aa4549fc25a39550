#include "sdwnlab/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/common/textio.hpp"
#include "sdwnlab/topology/info_matrix.hpp"

namespace sdwnlab::eval {

namespace {

// Resolves a node path into link indices, validating every hop.
std::vector<int> edge_indices(const topo::topology_spec& t, const topo::link_snapshot& snap,
                              const std::vector<int>& path) {
    if (snap.links.size() != t.link_count())
        throw dimension_error("score_path: snapshot does not match topology link count");
    if (path.size() < 2) throw config_error("score_path: path needs at least one edge");
    std::vector<int> out;
    out.reserve(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const int li = t.link_index(path[i], path[i + 1]);
        if (li < 0)
            throw config_error("score_path: path hops a missing link " + std::to_string(path[i]) +
                               "-" + std::to_string(path[i + 1]));
        out.push_back(li);
    }
    return out;
}

double edge_throughput(const topo::link_metrics& m, double interval_s, std::size_t* degraded) {
    const double drop_frac = (m.loss_pct + m.pkt_err_pct) / 100.0;
    if (drop_frac >= 1.0) {
        if (degraded) ++*degraded;
        return 0.0;
    }
    const double delay_s = std::max(m.delay_ms, topo::min_delay_ms) / 1000.0;
    const double carried_mb = m.bw_use_mbps * interval_s;
    return m.bw_use_mbps * std::sqrt(1.0 - drop_frac) * carried_mb / (2.0 * delay_s);
}

void check_interval(double interval_s) {
    if (!std::isfinite(interval_s) || interval_s <= 0.0)
        throw config_error("score_path: interval must be finite and positive");
}

} // namespace

double path_throughput(const topo::topology_spec& t, const topo::link_snapshot& snap,
                       const std::vector<int>& path, double interval_s,
                       std::size_t* degraded_edges) {
    check_interval(interval_s);
    double total = 0.0;
    for (int li : edge_indices(t, snap, path))
        total += edge_throughput(snap.links[li], interval_s, degraded_edges);
    return total;
}

path_metrics score_path(const topo::topology_spec& t, const topo::link_snapshot& snap,
                        const std::vector<int>& path, double interval_s,
                        std::size_t* degraded_edges) {
    check_interval(interval_s);
    const std::vector<int> edges = edge_indices(t, snap, path);
    path_metrics out;
    for (int li : edges) {
        const topo::link_metrics& m = snap.links[li];
        out.throughput_mbps += edge_throughput(m, interval_s, degraded_edges);
        out.delay_ms += m.delay_ms;
        out.loss_pct += m.loss_pct;
        out.err_pct += m.pkt_err_pct;
        out.distance_m += m.distance_m;
    }
    const double k = static_cast<double>(edges.size());
    out.delay_ms /= k;
    out.loss_pct /= k;
    out.err_pct /= k;
    out.distance_m /= k;
    return out;
}

path_metrics aggregate(const std::vector<path_metrics>& per_snapshot) {
    if (per_snapshot.empty()) throw state_error("aggregate: no scored snapshots");
    path_metrics out;
    for (const path_metrics& m : per_snapshot) {
        out.throughput_mbps += m.throughput_mbps;
        out.delay_ms += m.delay_ms;
        out.loss_pct += m.loss_pct;
        out.err_pct += m.err_pct;
        out.distance_m += m.distance_m;
    }
    const double k = static_cast<double>(per_snapshot.size());
    out.throughput_mbps /= k;
    out.delay_ms /= k;
    out.loss_pct /= k;
    out.err_pct /= k;
    out.distance_m /= k;
    return out;
}

double pct_delta(double ours, double base) {
    if (ours == base) return 0.0;
    if (base == 0.0) return ours > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
    return 100.0 * (ours - base) / base;
}

std::vector<router> standard_routers(const topo::topology_spec& t,
                                     const traffic::traffic_series& series,
                                     routing::actor_critic* agent,
                                     const routing::reward_config& rcfg) {
    auto raw = std::make_shared<std::vector<topo::info_matrices>>();
    raw->reserve(series.snapshots.size());
    for (const topo::link_snapshot& s : series.snapshots) raw->push_back(to_info_matrices(t, s));

    std::vector<router> out;
    if (agent) {
        auto unit = std::make_shared<std::vector<topo::info_matrices>>();
        unit->reserve(raw->size());
        const topo::normalization_config nc;
        for (const topo::info_matrices& f : *raw) unit->push_back(normalize(f, nc));
        out.push_back({"agent", [agent, t, rcfg, unit](std::size_t k, int src, int dst) {
                           const routing::route_result r = routing::select_path(
                               *agent, t, rcfg, src, dst, (*unit)[k], (*unit)[k]);
                           // the cost column carries the episode reward; the
                           // evaluator scores paths itself and ignores it
                           return routing::path_result{r.reached, r.path, r.reward_sum};
                       }});
    }
    for (const char* algo : {"ospf", "dvrp", "lsrp"})
        out.push_back({algo, [algo, t, rcfg, raw](std::size_t k, int src, int dst) {
                           return routing::run_baseline(algo, t, (*raw)[k], src, dst, rcfg);
                       }});
    return out;
}

void compare_config::validate() const {
    if (pair_count == 0) throw config_error("compare: pair_count must be at least 1");
    if (!std::isfinite(bucket_seconds) || bucket_seconds <= 0.0)
        throw config_error("compare: bucket_seconds must be finite and positive");
}

namespace {

struct running_stats {
    path_metrics sum;
    std::size_t cells = 0, no_path = 0, degraded = 0;

    void add(const path_metrics& m, std::size_t deg) {
        sum.throughput_mbps += m.throughput_mbps;
        sum.delay_ms += m.delay_ms;
        sum.loss_pct += m.loss_pct;
        sum.err_pct += m.err_pct;
        sum.distance_m += m.distance_m;
        ++cells;
        degraded += deg;
    }

    bucket_stats finish() const {
        bucket_stats out;
        out.cells = cells;
        out.no_path = no_path;
        out.degraded_edges = degraded;
        if (cells > 0) {
            const double k = static_cast<double>(cells);
            out.mean.throughput_mbps = sum.throughput_mbps / k;
            out.mean.delay_ms = sum.delay_ms / k;
            out.mean.loss_pct = sum.loss_pct / k;
            out.mean.err_pct = sum.err_pct / k;
            out.mean.distance_m = sum.distance_m / k;
        }
        return out;
    }
};

const std::array<std::pair<const char*, double path_metrics::*>, 5>& metric_fields() {
    static const std::array<std::pair<const char*, double path_metrics::*>, 5> fields = {{
        {"throughput_mbps", &path_metrics::throughput_mbps},
        {"delay_ms", &path_metrics::delay_ms},
        {"loss_pct", &path_metrics::loss_pct},
        {"err_pct", &path_metrics::err_pct},
        {"distance_m", &path_metrics::distance_m},
    }};
    return fields;
}

} // namespace

compare_report compare(const topo::topology_spec& t, const traffic::traffic_series& series,
                       const std::vector<router>& routers, const compare_config& cfg) {
    cfg.validate();
    if (routers.empty()) throw config_error("compare: no routers given");
    if (series.snapshots.empty()) throw state_error("compare: series has no snapshots");
    for (const router& r : routers)
        if (r.name.empty() || !r.route) throw config_error("compare: router needs a name and a provider");

    const std::size_t n = t.node_count();
    compare_report rep;
    rep.bucket_seconds = cfg.bucket_seconds;
    rep.snapshot_count = series.snapshots.size();
    for (const router& r : routers) rep.algorithms.push_back(r.name);

    rng pair_rng(derive_seed(cfg.seed, "eval-pairs"));
    for (std::size_t i = 0; i < cfg.pair_count; ++i) {
        const int src = static_cast<int>(pair_rng.uniform_index(n));
        int dst = static_cast<int>(pair_rng.uniform_index(n - 1));
        if (dst >= src) ++dst;
        rep.pairs.emplace_back(src, dst);
    }

    std::size_t buckets = 0;
    std::vector<std::size_t> bucket_of(series.snapshots.size());
    for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
        bucket_of[k] = static_cast<std::size_t>(series.wall_clock_s(k) / cfg.bucket_seconds);
        buckets = std::max(buckets, bucket_of[k] + 1);
    }
    rep.bucket_count = buckets;

    std::vector<std::vector<running_stats>> acc(routers.size(),
                                                std::vector<running_stats>(buckets + 1));
    // slot `buckets` accumulates the overall row
    for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
        const std::size_t b = bucket_of[k];
        for (std::size_t a = 0; a < routers.size(); ++a) {
            for (const auto& [src, dst] : rep.pairs) {
                const routing::path_result r = routers[a].route(k, src, dst);
                if (!r.found) {
                    ++acc[a][b].no_path;
                    ++acc[a][buckets].no_path;
                    continue;
                }
                std::size_t deg = 0;
                const path_metrics m =
                    score_path(t, series.snapshots[k], r.path, series.sample_interval_s, &deg);
                acc[a][b].add(m, deg);
                acc[a][buckets].add(m, deg);
            }
        }
    }

    rep.per_bucket.resize(routers.size());
    for (std::size_t a = 0; a < routers.size(); ++a) {
        for (std::size_t b = 0; b < buckets; ++b) rep.per_bucket[a].push_back(acc[a][b].finish());
        rep.overall.push_back(acc[a][buckets].finish());
    }
    return rep;
}

std::string compare_report::csv() const {
    csv_writer w({"algorithm", "bucket", "metric", "value"});
    auto emit = [&w](const std::string& algo, const std::string& bucket, const bucket_stats& s) {
        if (s.cells > 0)
            for (const auto& [name, field] : metric_fields())
                w.add_row({algo, bucket, name, format_double(s.mean.*field)});
        w.add_row({algo, bucket, "cells", std::to_string(s.cells)});
        w.add_row({algo, bucket, "no_path", std::to_string(s.no_path)});
        w.add_row({algo, bucket, "degraded_edges", std::to_string(s.degraded_edges)});
    };
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        for (std::size_t b = 0; b < bucket_count; ++b)
            emit(algorithms[a], std::to_string(b), per_bucket[a][b]);
        emit(algorithms[a], "overall", overall[a]);
    }
    return w.str();
}

std::string compare_report::summary() const {
    std::ostringstream ss;
    char line[256];
    std::snprintf(line, sizeof(line),
                  "routing comparison: %zu snapshots, %zu pairs, %zu buckets of %g h\n\n",
                  snapshot_count, pairs.size(), bucket_count, bucket_seconds / 3600.0);
    ss << line;
    std::snprintf(line, sizeof(line), "%-10s %-8s %7s %8s %16s %12s %10s %10s %12s\n", "algorithm",
                  "bucket", "cells", "no_path", "throughput_mbps", "delay_ms", "loss_pct",
                  "err_pct", "distance_m");
    ss << line;
    auto row = [&](const std::string& algo, const std::string& bucket, const bucket_stats& s) {
        if (s.cells > 0)
            std::snprintf(line, sizeof(line),
                          "%-10s %-8s %7zu %8zu %16.4f %12.4f %10.4f %10.4f %12.4f\n",
                          algo.c_str(), bucket.c_str(), s.cells, s.no_path,
                          s.mean.throughput_mbps, s.mean.delay_ms, s.mean.loss_pct, s.mean.err_pct,
                          s.mean.distance_m);
        else
            std::snprintf(line, sizeof(line), "%-10s %-8s %7zu %8zu %16s %12s %10s %10s %12s\n",
                          algo.c_str(), bucket.c_str(), s.cells, s.no_path, "-", "-", "-", "-",
                          "-");
        ss << line;
    };
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        for (std::size_t b = 0; b < bucket_count; ++b)
            row(algorithms[a], std::to_string(b), per_bucket[a][b]);
        row(algorithms[a], "overall", overall[a]);
    }

    if (algorithms.size() > 1) {
        ss << "\npercent change of " << algorithms[0] << " vs each alternative (overall means):\n";
        for (std::size_t a = 1; a < algorithms.size(); ++a) {
            ss << "  vs " << algorithms[a] << ":";
            if (overall[0].cells == 0 || overall[a].cells == 0) {
                ss << " n/a (no successful paths)\n";
                continue;
            }
            for (const auto& [name, field] : metric_fields()) {
                std::snprintf(line, sizeof(line), " %s %+.2f%%", name,
                              pct_delta(overall[0].mean.*field, overall[a].mean.*field));
                ss << line;
            }
            ss << '\n';
        }
    }
    return ss.str();
}

const bucket_stats& compare_report::stats_for(const std::string& algo) const {
    for (std::size_t a = 0; a < algorithms.size(); ++a)
        if (algorithms[a] == algo) return overall[a];
    throw missing_data_error("compare_report: unknown algorithm " + algo);
}

} // namespace sdwnlab::eval
