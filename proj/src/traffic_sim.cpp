#include "sdwnlab/traffic/traffic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/traffic/gravity.hpp"

namespace sdwnlab::traffic {

void traffic_config::validate() const {
    if (!(total_rate_mbps >= 0.0)) throw config_error("traffic: total_rate_mbps must be >= 0");
    if (!(sample_interval_s > 0.0)) throw config_error("traffic: sample_interval_s must be > 0");
    if (sample_count == 0) throw config_error("traffic: sample_count must be > 0");
    if (!(day_scale > 0.0)) throw config_error("traffic: day_scale must be > 0");
    if (mass_jitter < 0.0 || mass_jitter >= 1.0) throw config_error("traffic: mass_jitter must be in [0,1)");
    if (demand_jitter < 0.0 || demand_jitter >= 1.0) throw config_error("traffic: demand_jitter must be in [0,1)");
    if (probe_jitter < 0.0 || probe_jitter > 0.5) throw config_error("traffic: probe_jitter must be in [0,0.5]");
    if (packet_bytes == 0) throw config_error("traffic: packet_bytes must be > 0");
    if (!(base_delay_lo_ms > 0.0) || base_delay_hi_ms < base_delay_lo_ms)
        throw config_error("traffic: bad base delay range");
    if (base_loss_lo < 0.0 || base_loss_hi < base_loss_lo || base_loss_hi > 0.5)
        throw config_error("traffic: bad base loss range");
    if (base_err_lo < 0.0 || base_err_hi < base_err_lo || base_err_hi > 0.5)
        throw config_error("traffic: bad base error range");
    if (!(max_pair_rate_mbps > 0.0)) throw config_error("traffic: max_pair_rate_mbps must be > 0");
}

nlohmann::json traffic_config::to_json() const {
    return nlohmann::json{{"total_rate_mbps", total_rate_mbps},
                          {"sample_interval_s", sample_interval_s},
                          {"sample_count", sample_count},
                          {"day_scale", day_scale},
                          {"mass_jitter", mass_jitter},
                          {"demand_jitter", demand_jitter},
                          {"probe_jitter", probe_jitter},
                          {"packet_bytes", packet_bytes},
                          {"base_delay_lo_ms", base_delay_lo_ms},
                          {"base_delay_hi_ms", base_delay_hi_ms},
                          {"base_loss_lo", base_loss_lo},
                          {"base_loss_hi", base_loss_hi},
                          {"base_err_lo", base_err_lo},
                          {"base_err_hi", base_err_hi},
                          {"max_pair_rate_mbps", max_pair_rate_mbps}};
}

traffic_config traffic_config::from_json(const nlohmann::json& j) {
    traffic_config cfg;
    const nlohmann::json defaults = cfg.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw config_error("traffic config: unknown key '" + key + "'");
        (void)value;
    }
    try {
        cfg.total_rate_mbps = j.value("total_rate_mbps", cfg.total_rate_mbps);
        cfg.sample_interval_s = j.value("sample_interval_s", cfg.sample_interval_s);
        cfg.sample_count = j.value("sample_count", cfg.sample_count);
        cfg.day_scale = j.value("day_scale", cfg.day_scale);
        cfg.mass_jitter = j.value("mass_jitter", cfg.mass_jitter);
        cfg.demand_jitter = j.value("demand_jitter", cfg.demand_jitter);
        cfg.probe_jitter = j.value("probe_jitter", cfg.probe_jitter);
        cfg.packet_bytes = j.value("packet_bytes", cfg.packet_bytes);
        cfg.base_delay_lo_ms = j.value("base_delay_lo_ms", cfg.base_delay_lo_ms);
        cfg.base_delay_hi_ms = j.value("base_delay_hi_ms", cfg.base_delay_hi_ms);
        cfg.base_loss_lo = j.value("base_loss_lo", cfg.base_loss_lo);
        cfg.base_loss_hi = j.value("base_loss_hi", cfg.base_loss_hi);
        cfg.base_err_lo = j.value("base_err_lo", cfg.base_err_lo);
        cfg.base_err_hi = j.value("base_err_hi", cfg.base_err_hi);
        cfg.max_pair_rate_mbps = j.value("max_pair_rate_mbps", cfg.max_pair_rate_mbps);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("traffic config: bad value type: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

std::vector<int> bfs_path(const topo::topology_spec& t, int src, int dst) {
    const int n = static_cast<int>(t.node_count());
    if (src < 0 || src >= n || dst < 0 || dst >= n) throw config_error("bfs_path: node id out of range");
    if (src == dst) return {src};

    // distance-to-dst sweep, then greedy walk choosing the smallest-id neighbor
    // that still descends: yields the lexicographically smallest shortest path
    std::vector<int> dist(n, -1);
    std::deque<int> q{dst};
    dist[dst] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : t.neighbors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    if (dist[src] < 0) return {};
    std::vector<int> path{src};
    int cur = src;
    while (cur != dst) {
        for (int v : t.neighbors(cur)) { // neighbors() is ascending
            if (dist[v] == dist[cur] - 1) {
                path.push_back(v);
                cur = v;
                break;
            }
        }
    }
    return path;
}

std::vector<directed_load> route_demands(const topo::topology_spec& t, const num::matrix& demand_mbps,
                                         double max_pair_rate_mbps) {
    const std::size_t n = t.node_count();
    if (demand_mbps.rows() != n || demand_mbps.cols() != n)
        throw dimension_error("route_demands: demand matrix does not match topology");
    std::vector<directed_load> loads(t.link_count());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = demand_mbps(i, j);
            if (i == j) {
                if (d != 0.0) throw config_error("route_demands: self-demand must be zero");
                continue;
            }
            if (d < 0.0) throw config_error("route_demands: negative demand entry");
            if (d > max_pair_rate_mbps) throw config_error("route_demands: pair demand exceeds per-pair cap");
            if (d == 0.0) continue;
            const std::vector<int> path = bfs_path(t, static_cast<int>(i), static_cast<int>(j));
            if (path.empty()) throw missing_data_error("route_demands: disconnected pair");
            for (std::size_t h = 0; h + 1 < path.size(); ++h) {
                const int u = path[h], v = path[h + 1];
                const int li = t.link_index(u, v);
                if (u < v)
                    loads[li].ab_mbps += d;
                else
                    loads[li].ba_mbps += d;
            }
        }
    }
    return loads;
}

double traffic_series::wall_clock_s(std::size_t idx) const {
    if (idx >= snapshots.size()) throw missing_data_error("traffic_series: snapshot index out of range");
    return snapshots[idx].timestamp_s * day_scale;
}

namespace {

struct link_profile {
    double base_delay_ms = 0.0;
    double base_loss = 0.0;
    double base_err = 0.0;
};

struct link_counters {
    topo::port_counters end_a, end_b;
};

// Packet drain of one direction for one window: sender counters grow by the full
// offered volume, receiver counters only by what survived loss, and corrupted
// packets arrive short a few bytes (that deficit is what the byte-error metric
// picks up).
void drain_direction(double offered_mbps, double interval_s, std::uint32_t packet_bytes, double eff_loss,
                     double base_err, topo::port_counters& sender, topo::port_counters& receiver, rng& r) {
    const double window_bytes = offered_mbps * topo::bytes_per_sec_per_mbps * interval_s;
    const std::uint64_t packets = static_cast<std::uint64_t>(window_bytes / packet_bytes);
    sender.tx_bytes += packets * packet_bytes;
    sender.tx_packets += packets;
    std::uint64_t delivered = 0, delivered_bytes = 0;
    for (std::uint64_t p = 0; p < packets; ++p) {
        const double u = r.uniform();
        if (u < eff_loss) continue; // dropped in the air
        ++delivered;
        if (u < eff_loss + base_err) {
            const std::uint64_t deficit = 1 + r.uniform_index(std::min<std::uint64_t>(packet_bytes - 1, 200));
            delivered_bytes += packet_bytes - deficit; // truncated by corruption
        } else {
            delivered_bytes += packet_bytes;
        }
    }
    receiver.rx_bytes += delivered_bytes;
    receiver.rx_packets += delivered;
}

} // namespace

traffic_series generate_series(const topo::topology_spec& t, const traffic_config& cfg, std::uint64_t seed) {
    cfg.validate();
    t.validate();
    const std::size_t n = t.node_count(), L = t.link_count();

    rng mass_rng(derive_seed(seed, "traffic-masses"));
    rng link_rng(derive_seed(seed, "traffic-link-profiles"));
    rng sim_rng(derive_seed(seed, "traffic-sim"));

    const std::vector<double> masses = jittered_masses(n, cfg.mass_jitter, mass_rng);

    std::vector<link_profile> profiles(L);
    for (auto& p : profiles) {
        p.base_delay_ms = link_rng.uniform(cfg.base_delay_lo_ms, cfg.base_delay_hi_ms);
        p.base_loss = link_rng.uniform(cfg.base_loss_lo, cfg.base_loss_hi);
        p.base_err = link_rng.uniform(cfg.base_err_lo, cfg.base_err_hi);
    }

    std::vector<link_counters> state(L);
    for (std::size_t k = 0; k < L; ++k) {
        state[k].end_a.timestamp_s = 0.0;
        state[k].end_b.timestamp_s = 0.0;
    }

    traffic_series series;
    series.topology_hash = t.content_hash();
    series.seed = seed;
    series.sample_interval_s = cfg.sample_interval_s;
    series.day_scale = cfg.day_scale;
    series.config = cfg;

    num::matrix base_demand = gravity_demand(masses, cfg.total_rate_mbps);
    num::matrix demand(n, n, 0.0);

    for (std::size_t step = 0; step < cfg.sample_count; ++step) {
        const double t_series = static_cast<double>(step) * cfg.sample_interval_s;
        const double hour = std::fmod(t_series * cfg.day_scale, 86400.0) / 3600.0;
        const double factor = diurnal_factor(hour);

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                demand(i, j) = i == j ? 0.0
                                      : base_demand(i, j) * factor *
                                            sim_rng.uniform(1.0 - cfg.demand_jitter, 1.0 + cfg.demand_jitter);

        const std::vector<directed_load> loads = route_demands(t, demand, cfg.max_pair_rate_mbps);

        topo::link_snapshot snap;
        snap.timestamp_s = t_series;
        snap.links.resize(L);

        for (std::size_t k = 0; k < L; ++k) {
            const link_profile& prof = profiles[k];
            link_counters prev = state[k];
            link_counters& cur = state[k];
            cur.end_a.timestamp_s = cur.end_b.timestamp_s = t_series + cfg.sample_interval_s;

            // utilization-driven queueing and loss inflation (shared medium)
            const double offered = loads[k].ab_mbps + loads[k].ba_mbps;
            const double util = offered / t.links[k].capacity_mbps;
            const double eff_delay = prof.base_delay_ms * (1.0 + 0.5 * util * util);
            const double eff_loss = std::min(0.5, prof.base_loss * (1.0 + util * util));

            drain_direction(loads[k].ab_mbps, cfg.sample_interval_s, cfg.packet_bytes, eff_loss,
                            prof.base_err, cur.end_a, cur.end_b, sim_rng);
            drain_direction(loads[k].ba_mbps, cfg.sample_interval_s, cfg.packet_bytes, eff_loss,
                            prof.base_err, cur.end_b, cur.end_a, sim_rng);

            topo::probe_times probes;
            probes.echo_a_ms = sim_rng.uniform(0.2, 1.0);
            probes.echo_b_ms = sim_rng.uniform(0.2, 1.0);
            const double half_echo = (probes.echo_a_ms + probes.echo_b_ms) / 2.0;
            probes.lldp_a_ms = half_echo + eff_delay * (1.0 + sim_rng.uniform(-cfg.probe_jitter, cfg.probe_jitter));
            probes.lldp_b_ms = half_echo + eff_delay * (1.0 + sim_rng.uniform(-cfg.probe_jitter, cfg.probe_jitter));

            snap.links[k] = topo::assemble_link_metrics(t, static_cast<int>(k), prev.end_a, cur.end_a,
                                                        prev.end_b, cur.end_b, probes);
        }
        series.snapshots.push_back(std::move(snap));
    }
    return series;
}

} // namespace sdwnlab::traffic
