#include "sdwnlab/traffic/series_io.hpp"

#include <fstream>
#include <sstream>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::traffic {

void save_series(const std::filesystem::path& p, const traffic_series& series) {
    nlohmann::json header;
    header["format_version"] = 1;
    header["kind"] = "traffic_series";
    header["topology_hash"] = series.topology_hash;
    header["seed"] = series.seed;
    header["sample_interval_s"] = series.sample_interval_s;
    header["day_scale"] = series.day_scale;
    header["sample_count"] = series.snapshots.size();
    header["config"] = series.config.to_json();

    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("series: cannot open for writing: " + p.string());
    out << header.dump() << '\n';
    for (const auto& snap : series.snapshots) {
        nlohmann::json line;
        line["t"] = snap.timestamp_s;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& lm : snap.links)
            rows.push_back({lm.bw_use_mbps, lm.bw_free_mbps, lm.delay_ms, lm.loss_pct, lm.pkt_err_pct,
                            lm.pkt_drop, lm.distance_m});
        line["m"] = rows;
        out << line.dump() << '\n';
    }
    if (!out) throw format_error("series: short write: " + p.string());
}

traffic_series load_series(const std::filesystem::path& p, const topo::topology_spec* expected) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw format_error("series: cannot open: " + p.string());
    std::string line;
    if (!std::getline(in, line)) throw format_error("series: missing header: " + p.string());

    traffic_series series;
    std::size_t declared_count = 0;
    try {
        const nlohmann::json header = nlohmann::json::parse(line);
        if (header.at("format_version").get<int>() != 1) throw format_error("series: unsupported format version");
        if (header.at("kind").get<std::string>() != "traffic_series")
            throw format_error("series: wrong artifact kind");
        series.topology_hash = header.at("topology_hash").get<std::string>();
        series.seed = header.at("seed").get<std::uint64_t>();
        series.sample_interval_s = header.at("sample_interval_s").get<double>();
        series.day_scale = header.at("day_scale").get<double>();
        declared_count = header.at("sample_count").get<std::size_t>();
        series.config = traffic_config::from_json(header.at("config"));
    } catch (const nlohmann::json::exception& e) {
        throw format_error("series: bad header: " + std::string(e.what()));
    }

    if (expected && expected->content_hash() != series.topology_hash)
        throw format_error("series: topology hash mismatch (series built for a different topology)");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        topo::link_snapshot snap;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            snap.timestamp_s = j.at("t").get<double>();
            for (const auto& row : j.at("m")) {
                if (!row.is_array() || row.size() != 7)
                    throw format_error("series: snapshot row must have 7 metric entries");
                topo::link_metrics lm;
                lm.bw_use_mbps = row[0].get<double>();
                lm.bw_free_mbps = row[1].get<double>();
                lm.delay_ms = row[2].get<double>();
                lm.loss_pct = row[3].get<double>();
                lm.pkt_err_pct = row[4].get<double>();
                lm.pkt_drop = row[5].get<double>();
                lm.distance_m = row[6].get<double>();
                snap.links.push_back(lm);
            }
        } catch (const nlohmann::json::exception& e) {
            throw format_error("series: bad snapshot at line " + std::to_string(line_no) + ": " + e.what());
        }
        if (expected && snap.links.size() != expected->link_count())
            throw format_error("series: snapshot link count mismatch at line " + std::to_string(line_no));
        series.snapshots.push_back(std::move(snap));
    }
    if (series.snapshots.size() != declared_count)
        throw format_error("series: header declares " + std::to_string(declared_count) + " snapshots, found " +
                           std::to_string(series.snapshots.size()));
    return series;
}

} // namespace sdwnlab::traffic
