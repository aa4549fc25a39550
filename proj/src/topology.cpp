#include "sdwnlab/topology/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/common/textio.hpp"

namespace sdwnlab::topo {

int topology_spec::link_index(int i, int j) const {
    const int lo = std::min(i, j), hi = std::max(i, j);
    for (std::size_t k = 0; k < links.size(); ++k)
        if (links[k].a == lo && links[k].b == hi) return static_cast<int>(k);
    return -1;
}

std::vector<int> topology_spec::neighbors(int node) const {
    std::vector<int> out;
    for (const auto& l : links) {
        if (l.a == node) out.push_back(l.b);
        if (l.b == node) out.push_back(l.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void topology_spec::validate() const {
    const int n = static_cast<int>(nodes.size());
    if (n < 2) throw config_error("topology: need at least 2 nodes");
    std::set<int> ids;
    for (const auto& nd : nodes) {
        if (nd.id < 0 || nd.id >= n) throw config_error("topology: node ids must be 0..n-1");
        if (!ids.insert(nd.id).second) throw config_error("topology: duplicate node id " + std::to_string(nd.id));
        for (double c : nd.coords)
            if (!std::isfinite(c)) throw config_error("topology: non-finite coordinate on node " + std::to_string(nd.id));
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& l : links) {
        if (l.a >= l.b) throw config_error("topology: links must be stored with a < b");
        if (l.a < 0 || l.b >= n) throw config_error("topology: link endpoint out of range");
        if (!seen.insert({l.a, l.b}).second)
            throw config_error("topology: duplicate link " + std::to_string(l.a) + "-" + std::to_string(l.b));
        if (!(l.capacity_mbps > 0.0)) throw config_error("topology: non-positive capacity on link " +
                                                         std::to_string(l.a) + "-" + std::to_string(l.b));
    }
    // connectivity sweep
    std::vector<char> vis(n, 0);
    std::vector<int> stack{0};
    vis[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : neighbors(u))
            if (!vis[v]) {
                vis[v] = 1;
                stack.push_back(v);
            }
    }
    if (std::count(vis.begin(), vis.end(), 1) != n) throw config_error("topology: graph is disconnected");
}

std::string topology_spec::to_json_string() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["name"] = name;
    nlohmann::json nodes_j = nlohmann::json::array();
    for (const auto& nd : nodes)
        nodes_j.push_back({{"id", nd.id}, {"x", nd.coords[0]}, {"y", nd.coords[1]}, {"z", nd.coords[2]}});
    j["nodes"] = nodes_j;
    nlohmann::json links_j = nlohmann::json::array();
    for (const auto& l : links)
        links_j.push_back({{"a", l.a}, {"b", l.b}, {"capacity_mbps", l.capacity_mbps}});
    j["links"] = links_j;
    return j.dump(2) + "\n";
}

topology_spec topology_spec::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw format_error("topology: bad JSON: " + std::string(e.what()));
    }
    topology_spec t;
    try {
        if (j.at("format_version").get<int>() != 1) throw format_error("topology: unsupported format version");
        t.name = j.value("name", "");
        for (const auto& nd : j.at("nodes")) {
            node_spec ns;
            ns.id = nd.at("id").get<int>();
            ns.coords = {nd.at("x").get<double>(), nd.at("y").get<double>(), nd.at("z").get<double>()};
            t.nodes.push_back(ns);
        }
        for (const auto& l : j.at("links")) {
            link_spec ls;
            ls.a = l.at("a").get<int>();
            ls.b = l.at("b").get<int>();
            ls.capacity_mbps = l.at("capacity_mbps").get<double>();
            t.links.push_back(ls);
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("topology: missing fields: " + std::string(e.what()));
    }
    t.validate();
    return t;
}

void topology_spec::save(const std::filesystem::path& p) const { write_text_file(p, to_json_string()); }

topology_spec topology_spec::load(const std::filesystem::path& p) {
    return from_json_string(read_text_file(p));
}

std::string topology_spec::content_hash() const {
    const std::uint64_t h = fnv1a64(to_json_string());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double node_distance_m(const node_spec& a, const node_spec& b) {
    const double dx = a.coords[0] - b.coords[0];
    const double dy = a.coords[1] - b.coords[1];
    const double dz = a.coords[2] - b.coords[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

topology_spec build_lab_topology(std::uint64_t seed) {
    // Fixed embedding chosen so every link stays inside the usable radio range.
    static constexpr double coords[14][3] = {
        {68.83, 55.84, 20.59},  {41.33, 126.77, 23.04}, {4.32, 122.37, 3.68},   {104.91, 69.17, 3.72},
        {111.90, 166.79, 8.86}, {93.12, 130.66, 19.59}, {119.40, 126.83, 19.40}, {43.37, 167.42, 12.66},
        {78.79, 79.72, 13.75},  {160.39, 71.47, 15.77}, {139.79, 84.44, 21.46},  {56.93, 36.46, 10.21},
        {172.04, 109.80, 12.28}, {127.62, 104.29, 12.37}};
    static constexpr int edges[25][2] = {{0, 1}, {0, 2}, {0, 3},  {1, 2},  {1, 7},  {2, 5},  {3, 4},
                                         {3, 10}, {4, 5}, {4, 6},  {5, 9},  {5, 13}, {6, 7},  {7, 8},
                                         {8, 9},  {8, 11}, {8, 12}, {10, 11}, {10, 12}, {11, 13}, {12, 13},
                                         {1, 3},  {6, 9}, {2, 8},  {4, 10}};
    topology_spec t;
    t.name = "lab14";
    for (int i = 0; i < 14; ++i) t.nodes.push_back({i, {coords[i][0], coords[i][1], coords[i][2]}});
    rng r(derive_seed(seed, "lab14-capacities"));
    for (const auto& e : edges) {
        link_spec l;
        l.a = std::min(e[0], e[1]);
        l.b = std::max(e[0], e[1]);
        l.capacity_mbps = r.uniform(5.0, 40.0);
        t.links.push_back(l);
    }
    std::sort(t.links.begin(), t.links.end(),
              [](const link_spec& x, const link_spec& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    t.validate();
    return t;
}

topology_spec build_small_topology(std::uint64_t seed) {
    // 6 nodes, 8 links: a ladder with a diagonal, small enough to enumerate paths
    topology_spec t;
    t.name = "small6";
    static constexpr double coords[6][3] = {{0, 0, 5},  {70, 0, 5},  {140, 0, 5},
                                            {0, 60, 5}, {70, 60, 5}, {140, 60, 5}};
    for (int i = 0; i < 6; ++i) t.nodes.push_back({i, {coords[i][0], coords[i][1], coords[i][2]}});
    static constexpr int edges[8][2] = {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}, {1, 3}};
    rng r(derive_seed(seed, "small6-capacities"));
    for (const auto& e : edges) t.links.push_back({e[0], e[1], r.uniform(5.0, 40.0)});
    std::sort(t.links.begin(), t.links.end(),
              [](const link_spec& x, const link_spec& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    t.validate();
    return t;
}

} // namespace sdwnlab::topo
