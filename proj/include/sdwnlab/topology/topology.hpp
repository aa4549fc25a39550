#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sdwnlab::topo {

struct node_spec {
    int id = 0;
    std::array<double, 3> coords{}; // meters, AP placement in the lab volume
};

struct link_spec {
    int a = 0, b = 0;           // endpoint node ids, stored with a < b
    double capacity_mbps = 0.0; // configured max bandwidth
};

// Static wireless lab layout: AP nodes with 3-D positions plus the managed links
// between them. Everything downstream (traffic, prediction, routing) keys off the
// link order defined here.
struct topology_spec {
    std::string name;
    std::vector<node_spec> nodes;
    std::vector<link_spec> links;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t link_count() const { return links.size(); }

    // index into links for (i,j) in either order; -1 if absent
    int link_index(int i, int j) const;
    bool has_link(int i, int j) const { return link_index(i, j) >= 0; }
    std::vector<int> neighbors(int node) const;

    // throws config_error on self-loops, duplicate/out-of-range links,
    // non-positive capacities, duplicate ids or a disconnected graph
    void validate() const;

    std::string to_json_string() const;
    static topology_spec from_json_string(const std::string& text);
    void save(const std::filesystem::path& p) const;
    static topology_spec load(const std::filesystem::path& p);

    // stable content hash (hex) used to bind series/checkpoints to a topology
    std::string content_hash() const;
};

double node_distance_m(const node_spec& a, const node_spec& b);

// Bundled 14-node / 25-link desk-scale layout. Coordinates are fixed (all link
// distances fall inside the supported 30..110 m radio range); capacities are
// drawn from the 5..40 Mbps lab range using the given seed.
topology_spec build_lab_topology(std::uint64_t seed = 42);

// Small 6-node fixture used by optimality checks and examples.
topology_spec build_small_topology(std::uint64_t seed = 7);

} // namespace sdwnlab::topo
