#pragma once

#include <filesystem>

#include "sdwnlab/traffic/traffic_sim.hpp"

namespace sdwnlab::traffic {

// JSONL on disk: line 1 is a header object (format version, topology hash, clock
// metadata, seed, config echo); every further line is one snapshot with its
// per-link metric tuple. Identical inputs serialize to identical bytes.
void save_series(const std::filesystem::path& p, const traffic_series& series);

// Parses and validates a series file. When `expected` is given, the stored
// topology hash and link arity must match it.
traffic_series load_series(const std::filesystem::path& p, const topo::topology_spec* expected = nullptr);

} // namespace sdwnlab::traffic
