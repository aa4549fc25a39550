#pragma once

#include <stdexcept>
#include <string>

namespace sdwnlab {

// Shape disagreement between operands (matrix ops, layer wiring, adjacency size...).
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// API misuse: backward without forward, step before reset, etc.
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

// NaN/Inf encountered where finite values are required (gradients, metrics).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent user-supplied configuration (unknown keys, out-of-range values).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed persisted artifacts: topology files, snapshot series, checkpoints, manifests.
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Asked for data that is absent (missing link, sentinel metric, unknown node id).
struct missing_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sdwnlab
