#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdwnlab/numcore/layers.hpp"

namespace sdwnlab::num {

// Model checkpoint file = one JSON header line (format version, kind, seed, config
// echo, ordered layer table with shapes) followed by raw little-endian float32
// payloads in the declared order. Values are stored f32; compute stays double.
// save(load(f)) reproduces f byte for byte.
struct checkpoint {
    static constexpr int current_format_version = 1;

    int format_version = current_format_version;
    std::string kind;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();

    struct layer_blob {
        std::string name;
        std::size_t rows = 0, cols = 0;
        std::vector<float> values;
    };
    std::vector<layer_blob> layers;

    static checkpoint from_views(std::string kind, std::uint64_t seed, nlohmann::json config,
                                 const std::vector<param_view>& views);
    // copies stored values into matching views; name/shape mismatch -> format_error
    void restore_into(std::vector<param_view>& views) const;

    void save(const std::filesystem::path& p) const;
    static checkpoint load(const std::filesystem::path& p);
};

} // namespace sdwnlab::num
