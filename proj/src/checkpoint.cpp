#include "sdwnlab/numcore/checkpoint.hpp"

#include <fstream>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::num {

checkpoint checkpoint::from_views(std::string kind, std::uint64_t seed, nlohmann::json config,
                                  const std::vector<param_view>& views) {
    checkpoint ck;
    ck.kind = std::move(kind);
    ck.seed = seed;
    ck.config = std::move(config);
    for (const auto& pv : views) {
        layer_blob blob;
        blob.name = pv.name;
        blob.rows = pv.rows;
        blob.cols = pv.cols;
        blob.values.resize(pv.count());
        for (std::size_t i = 0; i < pv.count(); ++i) blob.values[i] = static_cast<float>(pv.value[i]);
        ck.layers.push_back(std::move(blob));
    }
    return ck;
}

void checkpoint::restore_into(std::vector<param_view>& views) const {
    if (views.size() != layers.size())
        throw format_error("checkpoint: layer count mismatch (file has " + std::to_string(layers.size()) +
                           ", model has " + std::to_string(views.size()) + ")");
    for (std::size_t k = 0; k < views.size(); ++k) {
        const layer_blob& blob = layers[k];
        param_view& pv = views[k];
        if (blob.name != pv.name || blob.rows != pv.rows || blob.cols != pv.cols)
            throw format_error("checkpoint: layer mismatch at index " + std::to_string(k) + " (file '" +
                               blob.name + "' vs model '" + pv.name + "')");
        for (std::size_t i = 0; i < pv.count(); ++i) pv.value[i] = static_cast<double>(blob.values[i]);
    }
}

void checkpoint::save(const std::filesystem::path& p) const {
    nlohmann::json header;
    header["format_version"] = format_version;
    header["kind"] = kind;
    header["seed"] = seed;
    header["config"] = config;
    nlohmann::json layer_table = nlohmann::json::array();
    for (const auto& blob : layers)
        layer_table.push_back({{"name", blob.name}, {"rows", blob.rows}, {"cols", blob.cols}});
    header["layers"] = layer_table;

    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("checkpoint: cannot open for writing: " + p.string());
    out << header.dump() << '\n';
    for (const auto& blob : layers)
        out.write(reinterpret_cast<const char*>(blob.values.data()),
                  static_cast<std::streamsize>(blob.values.size() * sizeof(float)));
    if (!out) throw format_error("checkpoint: short write: " + p.string());
}

checkpoint checkpoint::load(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw format_error("checkpoint: cannot open: " + p.string());
    std::string header_line;
    if (!std::getline(in, header_line)) throw format_error("checkpoint: missing header line: " + p.string());

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw format_error("checkpoint: bad header JSON: " + std::string(e.what()));
    }

    checkpoint ck;
    try {
        ck.format_version = header.at("format_version").get<int>();
        if (ck.format_version != current_format_version)
            throw format_error("checkpoint: unsupported format version " + std::to_string(ck.format_version));
        ck.kind = header.at("kind").get<std::string>();
        ck.seed = header.at("seed").get<std::uint64_t>();
        ck.config = header.at("config");
        for (const auto& item : header.at("layers")) {
            layer_blob blob;
            blob.name = item.at("name").get<std::string>();
            blob.rows = item.at("rows").get<std::size_t>();
            blob.cols = item.at("cols").get<std::size_t>();
            blob.values.resize(blob.rows * blob.cols);
            ck.layers.push_back(std::move(blob));
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("checkpoint: header missing fields: " + std::string(e.what()));
    }

    for (auto& blob : ck.layers) {
        in.read(reinterpret_cast<char*>(blob.values.data()),
                static_cast<std::streamsize>(blob.values.size() * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(blob.values.size() * sizeof(float)))
            throw format_error("checkpoint: truncated payload for layer " + blob.name);
    }
    char extra;
    if (in.read(&extra, 1)) throw format_error("checkpoint: trailing bytes after declared payload");
    return ck;
}

} // namespace sdwnlab::num
