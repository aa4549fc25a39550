#include "sdwnlab/common/textio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdwnlab/common/error.hpp"
#include "sdwnlab/common/rng.hpp"

namespace sdwnlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw format_error("cannot open file for reading: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open file for writing: " + p.string());
    out << content;
    if (!out) throw format_error("short write: " + p.string());
}

std::string file_content_hash(const std::filesystem::path& p) {
    const std::string bytes = read_text_file(p);
    std::uint64_t h = fnv1a64(bytes);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

csv_writer::csv_writer(std::vector<std::string> header) : header_(std::move(header)) {}

void csv_writer::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw dimension_error("csv row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string csv_writer::str() const {
    std::ostringstream ss;
    auto emit = [&ss](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) ss << ',';
            ss << cells[i];
        }
        ss << '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return ss.str();
}

void csv_writer::save(const std::filesystem::path& p) const { write_text_file(p, str()); }

} // namespace sdwnlab
