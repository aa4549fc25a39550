#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sdwnlab {

// Fixed-format double -> text used in every CSV we emit, so identical values always
// serialize to identical bytes (determinism contract for output files).
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& content);

// FNV-1a of a file's bytes as 16 lowercase hex chars (manifest content hashes).
std::string file_content_hash(const std::filesystem::path& p);

// Minimal CSV emitter: caller supplies header once and rows of pre-formatted cells.
class csv_writer {
public:
    explicit csv_writer(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void save(const std::filesystem::path& p) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace sdwnlab
