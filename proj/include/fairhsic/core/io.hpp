#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"

namespace fairhsic {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << contents;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

} // namespace fairhsic
