#pragma once

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "pubfin/error.hpp"

namespace pubfin {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    return in;
}

/// Renders through `body` into memory, then writes the file in one go.
inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buf;
    body(buf);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    out << buf.str();
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

inline std::string read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace pubfin
