#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "tomokit/errors.hpp"

namespace tomokit {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Who produced an artifact and from what configuration.
struct Provenance {
  std::string command_line;
  std::string config;  // canonical text of the effective configuration
  std::string version = kVersion;

  std::string config_hash() const {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char c : config) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  json to_json() const {
    return {{"tool", "tomokit"}, {"version", version}, {"command_line", command_line}, {"config_hash", config_hash()}};
  }

  // Single '#' comment line placed above a CSV header.
  std::string csv_comment() const { return "# provenance " + to_json().dump() + "\n"; }
};

// Shortest text that parses back to the same double, independent of locale.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Writes to a sibling temporary and renames it over the target, so readers
// never see a partial file.
inline void atomic_write(const std::filesystem::path& target, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at '" + target.string() + "'");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tomokit
