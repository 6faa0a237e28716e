#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace heartid {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Fixed-format float printing; keeps artifacts byte-stable across runs.
std::string fmt_double(double v, int precision = 6);
// Shortest round-trip representation, for stores that are read back.
std::string fmt_double_exact(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);
void make_dirs(const std::string& path);

// Comment header stamped into every artifact file:
//   # tool=heartid 0.1.0
//   # seed=7
//   # config=0123456789abcdef
struct ArtifactStamp {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string header_lines() const;
};

}  // namespace heartid
