#ifndef CROSSING_LAB_IO_HPP
#define CROSSING_LAB_IO_HPP

#include <string>
#include <vector>

#include "crossing_lab/core.hpp"

namespace crossing_lab {

/// Shortest round-trip decimal representation of a double; keeps CSV output
/// byte-identical across runs and worker counts.
std::string format_double(double v);

double parse_double(const std::string& s, const std::string& context);

std::vector<std::string> split_csv_line(const std::string& line);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// FNV-1a 64-bit hex digest, used for config provenance hashes.
std::string fnv1a_hex(const std::string& data);

} // namespace crossing_lab

#endif
