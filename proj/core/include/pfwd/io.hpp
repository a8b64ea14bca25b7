#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pfwd/rgg.hpp"

namespace pfwd {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_shortest(double v);

/// Fixed "%.6g" text used for sweep tables.
std::string format_sig6(double v);

/// Strict parsers: the whole string must be consumed.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
bool parse_bool(std::string_view text);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Edge-list text: header "# n=<count> m=<side> lambda=<intensity>", then
/// one "i j" line per undirected edge with i < j.
void write_edge_list(std::ostream& os, const Rgg& rgg);

struct EdgeListHeader {
  std::size_t vertex_count = 0;
  double side_m = 0.0;
  double intensity_lambda = 0.0;
};

Graph read_edge_list(std::istream& is, EdgeListHeader* header = nullptr);

}  // namespace pfwd
