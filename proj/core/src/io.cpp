#include "pfwd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace pfwd {

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(text) + "'");
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_edge_list(std::ostream& os, const Rgg& rgg) {
  const SimDomain& d = rgg.points.domain();
  os << "# n=" << rgg.size() << " m=" << format_shortest(d.side_m)
     << " lambda=" << format_shortest(d.intensity_lambda) << '\n';
  for (const auto& [i, j] : rgg.graph.edges()) os << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& is, EdgeListHeader* header) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::invalid_argument("edge list must start with a '# n=...' header");
  }
  EdgeListHeader h;
  bool have_n = false;
  std::istringstream fields(line.substr(2));
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string_view value = std::string_view(field).substr(eq + 1);
    if (key == "n") {
      h.vertex_count = static_cast<std::size_t>(parse_int(value));
      have_n = true;
    } else if (key == "m") {
      h.side_m = parse_double(value);
    } else if (key == "lambda") {
      h.intensity_lambda = parse_double(value);
    }
  }
  if (!have_n) throw std::invalid_argument("edge list header lacks n=");

  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long a = 0;
    long long b = 0;
    if (!(row >> a >> b)) throw std::invalid_argument("malformed edge line '" + line + "'");
    edges.emplace_back(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
  }
  if (header) *header = h;
  return Graph::from_edges(h.vertex_count, edges);
}

}  // namespace pfwd
