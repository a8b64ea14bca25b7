#include "pfwd/rgg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pfwd/union_find.hpp"

namespace pfwd {

Graph::Graph(std::vector<std::size_t> offsets, std::vector<std::int32_t> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {
  if (!offsets_.empty() && offsets_.back() != targets_.size()) {
    throw std::invalid_argument("graph offsets do not match target count");
  }
}

Graph Graph::from_edges(std::size_t vertex_count, std::span<const Edge> edges) {
  std::vector<std::vector<std::int32_t>> adj(vertex_count);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= vertex_count ||
        static_cast<std::size_t>(b) >= vertex_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (a == b) throw std::invalid_argument("self-loops are not allowed");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> offsets(vertex_count + 1, 0);
  std::vector<std::int32_t> targets;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    targets.insert(targets.end(), list.begin(), list.end());
    offsets[v + 1] = targets.size();
  }
  return Graph(std::move(offsets), std::move(targets));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t v = 0; v < size(); ++v) {
    for (auto w : neighbors(v)) {
      if (static_cast<std::size_t>(w) > v) out.emplace_back(static_cast<std::int32_t>(v), w);
    }
  }
  return out;
}

std::size_t CellGrid::cell_of(const Point& p, double half_side) const {
  auto index = [&](double c) {
    const double t = std::floor((c + half_side) / cell_side);
    if (t <= 0.0) return std::size_t{0};
    return std::min(cells_per_side - 1, static_cast<std::size_t>(t));
  };
  return index(p.y) * cells_per_side + index(p.x);
}

namespace {

CellGrid make_grid(const PointSet& points) {
  const SimDomain& d = points.domain();
  CellGrid grid;
  grid.cells_per_side = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(d.side_m / d.radius_r)));
  grid.cell_side = d.side_m / static_cast<double>(grid.cells_per_side);

  const double half = 0.5 * d.side_m;
  const std::size_t cell_count = grid.cells_per_side * grid.cells_per_side;
  std::vector<std::size_t> cell_index(points.size());
  grid.cell_start.assign(cell_count + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell_index[i] = grid.cell_of(points.coords()[i], half);
    ++grid.cell_start[cell_index[i] + 1];
  }
  for (std::size_t c = 0; c < cell_count; ++c) grid.cell_start[c + 1] += grid.cell_start[c];

  grid.cell_points.resize(points.size());
  std::vector<std::size_t> fill(grid.cell_start.begin(), grid.cell_start.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    grid.cell_points[fill[cell_index[i]]++] = static_cast<std::int32_t>(i);
  }
  return grid;
}

}  // namespace

Rgg build_rgg(PointSet points, Boundary boundary) {
  CellGrid grid = make_grid(points);
  const SimDomain& d = points.domain();
  const double half = 0.5 * d.side_m;
  const double r2 = d.radius_r * d.radius_r;
  const auto cells = static_cast<std::ptrdiff_t>(grid.cells_per_side);
  const bool torus = boundary == Boundary::kTorus;
  const auto& xy = points.coords();

  auto dist2 = [&](const Point& a, const Point& b) {
    double dx = std::fabs(a.x - b.x);
    double dy = std::fabs(a.y - b.y);
    if (torus) {
      dx = std::min(dx, d.side_m - dx);
      dy = std::min(dy, d.side_m - dy);
    }
    return dx * dx + dy * dy;
  };

  std::vector<std::size_t> offsets(points.size() + 1, 0);
  std::vector<std::int32_t> targets;
  targets.reserve(points.size() * 8);
  std::vector<std::int32_t> scratch;
  std::vector<std::size_t> nearby;

  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t home = grid.cell_of(xy[i], half);
    const auto hx = static_cast<std::ptrdiff_t>(home % grid.cells_per_side);
    const auto hy = static_cast<std::ptrdiff_t>(home / grid.cells_per_side);

    nearby.clear();
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        std::ptrdiff_t cx = hx + dx;
        std::ptrdiff_t cy = hy + dy;
        if (torus) {
          cx = (cx + cells) % cells;
          cy = (cy + cells) % cells;
        } else if (cx < 0 || cy < 0 || cx >= cells || cy >= cells) {
          continue;
        }
        nearby.push_back(static_cast<std::size_t>(cy * cells + cx));
      }
    }
    if (torus && cells < 3) {
      std::sort(nearby.begin(), nearby.end());
      nearby.erase(std::unique(nearby.begin(), nearby.end()), nearby.end());
    }

    scratch.clear();
    for (auto c : nearby) {
      for (auto j : grid.points_in(c)) {
        if (static_cast<std::size_t>(j) != i && dist2(xy[i], xy[j]) <= r2) scratch.push_back(j);
      }
    }
    std::sort(scratch.begin(), scratch.end());
    targets.insert(targets.end(), scratch.begin(), scratch.end());
    offsets[i + 1] = targets.size();
  }

  Graph graph(std::move(offsets), std::move(targets));
  return Rgg{std::move(points), std::move(grid), std::move(graph), boundary};
}

ClusterLabeling components(const Graph& graph, std::span<const std::uint8_t> active) {
  const std::size_t n = graph.size();
  if (!active.empty() && active.size() != n) {
    throw std::invalid_argument("activity mask length must equal the vertex count");
  }
  auto is_active = [&](std::size_t v) { return active.empty() || active[v] != 0; };

  UnionFind uf(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_active(v)) continue;
    for (auto w : graph.neighbors(v)) {
      if (static_cast<std::size_t>(w) > v && is_active(w)) uf.unite(static_cast<std::int32_t>(v), w);
    }
  }

  ClusterLabeling out;
  out.label.assign(n, ClusterLabeling::kInactive);
  out.sizes.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_active(v)) continue;
    const std::int32_t root = uf.find(static_cast<std::int32_t>(v));
    out.label[v] = root;
    if (out.sizes[root]++ == 0) ++out.component_count;
  }
  for (std::size_t id = 0; id < n; ++id) {
    if (out.sizes[id] > out.size_of(out.largest_id)) out.largest_id = static_cast<std::int32_t>(id);
  }
  return out;
}

std::vector<std::int32_t> extended_cluster(const Graph& graph, const ClusterLabeling& labeling,
                                           std::int32_t cluster_id) {
  if (!labeling.contains(cluster_id)) throw std::out_of_range("unknown cluster id");
  std::vector<std::uint8_t> member(graph.size(), 0);
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (labeling.label[v] != cluster_id) continue;
    member[v] = 1;
    for (auto w : graph.neighbors(v)) member[w] = 1;
  }
  std::vector<std::int32_t> out;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (member[v]) out.push_back(static_cast<std::int32_t>(v));
  }
  return out;
}

double largest_component_fraction(const Graph& graph) {
  if (graph.size() == 0) throw std::invalid_argument("graph is empty");
  const ClusterLabeling labels = components(graph);
  return static_cast<double>(labels.largest_size()) / static_cast<double>(graph.size());
}

}  // namespace pfwd
