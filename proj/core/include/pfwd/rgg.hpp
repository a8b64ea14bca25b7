#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pfwd/pointproc.hpp"

namespace pfwd {

using Edge = std::pair<std::int32_t, std::int32_t>;

/// Undirected simple graph in compressed adjacency form. Neighbor lists are
/// sorted ascending.
class Graph {
public:
  Graph() = default;
  Graph(std::vector<std::size_t> offsets, std::vector<std::int32_t> targets);

  /// Builds a graph from an undirected edge list. Duplicate edges are merged;
  /// self-loops and out-of-range endpoints are rejected.
  static Graph from_edges(std::size_t vertex_count, std::span<const Edge> edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const std::int32_t> neighbors(std::size_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Each undirected edge once, as (i, j) with i < j, in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> targets_;
};

enum class Boundary { kFree, kTorus };

/// Uniform bucket grid over the window; cell side is at least r so every
/// neighbor of a point lies in its own or one of the 8 surrounding cells.
struct CellGrid {
  std::size_t cells_per_side = 0;
  double cell_side = 0.0;
  std::vector<std::size_t> cell_start;    // size cells^2 + 1
  std::vector<std::int32_t> cell_points;  // point indices grouped by cell

  std::size_t cell_of(const Point& p, double half_side) const;
  std::span<const std::int32_t> points_in(std::size_t cell) const {
    return {cell_points.data() + cell_start[cell], cell_points.data() + cell_start[cell + 1]};
  }
};

/// Unit-disk graph over a PointSet: i ~ j iff |x_i - x_j| <= r.
struct Rgg {
  PointSet points;
  CellGrid grid;
  Graph graph;
  Boundary boundary = Boundary::kFree;

  std::size_t size() const { return graph.size(); }
  std::size_t source() const { return points.source_index(); }
};

/// Exact cell-list construction. The torus option wraps distances around the
/// window and is only meant for reducing edge effects in limit checks.
Rgg build_rgg(PointSet points, Boundary boundary = Boundary::kFree);

struct ClusterLabeling {
  static constexpr std::int32_t kInactive = -1;

  std::vector<std::int32_t> label;  // component id (a root index) or kInactive
  std::vector<std::int32_t> sizes;  // indexed by component id; 0 for non-ids
  std::int32_t largest_id = kInactive;
  std::size_t component_count = 0;

  bool contains(std::int32_t id) const {
    return id >= 0 && static_cast<std::size_t>(id) < sizes.size() && sizes[id] > 0;
  }
  std::int32_t size_of(std::int32_t id) const { return contains(id) ? sizes[id] : 0; }
  std::int32_t largest_size() const { return size_of(largest_id); }
};

/// Connected components of the subgraph induced by the active points.
/// An empty mask means every point is active; otherwise its length must
/// equal the vertex count.
ClusterLabeling components(const Graph& graph, std::span<const std::uint8_t> active = {});

/// Points of the cluster plus every point adjacent to one of them in the full
/// graph, sorted ascending. Throws std::out_of_range for an unknown id.
std::vector<std::int32_t> extended_cluster(const Graph& graph, const ClusterLabeling& labeling,
                                           std::int32_t cluster_id);

/// |largest component| / vertex count.
double largest_component_fraction(const Graph& graph);

}  // namespace pfwd
