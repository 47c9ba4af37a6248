#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "emstress/error.hpp"
#include "emstress/material.hpp"
#include "emstress/tree.hpp"

namespace emstress {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct IncidentHalfEdge {
  std::size_t segment = 0;
  double width = 0.0;             // m
  double outward_current = 0.0;   // A/m^2, positive when directed away from the point
  double spacing = 0.0;           // effective grid spacing of the segment, m
};

/// One finite-difference unknown. Junction points are shared by every
/// incident segment; interior points belong to exactly one segment.
struct DiscretizedPoint {
  std::size_t index = 0;
  std::optional<std::size_t> node;  // tree node index for shared points
  std::size_t segment = 0;          // host segment (first incident one for nodes)
  double offset = 0.0;              // arc length from the host segment's from_node, m
  double area = 0.0;                // a_i, m^2
  std::vector<IncidentHalfEdge> incident;
};

/// Point indices along one segment, ordered from its from_node to its to_node.
struct SegmentGrid {
  std::vector<std::size_t> points;
  double spacing = 0.0;  // L / intervals
};

struct Discretization {
  std::vector<DiscretizedPoint> points;
  std::vector<SegmentGrid> segments;  // parallel to tree.segments
  std::vector<std::string> segment_ids;
  double target_spacing = 0.0;

  std::size_t size() const { return points.size(); }
};

/// C sigma' = G sigma + B j with C = diag(areas).
struct DiscretizedSystem {
  std::size_t n = 0;
  Vector areas;   // diagonal of C
  SparseMatrix G; // n x n
  SparseMatrix B; // n x m
  Vector j;       // m
  double kappa = 0.0;
  double beta = 0.0;

  Vector drive() const { return B * j; }
};

namespace detail {

inline Discretization discretize_with(const InterconnectTree& tree,
                                      const std::vector<std::size_t>& intervals, double target) {
  const auto index = tree.node_index();
  const std::size_t node_count = tree.nodes.size();
  const std::size_t segment_count = tree.segments.size();

  // adjacency: (segment, other node)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(node_count);
  for (std::size_t s = 0; s < segment_count; ++s) {
    const std::size_t a = index.at(tree.segments[s].from_node);
    const std::size_t b = index.at(tree.segments[s].to_node);
    adjacency[a].emplace_back(s, b);
    adjacency[b].emplace_back(s, a);
  }

  std::size_t root = 0;
  for (std::size_t i = 0; i < node_count; ++i) {
    if (adjacency[i].size() == 1) {
      root = i;
      break;
    }
  }

  Discretization mesh;
  mesh.target_spacing = target;
  mesh.segments.resize(segment_count);
  for (const auto& seg : tree.segments) mesh.segment_ids.push_back(seg.id);

  std::vector<std::optional<std::size_t>> node_point(node_count);
  std::vector<bool> segment_done(segment_count, false);

  auto add_point = [&mesh](std::optional<std::size_t> node, std::size_t segment, double offset) {
    DiscretizedPoint p;
    p.index = mesh.points.size();
    p.node = node;
    p.segment = segment;
    p.offset = offset;
    mesh.points.push_back(std::move(p));
    return mesh.points.back().index;
  };

  node_point[root] = add_point(root, adjacency[root].empty() ? 0 : adjacency[root][0].first, 0.0);
  if (!adjacency[root].empty() && tree.segments[adjacency[root][0].first].to_node == tree.nodes[root].id)
    mesh.points[*node_point[root]].offset = tree.segments[adjacency[root][0].first].length;

  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const auto& [s, v] : adjacency[u]) {
      if (segment_done[s]) continue;
      segment_done[s] = true;
      const auto& seg = tree.segments[s];
      const std::size_t k = intervals[s];
      const double h = seg.length / static_cast<double>(k);
      const bool forward = seg.from_node == tree.nodes[u].id;

      // walk from u towards v
      std::vector<std::size_t> walk;
      walk.reserve(k + 1);
      walk.push_back(*node_point[u]);
      for (std::size_t i = 1; i < k; ++i) {
        const double along = static_cast<double>(i) * h;
        walk.push_back(add_point(std::nullopt, s, forward ? along : seg.length - along));
      }
      node_point[v] = add_point(v, s, forward ? seg.length : 0.0);
      walk.push_back(*node_point[v]);
      queue.push_back(v);

      if (!forward) std::reverse(walk.begin(), walk.end());
      mesh.segments[s].points = std::move(walk);
      mesh.segments[s].spacing = h;
    }
  }

  // Areas and incident half-edges: each half-edge contributes w * h / 2.
  for (std::size_t s = 0; s < segment_count; ++s) {
    const auto& seg = tree.segments[s];
    const auto& grid = mesh.segments[s];
    const std::size_t last = grid.points.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
      auto& p = mesh.points[grid.points[i]];
      if (i > 0) {
        p.incident.push_back({s, seg.width, -seg.current_density, grid.spacing});
        p.area += 0.5 * seg.width * grid.spacing;
      }
      if (i < last) {
        p.incident.push_back({s, seg.width, seg.current_density, grid.spacing});
        p.area += 0.5 * seg.width * grid.spacing;
      }
    }
  }
  return mesh;
}

}  // namespace detail

/// Splits every segment into round(L/dx) equal intervals and shares one
/// point per tree node. Points are numbered segment-major in BFS order from
/// the first end point of the tree.
inline Discretization discretize(const InterconnectTree& tree, double dx) {
  require_valid(tree);
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw validation_error("grid spacing must be finite and > 0");
  std::vector<std::size_t> intervals(tree.segments.size());
  for (std::size_t s = 0; s < tree.segments.size(); ++s) {
    const auto& seg = tree.segments[s];
    if (dx >= seg.length)
      throw validation_error("segment under-resolved: '" + seg.id + "' (" +
                             std::to_string(seg.length * 1e6) + " um) is not longer than dx");
    intervals[s] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(seg.length / dx)));
  }
  return detail::discretize_with(tree, intervals, dx);
}

/// Same point layout, but every segment gets exactly `intervals` intervals
/// (intervals + 1 points) whatever its length.
inline Discretization discretize_by_intervals(const InterconnectTree& tree, std::size_t intervals) {
  require_valid(tree);
  if (intervals < 1) throw validation_error("need at least one interval per segment");
  return detail::discretize_with(tree, std::vector<std::size_t>(tree.segments.size(), intervals),
                                 0.0);
}

/// Stamps the finite-volume balance of every point into C, G and B.
inline DiscretizedSystem assemble(const Discretization& mesh, const InterconnectTree& tree) {
  if (mesh.segments.size() != tree.segments.size() ||
      mesh.segment_ids.size() != tree.segments.size())
    throw validation_error("assembly error: discretization does not belong to this tree");
  for (std::size_t s = 0; s < tree.segments.size(); ++s) {
    const auto& grid = mesh.segments[s];
    const auto& seg = tree.segments[s];
    if (mesh.segment_ids[s] != seg.id || grid.points.size() < 2)
      throw validation_error("assembly error: discretization does not belong to this tree");
    const double expected = seg.length / static_cast<double>(grid.points.size() - 1);
    if (std::abs(grid.spacing - expected) > 1e-12 * seg.length)
      throw validation_error("assembly error: discretization does not belong to this tree");
  }

  const double kappa = compute_kappa(tree.params);
  const double beta = compute_beta(tree.params);
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto m = static_cast<Eigen::Index>(tree.segments.size());

  DiscretizedSystem sys;
  sys.n = mesh.size();
  sys.kappa = kappa;
  sys.beta = beta;
  sys.areas.resize(n);
  for (const auto& p : mesh.points) sys.areas(static_cast<Eigen::Index>(p.index)) = p.area;
  sys.j.resize(m);

  std::vector<Eigen::Triplet<double>> g_entries;
  std::vector<Eigen::Triplet<double>> b_entries;
  g_entries.reserve(4 * mesh.size());
  b_entries.reserve(2 * tree.segments.size());

  // Conductances are rounded to a common power-of-two quantum 2^-44 below the
  // largest one. Every partial row sum is then exactly representable, so
  // G * 1 = 0 holds bit for bit in any summation order. The relative change
  // of a conductance is below 1e-13 * max/min.
  std::vector<double> conductances(tree.segments.size());
  double largest = 0.0;
  for (std::size_t s = 0; s < tree.segments.size(); ++s) {
    const auto& seg = tree.segments[s];
    conductances[s] = seg.kappa.value_or(kappa) * seg.width / mesh.segments[s].spacing;
    largest = std::max(largest, conductances[s]);
  }
  if (!std::isfinite(largest) || !(largest > 0.0))
    throw validation_error("assembly error: conductances must be finite and > 0");
  const double quantum = std::ldexp(1.0, std::ilogb(largest) - 44);
  for (double& g : conductances) g = std::max(quantum, std::round(g / quantum) * quantum);

  for (std::size_t s = 0; s < tree.segments.size(); ++s) {
    const auto& seg = tree.segments[s];
    const auto& grid = mesh.segments[s];
    const double kappa_s = seg.kappa.value_or(kappa);
    const double conductance = conductances[s];
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
      const auto p = static_cast<Eigen::Index>(grid.points[i]);
      const auto q = static_cast<Eigen::Index>(grid.points[i + 1]);
      g_entries.emplace_back(p, p, -conductance);
      g_entries.emplace_back(p, q, conductance);
      g_entries.emplace_back(q, q, -conductance);
      g_entries.emplace_back(q, p, conductance);
    }
    // The drive of interior points cancels pairwise; only the ends remain.
    const double drive = kappa_s * beta * seg.width;
    const auto col = static_cast<Eigen::Index>(s);
    b_entries.emplace_back(static_cast<Eigen::Index>(grid.points.front()), col, drive);
    b_entries.emplace_back(static_cast<Eigen::Index>(grid.points.back()), col, -drive);
    sys.j(col) = seg.current_density;
  }

  sys.G.resize(n, n);
  sys.G.setFromTriplets(g_entries.begin(), g_entries.end());
  sys.B.resize(n, m);
  sys.B.setFromTriplets(b_entries.begin(), b_entries.end());
  return sys;
}

/// Convenience: discretize then assemble.
inline DiscretizedSystem build_system(const InterconnectTree& tree, double dx,
                                      Discretization* mesh_out = nullptr) {
  auto mesh = discretize(tree, dx);
  auto sys = assemble(mesh, tree);
  if (mesh_out) *mesh_out = std::move(mesh);
  return sys;
}

}  // namespace emstress
