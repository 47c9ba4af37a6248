#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "emstress/error.hpp"
#include "emstress/material.hpp"

namespace emstress {

enum class NodeKind {
  end_point,
  mid_segment_anchor,
  intermediate_junction,
  via_junction,
};

inline const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::end_point: return "end_point";
    case NodeKind::mid_segment_anchor: return "mid_segment_anchor";
    case NodeKind::intermediate_junction: return "intermediate_junction";
    case NodeKind::via_junction: return "via_junction";
  }
  return "unknown";
}

inline std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  if (s == "end_point") return NodeKind::end_point;
  if (s == "mid_segment_anchor") return NodeKind::mid_segment_anchor;
  if (s == "intermediate_junction") return NodeKind::intermediate_junction;
  if (s == "via_junction") return NodeKind::via_junction;
  return std::nullopt;
}

struct TreeNode {
  std::string id;
  NodeKind kind = NodeKind::end_point;
  std::optional<std::array<double, 2>> position;  // m, reporting only

  bool operator==(const TreeNode&) const = default;
};

/// A straight wire piece between two nodes. Positive current density drives
/// atomic flux from `from_node` towards `to_node`.
struct Segment {
  std::string id;
  std::string from_node;
  std::string to_node;
  double length = 0.0;           // m
  double width = 0.0;            // m
  double current_density = 0.0;  // A/m^2, signed
  std::optional<double> kappa;   // per-segment diffusivity override, m^2/s

  bool operator==(const Segment&) const = default;
};

struct InterconnectTree {
  std::vector<TreeNode> nodes;
  std::vector<Segment> segments;
  MaterialParams params;
  std::string note;  // free text carried through files

  bool operator==(const InterconnectTree&) const = default;

  std::unordered_map<std::string, std::size_t> node_index() const {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);
    return index;
  }

  std::size_t via_count() const {
    std::size_t count = 0;
    for (const auto& n : nodes)
      if (n.kind == NodeKind::via_junction) ++count;
    return count;
  }

  /// Number of nodes joining three or more segments.
  std::size_t t_junction_count() const {
    std::unordered_map<std::string, std::size_t> degree;
    for (const auto& s : segments) {
      ++degree[s.from_node];
      ++degree[s.to_node];
    }
    std::size_t count = 0;
    for (const auto& [id, d] : degree)
      if (d >= 3) ++count;
    return count;
  }
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

namespace detail {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Structural and physical checks. Never throws; problems are reported.
inline ValidationReport validate_tree(const InterconnectTree& tree) {
  ValidationReport report;
  try {
    validate_params(tree.params);
  } catch (const Error& e) {
    report.errors.emplace_back(e.what());
  }

  if (tree.nodes.empty()) {
    report.errors.emplace_back("tree has no nodes");
    return report;
  }
  if (tree.segments.empty()) report.errors.emplace_back("tree has no segments");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!index.emplace(tree.nodes[i].id, i).second)
      report.errors.push_back("duplicate node id '" + tree.nodes[i].id + "'");
  }
  std::unordered_set<std::string> segment_ids;
  for (const auto& s : tree.segments) {
    if (!segment_ids.insert(s.id).second)
      report.errors.push_back("duplicate segment id '" + s.id + "'");
  }

  detail::DisjointSets sets(tree.nodes.size());
  std::vector<std::size_t> degree(tree.nodes.size(), 0);
  // Outward-signed width-weighted current at each node.
  std::vector<double> net_current(tree.nodes.size(), 0.0);
  std::vector<double> abs_current(tree.nodes.size(), 0.0);
  bool cyclic = false;
  bool dangling = false;

  for (const auto& s : tree.segments) {
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      report.errors.push_back("segment '" + s.id + "' has nonpositive length");
    if (!(s.width > 0.0) || !std::isfinite(s.width))
      report.errors.push_back("segment '" + s.id + "' has nonpositive width");
    if (!std::isfinite(s.current_density))
      report.errors.push_back("segment '" + s.id + "' has non-finite current density");
    if (s.kappa && (!(*s.kappa > 0.0) || !std::isfinite(*s.kappa)))
      report.errors.push_back("segment '" + s.id + "' has nonpositive diffusivity override");
    if (s.from_node == s.to_node) {
      report.errors.push_back("segment '" + s.id + "' starts and ends at the same node");
      cyclic = true;
      continue;
    }
    auto from = index.find(s.from_node);
    auto to = index.find(s.to_node);
    if (from == index.end() || to == index.end()) {
      report.errors.push_back("segment '" + s.id + "' references a missing node");
      dangling = true;
      continue;
    }
    ++degree[from->second];
    ++degree[to->second];
    const double wj = s.width * s.current_density;
    net_current[from->second] += wj;
    net_current[to->second] -= wj;
    abs_current[from->second] += std::abs(wj);
    abs_current[to->second] += std::abs(wj);
    if (!sets.unite(from->second, to->second)) cyclic = true;
  }

  if (cyclic) report.errors.emplace_back("graph is not a tree");
  if (!dangling) {
    const std::size_t root = sets.find(0);
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
      if (sets.find(i) != root) {
        report.errors.emplace_back("graph is not connected");
        break;
      }
    }
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    const std::size_t d = degree[i];
    bool consistent = true;
    switch (node.kind) {
      case NodeKind::end_point: consistent = d == 1; break;
      case NodeKind::mid_segment_anchor: consistent = d == 2; break;
      case NodeKind::intermediate_junction: consistent = d >= 2; break;
      // The via itself supplies the out-of-plane branch.
      case NodeKind::via_junction: consistent = d >= 1; break;
    }
    if (!consistent)
      report.errors.push_back("node '" + node.id + "' of kind " + to_string(node.kind) +
                              " has degree " + std::to_string(d));

    const bool in_plane_junction =
        node.kind == NodeKind::intermediate_junction || node.kind == NodeKind::mid_segment_anchor;
    if (in_plane_junction && abs_current[i] > 0.0 &&
        std::abs(net_current[i]) > 1e-9 * abs_current[i]) {
      report.warnings.push_back("currents at node '" + node.id + "' do not balance");
    }
  }
  return report;
}

/// Throws a validation error carrying every reported problem.
inline void require_valid(const InterconnectTree& tree) {
  const auto report = validate_tree(tree);
  if (report.ok()) return;
  std::string message = "invalid tree:";
  for (const auto& e : report.errors) message += " " + e + ";";
  throw validation_error(message);
}

}  // namespace emstress
