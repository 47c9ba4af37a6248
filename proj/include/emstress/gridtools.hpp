#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "emstress/error.hpp"
#include "emstress/material.hpp"
#include "emstress/tree.hpp"

namespace emstress {

inline constexpr double kMicron = 1e-6;

// ---------------------------------------------------------------------------
// Fixture generators

struct TChainOptions {
  double spine_length = 10.0 * kMicron;
  double spine_width = 0.4 * kMicron;
  double stub_length = 5.0 * kMicron;
  double stub_width = 0.2 * kMicron;
  // |j| on every segment. Spine signs alternate; each stub carries the sign
  // opposite to the spine segment that follows its junction.
  double current_density = 1e9;
};

/// Straight spine of n_t + 1 horizontal segments with a vertical stub at
/// each of the n_t interior spine nodes: 2 n_t + 1 segments in total.
inline InterconnectTree gen_t_junction_chain(std::size_t n_t, const MaterialParams& params,
                                             const TChainOptions& opt = {}) {
  if (n_t < 1) throw validation_error("a T-junction chain needs at least one junction");
  InterconnectTree tree;
  tree.params = params;
  tree.nodes.reserve(2 * n_t + 2);
  tree.segments.reserve(2 * n_t + 1);

  auto spine_id = [](std::size_t i) { return "S" + std::to_string(i); };
  for (std::size_t i = 0; i <= n_t + 1; ++i) {
    const bool end = i == 0 || i == n_t + 1;
    tree.nodes.push_back({spine_id(i), end ? NodeKind::end_point : NodeKind::intermediate_junction,
                          std::array<double, 2>{static_cast<double>(i) * opt.spine_length, 0.0}});
  }
  for (std::size_t i = 1; i <= n_t; ++i) {
    tree.nodes.push_back({"E" + std::to_string(i), NodeKind::end_point,
                          std::array<double, 2>{static_cast<double>(i) * opt.spine_length,
                                                opt.stub_length}});
  }
  for (std::size_t i = 0; i <= n_t; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    tree.segments.push_back({"H" + std::to_string(i), spine_id(i), spine_id(i + 1),
                             opt.spine_length, opt.spine_width, sign * opt.current_density,
                             std::nullopt});
  }
  for (std::size_t i = 1; i <= n_t; ++i) {
    const double sign = i % 2 == 0 ? -1.0 : 1.0;
    tree.segments.push_back({"V" + std::to_string(i), spine_id(i), "E" + std::to_string(i),
                             opt.stub_length, opt.stub_width, sign * opt.current_density,
                             std::nullopt});
  }
  return tree;
}

/// Seven segments, three T junctions. Widths and current densities are the
/// reference values; lengths were measured off a drawing and are approximate
/// (see data/fixtures/seven_segment.json).
inline InterconnectTree gen_seven_segment(const MaterialParams& params) {
  InterconnectTree tree;
  tree.params = params;
  tree.note = "seven-segment fixture; segment lengths are figure-derived estimates";
  auto at = [](double x_um, double y_um) {
    return std::array<double, 2>{x_um * kMicron, y_um * kMicron};
  };
  tree.nodes = {
      {"N0", NodeKind::end_point, at(0.0, 0.0)},
      {"J1", NodeKind::intermediate_junction, at(30.0, 0.0)},
      {"J2", NodeKind::intermediate_junction, at(50.0, 0.0)},
      {"J3", NodeKind::intermediate_junction, at(75.0, 0.0)},
      {"N4", NodeKind::end_point, at(90.0, 0.0)},
      {"E5", NodeKind::end_point, at(30.0, 10.0)},
      {"E6", NodeKind::end_point, at(50.0, -15.0)},
      {"E7", NodeKind::end_point, at(75.0, 10.0)},
  };
  auto seg = [](const char* id, const char* from, const char* to, double length_um,
                double width_um, double j) {
    return Segment{id, from, to, length_um * kMicron, width_um * kMicron, j, std::nullopt};
  };
  tree.segments = {
      seg("s1", "N0", "J1", 30.0, 0.6, -2e-9),
      seg("s2", "J1", "J2", 20.0, 0.25, -3e-9),
      seg("s3", "J2", "J3", 25.0, 0.25, 1e-9),
      seg("s4", "J3", "N4", 15.0, 0.25, 1e-9),
      seg("s5", "J1", "E5", 10.0, 0.4, 4e-9),
      seg("s6", "J2", "E6", 15.0, 0.4, 1e-9),
      seg("s7", "J3", "E7", 10.0, 0.4, 1e-9),
  };
  return tree;
}

/// One straight wire of length L from x = 0 to x = L.
inline InterconnectTree gen_single_segment(double length, double width, double j,
                                           const MaterialParams& params) {
  InterconnectTree tree;
  tree.params = params;
  tree.nodes = {{"A", NodeKind::end_point, std::array<double, 2>{0.0, 0.0}},
                {"B", NodeKind::end_point, std::array<double, 2>{length, 0.0}}};
  tree.segments = {{"w", "A", "B", length, width, j, std::nullopt}};
  return tree;
}

// ---------------------------------------------------------------------------
// Power grids

struct GridWire {
  int layer = 0;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // m
  double width = 0.0;                              // m
  double current_density = 0.0;                    // A/m^2, positive from (x0,y0) to (x1,y1)

  bool operator==(const GridWire&) const = default;
};

struct GridVia {
  double x = 0.0, y = 0.0;  // m
  int from_layer = 0;
  int to_layer = 0;
  double width = 0.0;  // m

  bool operator==(const GridVia&) const = default;
};

struct PowerGrid {
  std::vector<int> layers;
  std::vector<GridWire> wires;
  std::vector<GridVia> vias;
  MaterialParams params;

  bool operator==(const PowerGrid&) const = default;
};

namespace detail {

// Positions are compared on a 1 pm lattice.
using GridKey = std::pair<std::int64_t, std::int64_t>;

inline std::int64_t lattice(double v) { return std::llround(v * 1e12); }

inline GridKey key_of(double x, double y) { return {lattice(x), lattice(y)}; }

inline bool horizontal(const GridWire& w) { return lattice(w.y0) == lattice(w.y1); }

inline bool on_wire(const GridWire& w, double x, double y) {
  const auto px = lattice(x), py = lattice(y);
  const auto ax = lattice(w.x0), ay = lattice(w.y0), bx = lattice(w.x1), by = lattice(w.y1);
  if (ay == by)
    return py == ay && px >= std::min(ax, bx) && px <= std::max(ax, bx);
  return px == ax && py >= std::min(ay, by) && py <= std::max(ay, by);
}

}  // namespace detail

inline void validate_grid(const PowerGrid& grid) {
  validate_params(grid.params);
  if (grid.layers.empty()) throw validation_error("grid has no layers");
  std::set<int> layers(grid.layers.begin(), grid.layers.end());
  if (layers.size() != grid.layers.size()) throw validation_error("grid lists a layer twice");
  for (std::size_t i = 0; i < grid.wires.size(); ++i) {
    const auto& w = grid.wires[i];
    const std::string name = "wire " + std::to_string(i);
    if (!layers.count(w.layer)) throw validation_error(name + " is on an unknown layer");
    if (!(w.width > 0.0)) throw validation_error(name + " has nonpositive width");
    if (!std::isfinite(w.current_density))
      throw validation_error(name + " has a non-finite current density");
    const bool h = detail::lattice(w.y0) == detail::lattice(w.y1);
    const bool v = detail::lattice(w.x0) == detail::lattice(w.x1);
    if (h == v) throw validation_error(name + " is not a nonzero axis-aligned stripe");
  }
  // Collinear wires may touch end to end but must not overlap.
  for (std::size_t a = 0; a < grid.wires.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.wires.size(); ++b) {
      const auto& wa = grid.wires[a];
      const auto& wb = grid.wires[b];
      if (wa.layer != wb.layer || detail::horizontal(wa) != detail::horizontal(wb)) continue;
      const bool h = detail::horizontal(wa);
      const auto line_a = detail::lattice(h ? wa.y0 : wa.x0);
      const auto line_b = detail::lattice(h ? wb.y0 : wb.x0);
      if (line_a != line_b) continue;
      auto lo = [h](const GridWire& w) {
        return std::min(detail::lattice(h ? w.x0 : w.y0), detail::lattice(h ? w.x1 : w.y1));
      };
      auto hi = [h](const GridWire& w) {
        return std::max(detail::lattice(h ? w.x0 : w.y0), detail::lattice(h ? w.x1 : w.y1));
      };
      if (std::min(hi(wa), hi(wb)) > std::max(lo(wa), lo(wb)))
        throw validation_error("wires " + std::to_string(a) + " and " + std::to_string(b) +
                               " overlap");
    }
  }
  for (std::size_t i = 0; i < grid.vias.size(); ++i) {
    const auto& via = grid.vias[i];
    const std::string name = "via " + std::to_string(i);
    if (!(via.width > 0.0)) throw validation_error(name + " has nonpositive width");
    auto from = std::find(grid.layers.begin(), grid.layers.end(), via.from_layer);
    auto to = std::find(grid.layers.begin(), grid.layers.end(), via.to_layer);
    if (from == grid.layers.end() || to == grid.layers.end())
      throw validation_error(name + " references an unknown layer");
    if (std::abs(std::distance(from, to)) != 1)
      throw validation_error(name + " does not connect adjacent layers");
    for (int layer : {via.from_layer, via.to_layer}) {
      const bool landed = std::any_of(grid.wires.begin(), grid.wires.end(), [&](const GridWire& w) {
        return w.layer == layer && detail::on_wire(w, via.x, via.y);
      });
      if (!landed)
        throw validation_error(name + " does not land on a wire of layer " + std::to_string(layer));
    }
  }
}

/// Splits every layer into interconnect trees.
///
/// Wires are cut at their ends, at same-layer crossings and touches, and at
/// via landings; the pieces become segments. Connected pieces are gathered
/// by BFS seeded in lexicographic (layer, x, y) order. A piece that would
/// close a loop is attached to a fresh end point at the far side instead
/// (a cut point, id suffixed "~cut"), which keeps every output a tree.
inline std::vector<InterconnectTree> decompose_grid(const PowerGrid& grid) {
  validate_grid(grid);
  std::vector<InterconnectTree> trees;

  for (int layer : grid.layers) {
    std::vector<std::size_t> wires;
    for (std::size_t i = 0; i < grid.wires.size(); ++i)
      if (grid.wires[i].layer == layer) wires.push_back(i);

    std::set<detail::GridKey> via_points;
    for (const auto& via : grid.vias)
      if (via.from_layer == layer || via.to_layer == layer)
        via_points.insert(detail::key_of(via.x, via.y));

    struct Piece {
      detail::GridKey from, to;
      std::size_t wire;
      std::size_t part;
    };
    std::vector<Piece> pieces;
    std::map<detail::GridKey, std::array<double, 2>> positions;

    for (std::size_t wi : wires) {
      const auto& w = grid.wires[wi];
      const bool h = detail::horizontal(w);
      // cut coordinates along the wire, in the wire's own direction
      std::vector<std::pair<std::int64_t, std::array<double, 2>>> cuts;
      auto add_cut = [&](double x, double y) {
        const auto along = h ? detail::lattice(x) : detail::lattice(y);
        cuts.push_back({along, {h ? x : w.x0, h ? w.y0 : y}});
      };
      add_cut(w.x0, w.y0);
      add_cut(w.x1, w.y1);
      for (std::size_t oi : wires) {
        if (oi == wi) continue;
        const auto& o = grid.wires[oi];
        for (const auto& p : {std::array<double, 2>{o.x0, o.y0}, std::array<double, 2>{o.x1, o.y1}})
          if (detail::on_wire(w, p[0], p[1])) add_cut(p[0], p[1]);
        if (detail::horizontal(o) != h) {
          const double cx = h ? o.x0 : w.x0;
          const double cy = h ? w.y0 : o.y0;
          if (detail::on_wire(w, cx, cy) && detail::on_wire(o, cx, cy)) add_cut(cx, cy);
        }
      }
      for (const auto& via : grid.vias)
        if ((via.from_layer == layer || via.to_layer == layer) && detail::on_wire(w, via.x, via.y))
          add_cut(via.x, via.y);

      const bool ascending = (h ? detail::lattice(w.x1) - detail::lattice(w.x0)
                                : detail::lattice(w.y1) - detail::lattice(w.y0)) > 0;
      std::sort(cuts.begin(), cuts.end(), [ascending](const auto& a, const auto& b) {
        return ascending ? a.first < b.first : a.first > b.first;
      });
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 cuts.end());
      for (const auto& c : cuts) positions.emplace(detail::key_of(c.second[0], c.second[1]), c.second);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        pieces.push_back({detail::key_of(cuts[c].second[0], cuts[c].second[1]),
                          detail::key_of(cuts[c + 1].second[0], cuts[c + 1].second[1]), wi, c});
      }
    }

    std::map<detail::GridKey, std::vector<std::size_t>> incident;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      incident[pieces[p].from].push_back(p);
      incident[pieces[p].to].push_back(p);
    }

    auto node_name = [layer](const detail::GridKey& key) {
      return "L" + std::to_string(layer) + "_" + std::to_string(key.first) + "_" +
             std::to_string(key.second);
    };

    std::set<detail::GridKey> visited;
    std::vector<bool> piece_used(pieces.size(), false);
    for (const auto& [seed, seed_pieces] : incident) {
      if (visited.count(seed)) continue;
      InterconnectTree tree;
      tree.params = grid.params;
      std::map<std::string, std::size_t> degree;
      std::vector<std::pair<std::string, std::array<double, 2>>> node_order;
      std::set<std::string> via_nodes;
      std::size_t cut_count = 0;

      auto visit = [&](const detail::GridKey& key) {
        visited.insert(key);
        const auto name = node_name(key);
        node_order.push_back({name, positions.at(key)});
        if (via_points.count(key)) via_nodes.insert(name);
      };

      std::deque<detail::GridKey> queue{seed};
      visit(seed);
      while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (std::size_t p : incident[u]) {
          if (piece_used[p]) continue;
          piece_used[p] = true;
          const auto& piece = pieces[p];
          const auto& w = grid.wires[piece.wire];
          const auto v = piece.from == u ? piece.to : piece.from;
          std::string from = node_name(piece.from);
          std::string to = node_name(piece.to);
          if (visited.count(v)) {
            // Closing a loop: give this piece its own end at v.
            std::string cut = node_name(v) + "~cut" + std::to_string(cut_count++);
            node_order.push_back({cut, positions.at(v)});
            (piece.from == v ? from : to) = cut;
          } else {
            visit(v);
            queue.push_back(v);
          }
          const auto& a = positions.at(piece.from);
          const auto& b = positions.at(piece.to);
          const double length = std::hypot(b[0] - a[0], b[1] - a[1]);
          tree.segments.push_back({"L" + std::to_string(layer) + "_w" + std::to_string(piece.wire) +
                                       "_p" + std::to_string(piece.part),
                                   from, to, length, w.width, w.current_density, std::nullopt});
          ++degree[from];
          ++degree[to];
        }
      }

      for (const auto& [name, pos] : node_order) {
        const std::size_t d = degree[name];
        NodeKind kind = d <= 1 ? NodeKind::end_point : NodeKind::intermediate_junction;
        if (via_nodes.count(name)) kind = NodeKind::via_junction;
        tree.nodes.push_back({name, kind, pos});
      }
      trees.push_back(std::move(tree));
    }
  }
  return trees;
}

inline std::size_t tree_size_score(const InterconnectTree& tree) {
  return tree.segments.size() + tree.via_count();
}

/// Index of the tree with the most segments plus vias; lowest index on ties.
inline std::size_t largest_tree_index(const std::vector<InterconnectTree>& trees) {
  if (trees.empty()) throw validation_error("no trees to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < trees.size(); ++i)
    if (tree_size_score(trees[i]) > tree_size_score(trees[best])) best = i;
  return best;
}

inline const InterconnectTree& largest_tree(const std::vector<InterconnectTree>& trees) {
  return trees[largest_tree_index(trees)];
}

/// Two-layer mesh: `rows` horizontal stripes on layer 1, `cols` vertical
/// stripes on layer 2, a via at every crossing, and a short same-layer stub
/// on layer 1 at every other crossing (these form the T junctions).
inline PowerGrid make_synthetic_grid(std::size_t rows, std::size_t cols,
                                     const MaterialParams& params) {
  const double pitch = 20.0 * kMicron;
  const double margin = 10.0 * kMicron;
  const double stub = 4.0 * kMicron;
  const double width_x = (static_cast<double>(cols) - 1.0) * pitch + 2.0 * margin;
  const double width_y = (static_cast<double>(rows) - 1.0) * pitch + 2.0 * margin;

  PowerGrid grid;
  grid.params = params;
  grid.layers = {1, 2};
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = margin + static_cast<double>(r) * pitch;
    const double j = (r % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.25 * static_cast<double>(r % 3)) * 1e9;
    grid.wires.push_back({1, 0.0, y, width_x, y, 0.4 * kMicron, j});
  }
  for (std::size_t c = 0; c < cols; ++c) {
    const double x = margin + static_cast<double>(c) * pitch;
    const double j = (c % 2 == 0 ? -1.0 : 1.0) * (1.0 + 0.25 * static_cast<double>(c % 4)) * 1e9;
    grid.wires.push_back({2, x, 0.0, x, width_y, 0.6 * kMicron, j});
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = margin + static_cast<double>(c) * pitch;
      const double y = margin + static_cast<double>(r) * pitch;
      grid.vias.push_back({x, y, 1, 2, 0.4 * kMicron});
      if ((r + c) % 2 == 0)
        grid.wires.push_back({1, x, y, x, y + stub, 0.2 * kMicron, 5e8});
    }
  }
  return grid;
}

enum class SyntheticGridSize { small, medium, large };

inline PowerGrid make_synthetic_grid(SyntheticGridSize size, const MaterialParams& params) {
  switch (size) {
    case SyntheticGridSize::small: return make_synthetic_grid(4, 4, params);
    case SyntheticGridSize::medium: return make_synthetic_grid(20, 20, params);
    case SyntheticGridSize::large: return make_synthetic_grid(60, 60, params);
  }
  return make_synthetic_grid(4, 4, params);
}

}  // namespace emstress
