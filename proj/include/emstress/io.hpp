#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"

#include "emstress/discretizer.hpp"
#include "emstress/error.hpp"
#include "emstress/gridtools.hpp"
#include "emstress/material.hpp"
#include "emstress/tree.hpp"

// File formats. Lengths, widths and positions are micrometres on disk and
// metres in memory.
//
// Tree file:
//   { "schema": 1, "note": "..." (optional),
//     "params": { "Z_star", "e_charge", "rho", "Omega", "bulk_modulus",
//                 "D0", "Ea", "kB", "T" },                        (SI, all required)
//     "nodes": [ { "id", "kind", "position": [x_um, y_um] (optional) } ],
//     "segments": [ { "id", "from", "to", "length_um", "width_um",
//                     "j_A_per_m2", "kappa_m2_per_s" (optional) } ] }
//
// Grid file:
//   { "schema": 1, "params": {...},
//     "layers": [ int ],
//     "wires": [ { "layer", "x0", "y0", "x1", "y1", "width_um", "j_A_per_m2" } ],
//     "vias":  [ { "x", "y", "from_layer", "to_layer", "width_um" } ] }

namespace emstress::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

// Round to 1e-6 um so generated files print cleanly.
inline double to_um(double metres) { return std::round(metres * 1e12) / 1e6; }
inline double from_um(double microns) { return microns * 1e-6; }

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw validation_error(where + ": missing required field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw validation_error(where + ": field '" + key + "' has the wrong type");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw io_error("write to '" + path + "' failed");
}

}  // namespace detail

inline json params_to_json(const MaterialParams& p) {
  return json{{"Z_star", p.Z_star}, {"e_charge", p.e_charge},         {"rho", p.rho},
              {"Omega", p.Omega},   {"bulk_modulus", p.bulk_modulus}, {"D0", p.D0},
              {"Ea", p.Ea},         {"kB", p.kB},                     {"T", p.T}};
}

inline MaterialParams params_from_json(const json& j) {
  const std::string where = "params";
  MaterialParams p;
  p.Z_star = detail::required<double>(j, "Z_star", where);
  p.e_charge = detail::required<double>(j, "e_charge", where);
  p.rho = detail::required<double>(j, "rho", where);
  p.Omega = detail::required<double>(j, "Omega", where);
  p.bulk_modulus = detail::required<double>(j, "bulk_modulus", where);
  p.D0 = detail::required<double>(j, "D0", where);
  p.Ea = detail::required<double>(j, "Ea", where);
  p.kB = detail::required<double>(j, "kB", where);
  p.T = detail::required<double>(j, "T", where);
  validate_params(p);
  return p;
}

inline json tree_to_json(const InterconnectTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json node{{"id", n.id}, {"kind", to_string(n.kind)}};
    if (n.position)
      node["position"] = {detail::to_um((*n.position)[0]), detail::to_um((*n.position)[1])};
    nodes.push_back(std::move(node));
  }
  json segments = json::array();
  for (const auto& s : tree.segments) {
    json seg{{"id", s.id},
             {"from", s.from_node},
             {"to", s.to_node},
             {"length_um", detail::to_um(s.length)},
             {"width_um", detail::to_um(s.width)},
             {"j_A_per_m2", s.current_density}};
    if (s.kappa) seg["kappa_m2_per_s"] = *s.kappa;
    segments.push_back(std::move(seg));
  }
  json out{{"schema", kSchemaVersion}};
  if (!tree.note.empty()) out["note"] = tree.note;
  out["params"] = params_to_json(tree.params);
  out["nodes"] = std::move(nodes);
  out["segments"] = std::move(segments);
  return out;
}

inline InterconnectTree tree_from_json(const json& j) {
  if (!j.is_object()) throw validation_error("tree file must hold a JSON object");
  InterconnectTree tree;
  if (j.contains("note")) tree.note = detail::required<std::string>(j, "note", "tree");
  tree.params = params_from_json(detail::required<json>(j, "params", "tree"));
  const auto nodes = detail::required<json>(j, "nodes", "tree");
  const auto segments = detail::required<json>(j, "segments", "tree");
  if (!nodes.is_array() || !segments.is_array())
    throw validation_error("tree: 'nodes' and 'segments' must be arrays");
  for (const auto& n : nodes) {
    TreeNode node;
    node.id = detail::required<std::string>(n, "id", "node");
    const auto kind = node_kind_from_string(detail::required<std::string>(n, "kind", "node"));
    if (!kind) throw validation_error("node '" + node.id + "': unknown kind");
    node.kind = *kind;
    if (n.contains("position")) {
      const auto pos = n.at("position");
      if (!pos.is_array() || pos.size() != 2)
        throw validation_error("node '" + node.id + "': position must be [x, y]");
      node.position = std::array<double, 2>{detail::from_um(pos[0].get<double>()),
                                            detail::from_um(pos[1].get<double>())};
    }
    tree.nodes.push_back(std::move(node));
  }
  for (const auto& s : segments) {
    Segment seg;
    seg.id = detail::required<std::string>(s, "id", "segment");
    const std::string where = "segment '" + seg.id + "'";
    seg.from_node = detail::required<std::string>(s, "from", where);
    seg.to_node = detail::required<std::string>(s, "to", where);
    seg.length = detail::from_um(detail::required<double>(s, "length_um", where));
    seg.width = detail::from_um(detail::required<double>(s, "width_um", where));
    seg.current_density = detail::required<double>(s, "j_A_per_m2", where);
    if (s.contains("kappa_m2_per_s")) seg.kappa = detail::required<double>(s, "kappa_m2_per_s", where);
    tree.segments.push_back(std::move(seg));
  }
  return tree;
}

inline InterconnectTree read_tree_file(const std::string& path) {
  return tree_from_json(detail::read_json_file(path));
}

inline void write_tree_file(const std::string& path, const InterconnectTree& tree) {
  detail::write_text_file(path, tree_to_json(tree).dump(2) + "\n");
}

inline json grid_to_json(const PowerGrid& grid) {
  json wires = json::array();
  for (const auto& w : grid.wires) {
    wires.push_back({{"layer", w.layer},
                     {"x0", detail::to_um(w.x0)},
                     {"y0", detail::to_um(w.y0)},
                     {"x1", detail::to_um(w.x1)},
                     {"y1", detail::to_um(w.y1)},
                     {"width_um", detail::to_um(w.width)},
                     {"j_A_per_m2", w.current_density}});
  }
  json vias = json::array();
  for (const auto& v : grid.vias) {
    vias.push_back({{"x", detail::to_um(v.x)},
                    {"y", detail::to_um(v.y)},
                    {"from_layer", v.from_layer},
                    {"to_layer", v.to_layer},
                    {"width_um", detail::to_um(v.width)}});
  }
  return json{{"schema", kSchemaVersion},
              {"params", params_to_json(grid.params)},
              {"layers", grid.layers},
              {"wires", std::move(wires)},
              {"vias", std::move(vias)}};
}

inline PowerGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw validation_error("grid file must hold a JSON object");
  PowerGrid grid;
  grid.params = params_from_json(detail::required<json>(j, "params", "grid"));
  grid.layers = detail::required<std::vector<int>>(j, "layers", "grid");
  const auto wires = detail::required<json>(j, "wires", "grid");
  const auto vias = j.contains("vias") ? j.at("vias") : json::array();
  if (!wires.is_array() || !vias.is_array())
    throw validation_error("grid: 'wires' and 'vias' must be arrays");
  for (const auto& w : wires) {
    GridWire wire;
    wire.layer = detail::required<int>(w, "layer", "wire");
    wire.x0 = detail::from_um(detail::required<double>(w, "x0", "wire"));
    wire.y0 = detail::from_um(detail::required<double>(w, "y0", "wire"));
    wire.x1 = detail::from_um(detail::required<double>(w, "x1", "wire"));
    wire.y1 = detail::from_um(detail::required<double>(w, "y1", "wire"));
    wire.width = detail::from_um(detail::required<double>(w, "width_um", "wire"));
    wire.current_density = detail::required<double>(w, "j_A_per_m2", "wire");
    grid.wires.push_back(wire);
  }
  for (const auto& v : vias) {
    GridVia via;
    via.x = detail::from_um(detail::required<double>(v, "x", "via"));
    via.y = detail::from_um(detail::required<double>(v, "y", "via"));
    via.from_layer = detail::required<int>(v, "from_layer", "via");
    via.to_layer = detail::required<int>(v, "to_layer", "via");
    via.width = detail::from_um(detail::required<double>(v, "width_um", "via"));
    grid.vias.push_back(via);
  }
  validate_grid(grid);
  return grid;
}

inline PowerGrid read_grid_file(const std::string& path) {
  return grid_from_json(detail::read_json_file(path));
}

inline void write_grid_file(const std::string& path, const PowerGrid& grid) {
  detail::write_text_file(path, grid_to_json(grid).dump(2) + "\n");
}

/// Matrix Market coordinate text, 1-based, general real.
inline std::string matrix_market(const SparseMatrix& A) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index col = 0; col < A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(A, col); it; ++it)
      out << it.row() + 1 << ' ' << col + 1 << ' ' << it.value() << '\n';
  return out.str();
}

inline void write_matrix_market(const std::string& path, const SparseMatrix& A) {
  detail::write_text_file(path, matrix_market(A));
}

/// Writes C (as a diagonal matrix), G and B with the given path prefix.
inline void dump_system(const std::string& prefix, const DiscretizedSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.n);
  SparseMatrix C(n, n);
  C.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) C.insert(i, i) = sys.areas(i);
  write_matrix_market(prefix + "C.mtx", C);
  write_matrix_market(prefix + "G.mtx", sys.G);
  write_matrix_market(prefix + "B.mtx", sys.B);
}

}  // namespace emstress::io
