// Curved triangulations of the unit square with an optional fitted folding
// interface: structured build, uniform red refinement with re-projection of
// interface nodes, and boundary edge classification.

#ifndef FOLDPLATE_MESH_HPP
#define FOLDPLATE_MESH_HPP

#include "foldplate/quadrature.hpp"
#include "foldplate/reference_basis.hpp"
#include "foldplate/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace foldplate {

enum class InterfaceKind { None, StraightX05, Quadratic, Sine };

/// Folding interface description. The curves are graphs x = curve_x(y),
/// y in [0,1]. fit_order selects the polynomial order of the fitted
/// interface approximation (1: vertices on the curve, straight edges;
/// 2: edge geometry nodes on the curve as well).
struct InterfaceSpec {
  InterfaceKind kind = InterfaceKind::None;
  int fit_order = 2;
};

inline double curve_x(InterfaceKind kind, double y) {
  switch (kind) {
    case InterfaceKind::StraightX05:
      return 0.5;
    case InterfaceKind::Quadratic:
      return 2.0 / 3.0 - 2.0 / 3.0 * (y - y * y);
    case InterfaceKind::Sine:
      return 2.0 / 3.0 - std::sin(M_PI * y) / 6.0;
    default:
      throw ConfigError("curve_x: no interface curve defined");
  }
}

inline double curve_mean_x(InterfaceKind kind) {
  switch (kind) {
    case InterfaceKind::StraightX05:
      return 0.5;
    case InterfaceKind::Quadratic:
      return 2.0 / 3.0 - 1.0 / 9.0;
    case InterfaceKind::Sine:
      return 2.0 / 3.0 - 1.0 / (3.0 * M_PI);
    default:
      throw ConfigError("curve_mean_x: no interface curve defined");
  }
}

/// A straight chord reproduces StraightX05 exactly, and a degree-2 edge
/// reproduces the Quadratic curve exactly, so those fits ignore fit_order.
inline bool interface_nodes_on_curve(const InterfaceSpec& spec) {
  return spec.fit_order >= 2 || spec.kind == InterfaceKind::Quadratic ||
         spec.kind == InterfaceKind::StraightX05;
}

enum class EdgeClass { Unclassified, Interior, Interface, Dirichlet, Free };

struct Element {
  std::array<int, 3> vertex_ids;   // CCW
  std::vector<int> node_ids;       // geometry nodes, lattice order
  std::array<int, 3> edge_ids = {-1, -1, -1};
  bool curved = false;
};

/// Oriented mesh edge. The unit normal points from element_plus into
/// element_minus; (v0, v1) is the edge in the plus element's CCW traversal.
struct Edge {
  int v0 = -1, v1 = -1;
  int element_plus = -1;
  int local_edge_plus = -1;
  int element_minus = -1;
  int local_edge_minus = -1;
  EdgeClass cls = EdgeClass::Unclassified;
  double h_s = 0.0;  // arclength

  bool is_boundary() const { return element_minus < 0; }
};

struct Mesh {
  std::vector<Vec2> nodes;  // vertices first, then edge/interior nodes
  int n_vertices = 0;
  std::vector<Element> elements;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> edge_nodes;  // per edge, ordered v0 -> v1
  InterfaceSpec interface_spec;
  int level = 0;
  int geometry_degree = 2;

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  /// Geometry node positions of an element, lattice order.
  std::vector<Vec2> element_nodes(int e) const {
    std::vector<Vec2> out;
    out.reserve(elements[e].node_ids.size());
    for (int id : elements[e].node_ids) out.push_back(nodes[id]);
    return out;
  }

  /// Geometry node positions along an edge (v0, interior nodes, v1).
  std::vector<Vec2> edge_curve_nodes(int e) const {
    std::vector<Vec2> out;
    out.push_back(nodes[edges[e].v0]);
    for (int id : edge_nodes[e]) out.push_back(nodes[id]);
    out.push_back(nodes[edges[e].v1]);
    return out;
  }
};

namespace detail {

// 1D Lagrange basis on uniform nodes 0, 1/k, ..., 1: values and derivative.
struct Lagrange1D {
  explicit Lagrange1D(int k) : k_(k) {
    const int n = k + 1;
    Eigen::MatrixXd vand(n, n);
    for (int i = 0; i < n; ++i) {
      double t = double(i) / k, p = 1.0;
      for (int j = 0; j < n; ++j) {
        vand(i, j) = p;
        p *= t;
      }
    }
    coeffs_ = vand.inverse();
  }

  void eval(double t, std::vector<double>& val, std::vector<double>& der) const {
    const int n = k_ + 1;
    val.assign(n, 0.0);
    der.assign(n, 0.0);
    double p = 1.0, pm = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        val[i] += coeffs_(j, i) * p;
        if (j > 0) der[i] += coeffs_(j, i) * j * pm;
      }
      pm = p;
      p *= t;
    }
  }

 private:
  int k_;
  Eigen::MatrixXd coeffs_;
};

inline const std::array<std::array<int, 2>, 3>& local_edge_vertices() {
  static const std::array<std::array<int, 2>, 3> lv = {{{0, 1}, {1, 2}, {2, 0}}};
  return lv;
}

}  // namespace detail

/// Point and tangent of the polynomial edge curve through the given nodes
/// (uniform parameters on [0,1]).
inline std::pair<Vec2, Vec2> edge_curve_eval(const std::vector<Vec2>& pts,
                                             double t) {
  const int k = static_cast<int>(pts.size()) - 1;
  static std::map<int, detail::Lagrange1D> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, detail::Lagrange1D(k)).first;
  std::vector<double> val, der;
  it->second.eval(t, val, der);
  Vec2 p = Vec2::Zero(), d = Vec2::Zero();
  for (int i = 0; i <= k; ++i) {
    p += val[i] * pts[i];
    d += der[i] * pts[i];
  }
  return {p, d};
}

namespace detail {

struct TopologyInput {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> element_vertices;
  std::set<std::pair<int, int>> interface_pairs;           // (min, max)
  std::map<std::pair<int, int>, EdgeClass> inherited_cls;  // boundary children
  InterfaceSpec spec;
  int k_geo = 2;
  int level = 0;
};

inline Vec2 affine_point(const Vec2& a, const Vec2& b, const Vec2& c,
                         const Vec2& ref) {
  return a + ref.x() * (b - a) + ref.y() * (c - a);
}

inline Mesh build_from_topology(const TopologyInput& in) {
  Mesh mesh;
  mesh.nodes = in.vertices;
  mesh.n_vertices = static_cast<int>(in.vertices.size());
  mesh.interface_spec = in.spec;
  mesh.level = in.level;
  mesh.geometry_degree = in.k_geo;
  const int k = in.k_geo;
  const Lattice& lat = ReferenceBasis::get(k).lattice();
  const bool fit_exact = interface_nodes_on_curve(in.spec);

  // Edges: first traversal claims the plus side.
  std::map<std::pair<int, int>, int> edge_of;
  mesh.elements.resize(in.element_vertices.size());
  for (std::size_t e = 0; e < in.element_vertices.size(); ++e) {
    mesh.elements[e].vertex_ids = in.element_vertices[e];
    for (int le = 0; le < 3; ++le) {
      const auto& lv = local_edge_vertices()[le];
      const int a = in.element_vertices[e][lv[0]];
      const int b = in.element_vertices[e][lv[1]];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge edge;
        edge.v0 = a;
        edge.v1 = b;
        edge.element_plus = static_cast<int>(e);
        edge.local_edge_plus = le;
        edge_of[key] = static_cast<int>(mesh.edges.size());
        mesh.elements[e].edge_ids[le] = edge_of[key];
        mesh.edges.push_back(edge);
      } else {
        Edge& edge = mesh.edges[it->second];
        detail::check_numeric(edge.element_minus < 0 && edge.v0 == b && edge.v1 == a,
                              "non-conforming mesh: bad edge sharing");
        edge.element_minus = static_cast<int>(e);
        edge.local_edge_minus = le;
        mesh.elements[e].edge_ids[le] = it->second;
      }
    }
  }

  // Classes: interface tags, inherited boundary classes, default interior.
  for (auto& edge : mesh.edges) {
    const auto key = std::minmax(edge.v0, edge.v1);
    if (in.interface_pairs.count(key)) {
      detail::check_numeric(!edge.is_boundary(),
                            "interface edge on the domain boundary");
      edge.cls = EdgeClass::Interface;
    } else if (edge.is_boundary()) {
      auto it = in.inherited_cls.find(key);
      edge.cls = it == in.inherited_cls.end() ? EdgeClass::Unclassified : it->second;
    } else {
      edge.cls = EdgeClass::Interior;
    }
  }

  // Interface edges: plus element on the left (normal from Omega_1 into
  // Omega_2, pointing in +x for these y-monotone curves).
  for (auto& edge : mesh.edges) {
    if (edge.cls != EdgeClass::Interface) continue;
    const auto& ev = mesh.elements[edge.element_plus].vertex_ids;
    Vec2 opp = Vec2::Zero();
    for (int v : ev)
      if (v != edge.v0 && v != edge.v1) opp = mesh.nodes[v];
    const Vec2 mid = 0.5 * (mesh.nodes[edge.v0] + mesh.nodes[edge.v1]);
    if (opp.x() > mid.x()) {
      std::swap(edge.element_plus, edge.element_minus);
      std::swap(edge.local_edge_plus, edge.local_edge_minus);
      std::swap(edge.v0, edge.v1);
    }
  }

  // Shared edge geometry nodes.
  mesh.edge_nodes.resize(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& edge = mesh.edges[e];
    const Vec2 pa = mesh.nodes[edge.v0], pb = mesh.nodes[edge.v1];
    const bool on_curve = edge.cls == EdgeClass::Interface && fit_exact &&
                          in.spec.kind != InterfaceKind::None;
    for (int i = 1; i < k; ++i) {
      const double t = double(i) / k;
      Vec2 p;
      if (on_curve) {
        const double y = pa.y() + t * (pb.y() - pa.y());
        p = Vec2(curve_x(in.spec.kind, y), y);
      } else {
        p = pa + t * (pb - pa);
      }
      mesh.edge_nodes[e].push_back(static_cast<int>(mesh.nodes.size()));
      mesh.nodes.push_back(p);
    }
  }

  // Per-element node ids in lattice order; interior nodes are affine images.
  for (auto& el : mesh.elements) {
    el.node_ids.assign(lat.size(), -1);
    for (int v = 0; v < 3; ++v) el.node_ids[lat.vertex_ids[v]] = el.vertex_ids[v];
    for (int le = 0; le < 3; ++le) {
      const int eid = el.edge_ids[le];
      const bool forward = mesh.edges[eid].v0 ==
                           el.vertex_ids[local_edge_vertices()[le][0]];
      const auto& ids = mesh.edge_nodes[eid];
      const int m = static_cast<int>(ids.size());
      for (int i = 0; i < m; ++i)
        el.node_ids[lat.edge_interior[le][i]] = forward ? ids[i] : ids[m - 1 - i];
    }
    for (int idx : lat.interior_ids) {
      const Vec2 p = affine_point(mesh.nodes[el.vertex_ids[0]],
                                  mesh.nodes[el.vertex_ids[1]],
                                  mesh.nodes[el.vertex_ids[2]], lat.nodes[idx]);
      el.node_ids[idx] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(p);
    }
    // curved iff some node leaves its affine position
    el.curved = false;
    for (int idx = 0; idx < lat.size(); ++idx) {
      const Vec2 p = affine_point(mesh.nodes[el.vertex_ids[0]],
                                  mesh.nodes[el.vertex_ids[1]],
                                  mesh.nodes[el.vertex_ids[2]], lat.nodes[idx]);
      if ((mesh.nodes[el.node_ids[idx]] - p).norm() > 1e-13) {
        el.curved = true;
        break;
      }
    }
  }

  // Orientation / inversion check.
  const ReferenceBasis& basis = ReferenceBasis::get(k);
  const QuadratureRule vol_rule = triangle_rule(std::min(2 * k + 2, 10));
  const auto table = [&] {
    std::vector<std::vector<ShapeDeriv>> t;
    t.reserve(vol_rule.size());
    for (const auto& p : vol_rule.points) t.push_back(basis.evaluate(p));
    return t;
  }();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const Vec2 d1 = mesh.nodes[el.vertex_ids[1]] - mesh.nodes[el.vertex_ids[0]];
    const Vec2 d2 = mesh.nodes[el.vertex_ids[2]] - mesh.nodes[el.vertex_ids[0]];
    detail::check_numeric(d1.x() * d2.y() - d1.y() * d2.x() > 0.0,
                          "inverted element " + std::to_string(e));
    if (!el.curved) continue;
    const auto pts = mesh.element_nodes(e);
    for (int q = 0; q < vol_rule.size(); ++q) {
      Mat2 jac = Mat2::Zero();
      for (int n = 0; n < basis.size(); ++n)
        jac += pts[n] * table[q][n].grad.transpose();
      detail::check_numeric(jac.determinant() > 0.0,
                            "inverted curved element " + std::to_string(e));
    }
  }

  // Edge arclengths.
  const QuadratureRule arc_rule = edge_rule(k + 3);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto pts = mesh.edge_curve_nodes(e);
    double len = 0.0;
    for (int q = 0; q < arc_rule.size(); ++q)
      len += arc_rule.weights[q] *
             edge_curve_eval(pts, arc_rule.points[q].x()).second.norm();
    mesh.edges[e].h_s = len;
  }
  return mesh;
}

}  // namespace detail

/// Structured n x n mesh of the unit square, each cell split along its
/// lower-left to upper-right diagonal. For a non-trivial interface the
/// vertex column nearest the curve's mean x is projected horizontally onto
/// the curve, and edge nodes of the fitted chain follow fit_order.
inline Mesh build_structured_mesh(int n, const InterfaceSpec& spec, int k_geo) {
  detail::require(n >= 2, "build_structured_mesh: n must be >= 2");
  detail::require(n % 2 == 0, "build_structured_mesh: n must be even");
  detail::require(k_geo >= 2 && k_geo <= 3,
                  "build_structured_mesh: geometry degree must be 2 or 3");
  detail::require(spec.fit_order == 1 || spec.fit_order == 2,
                  "build_structured_mesh: fit_order must be 1 or 2");

  detail::TopologyInput in;
  in.spec = spec;
  in.k_geo = k_geo;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      in.vertices.emplace_back(double(i) / n, double(j) / n);

  if (spec.kind != InterfaceKind::None) {
    const double mean = curve_mean_x(spec.kind);
    int col = 1;
    for (int i = 2; i < n; ++i)
      if (std::abs(double(i) / n - mean) < std::abs(double(col) / n - mean))
        col = i;
    for (int j = 0; j <= n; ++j) {
      const double y = double(j) / n;
      in.vertices[vid(col, j)] = Vec2(curve_x(spec.kind, y), y);
    }
    for (int j = 0; j < n; ++j)
      in.interface_pairs.insert(std::minmax(vid(col, j), vid(col, j + 1)));
  }

  for (int cy = 0; cy < n; ++cy)
    for (int cx = 0; cx < n; ++cx) {
      const int ll = vid(cx, cy), lr = vid(cx + 1, cy);
      const int ur = vid(cx + 1, cy + 1), ul = vid(cx, cy + 1);
      in.element_vertices.push_back({ll, lr, ur});
      in.element_vertices.push_back({ll, ur, ul});
    }
  return detail::build_from_topology(in);
}

/// Red refinement (1 -> 4). New vertices and edge nodes on the interface
/// chain are re-projected onto the curve according to fit_order; boundary
/// edge classes are inherited by the child edges.
inline Mesh refine_uniform(const Mesh& mesh) {
  detail::TopologyInput in;
  in.spec = mesh.interface_spec;
  in.k_geo = mesh.geometry_degree;
  in.level = mesh.level + 1;
  in.vertices.assign(mesh.nodes.begin(), mesh.nodes.begin() + mesh.n_vertices);

  std::vector<int> mid_of_edge(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const Vec2 a = mesh.nodes[edge.v0], b = mesh.nodes[edge.v1];
    Vec2 p = 0.5 * (a + b);
    if (edge.cls == EdgeClass::Interface) {
      const double y = 0.5 * (a.y() + b.y());
      p = Vec2(curve_x(mesh.interface_spec.kind, y), y);
    }
    mid_of_edge[e] = static_cast<int>(in.vertices.size());
    in.vertices.push_back(p);

    const auto key_a = std::minmax(edge.v0, mid_of_edge[e]);
    const auto key_b = std::minmax(mid_of_edge[e], edge.v1);
    if (edge.cls == EdgeClass::Interface) {
      in.interface_pairs.insert(key_a);
      in.interface_pairs.insert(key_b);
    } else if (edge.is_boundary()) {
      in.inherited_cls[key_a] = edge.cls;
      in.inherited_cls[key_b] = edge.cls;
    }
  }

  for (const auto& el : mesh.elements) {
    const int v0 = el.vertex_ids[0], v1 = el.vertex_ids[1], v2 = el.vertex_ids[2];
    const int m01 = mid_of_edge[el.edge_ids[0]];
    const int m12 = mid_of_edge[el.edge_ids[1]];
    const int m20 = mid_of_edge[el.edge_ids[2]];
    in.element_vertices.push_back({v0, m01, m20});
    in.element_vertices.push_back({m01, v1, m12});
    in.element_vertices.push_back({m20, m12, v2});
    in.element_vertices.push_back({m01, m12, m20});
  }
  return detail::build_from_topology(in);
}

/// Union of axis-aligned boundary segments, used to select the clamped part
/// of the boundary.
struct BoundarySegment {
  int fixed_axis;      // 0: segment on x = fixed_value, 1: on y = fixed_value
  double fixed_value;  // 0 or 1
  double lo, hi;       // range in the free coordinate
};

struct BoundarySpec {
  std::vector<BoundarySegment> segments;

  static BoundarySpec all_boundary() {
    return {{{0, 0.0, 0.0, 1.0}, {0, 1.0, 0.0, 1.0},
             {1, 0.0, 0.0, 1.0}, {1, 1.0, 0.0, 1.0}}};
  }
  static BoundarySpec vertical_sides() {
    return {{{0, 0.0, 0.0, 1.0}, {0, 1.0, 0.0, 1.0}}};
  }
  /// {x >= x0} on the boundary: parts of y=0 and y=1 plus the side x=1.
  static BoundarySpec right_of(double x0) {
    return {{{1, 0.0, x0, 1.0}, {1, 1.0, x0, 1.0}, {0, 1.0, 0.0, 1.0}}};
  }
  static BoundarySpec none() { return {}; }
};

/// Assign Dirichlet/Free classes to boundary edges. An edge must lie fully
/// inside or fully outside the specified segments; partial overlap is an
/// error. Interior edges keep their Interior/Interface classes.
inline void classify_edges(Mesh& mesh, const BoundarySpec& spec) {
  constexpr double tol = 1e-12;
  for (auto& edge : mesh.edges) {
    if (!edge.is_boundary()) continue;
    const Vec2 a = mesh.nodes[edge.v0], b = mesh.nodes[edge.v1];
    bool covered = false, overlap = false;
    for (const auto& seg : spec.segments) {
      const int fa = seg.fixed_axis;
      if (std::abs(a[fa] - seg.fixed_value) > tol ||
          std::abs(b[fa] - seg.fixed_value) > tol)
        continue;
      const auto [lo, hi] = std::minmax(a[1 - fa], b[1 - fa]);
      if (lo >= seg.lo - tol && hi <= seg.hi + tol) covered = true;
      if (hi > seg.lo + tol && lo < seg.hi - tol) overlap = true;
    }
    if (covered)
      edge.cls = EdgeClass::Dirichlet;
    else if (!overlap)
      edge.cls = EdgeClass::Free;
    else
      throw ConfigError(
          "classify_edges: boundary spec does not match edge endpoints");
  }
}

/// True if the point lies left of the interface curve (in Omega_1).
inline bool left_of_interface(const Mesh& mesh, const Vec2& p) {
  return p.x() < curve_x(mesh.interface_spec.kind, p.y());
}

/// For meshes with an interface: does each subdomain own a Dirichlet
/// boundary edge? (first = Omega_1, second = Omega_2)
inline std::pair<bool, bool> subdomains_have_dirichlet(const Mesh& mesh) {
  if (mesh.interface_spec.kind == InterfaceKind::None) return {true, true};
  bool left = false, right = false;
  for (const auto& edge : mesh.edges) {
    if (edge.cls != EdgeClass::Dirichlet) continue;
    const Vec2 mid = 0.5 * (mesh.nodes[edge.v0] + mesh.nodes[edge.v1]);
    (left_of_interface(mesh, mid) ? left : right) = true;
  }
  return {left, right};
}

/// Max diameter over the straight triangles spanned by element vertices.
inline double max_element_diameter(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& el : mesh.elements)
    for (int i = 0; i < 3; ++i) {
      const Vec2 d = mesh.nodes[el.vertex_ids[i]] -
                     mesh.nodes[el.vertex_ids[(i + 1) % 3]];
      h = std::max(h, d.norm());
    }
  return h;
}

}  // namespace foldplate

#endif
