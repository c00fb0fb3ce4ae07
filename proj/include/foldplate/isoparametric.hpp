// Isoparametric geometry maps: derivatives of the element map up to third
// order, derivatives of the inverse map, Newton point location, and edge
// data (arclength weights and unit normals) transported by Nanson's formula.

#ifndef FOLDPLATE_ISOPARAMETRIC_HPP
#define FOLDPLATE_ISOPARAMETRIC_HPP

#include "foldplate/mesh.hpp"
#include "foldplate/quadrature.hpp"
#include "foldplate/reference_basis.hpp"
#include "foldplate/types.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace foldplate {

/// Derivatives of the geometry map psi_T at one reference point.
struct MapDerivatives {
  Vec2 point = Vec2::Zero();
  Mat2 jacobian = Mat2::Zero();
  std::array<Mat2, 2> d2 = {Mat2::Zero(), Mat2::Zero()};  // d2[a](b,c)
  std::array<Ten3, 2> d3;                                 // d3[a](b,c,d)
  bool affine = false;

  double det() const { return jacobian.determinant(); }
};

/// Derivatives of the inverse map psi_T^{-1} at the matched physical point.
struct InverseMapDerivatives {
  Mat2 jac_inv = Mat2::Zero();                  // A(a,i) = d ref_a / d x_i
  std::array<Mat2, 2> d2 = {Mat2::Zero(), Mat2::Zero()};  // B[a](i,j)
  std::array<Ten3, 2> d3;                                 // C[a](i,j,k)
};

/// Evaluate psi_T and its derivatives from tabulated reference shapes.
inline MapDerivatives map_derivatives_from_table(
    const std::vector<Vec2>& nodes, const std::vector<ShapeDeriv>& shapes,
    const Vec2& ref_point, bool curved) {
  MapDerivatives md;
  md.affine = !curved;
  const int n = static_cast<int>(nodes.size());
  for (int m = 0; m < n; ++m) {
    const auto& s = shapes[m];
    md.point += s.value * nodes[m];
    md.jacobian += nodes[m] * s.grad.transpose();
    if (curved) {
      for (int a = 0; a < 2; ++a) {
        md.d2[a] += nodes[m][a] * s.hess;
        md.d3[a] += s.third * nodes[m][a];
      }
    }
  }
  (void)ref_point;
  detail::check_numeric(md.det() > 0.0,
                        "map_derivatives: non-positive Jacobian determinant");
  return md;
}

/// Exact derivatives of the geometry map of an element at a reference point.
inline MapDerivatives map_derivatives(const Mesh& mesh, int element,
                                      const Vec2& ref_point) {
  const ReferenceBasis& basis = ReferenceBasis::get(mesh.geometry_degree);
  return map_derivatives_from_table(mesh.element_nodes(element),
                                    basis.evaluate(ref_point), ref_point,
                                    mesh.elements[element].curved);
}

/// Derivatives of psi^{-1} by differentiating psi(psi^{-1}(x)) = x: each
/// order is a linear solve against the Jacobian with right-hand sides built
/// from the lower orders.
inline InverseMapDerivatives inverse_map_derivatives(const MapDerivatives& md) {
  detail::check_numeric(std::abs(md.det()) > 1e-300,
                        "inverse_map_derivatives: singular Jacobian");
  InverseMapDerivatives inv;
  const Mat2 A = md.jacobian.inverse();
  inv.jac_inv = A;
  if (md.affine) return inv;

  // B[a](i,j) = -A(a,m) * D2psi[m](p,q) A(p,i) A(q,j)
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Vec2 rhs = Vec2::Zero();
      for (int m = 0; m < 2; ++m)
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q)
            rhs[m] += md.d2[m](p, q) * A(p, i) * A(q, j);
      for (int a = 0; a < 2; ++a) {
        double v = 0.0;
        for (int m = 0; m < 2; ++m) v += A(a, m) * rhs[m];
        inv.d2[a](i, j) = -v;
      }
    }

  // C[a](i,j,l) = -A(a,m) * [ D3psi[m](p,q,r) A(p,i)A(q,j)A(r,l)
  //   + D2psi[m](p,q) (B[q](j,l)A(p,i) + B[p](i,l)A(q,j) + B[p](i,j)A(q,l)) ]
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        Vec2 rhs = Vec2::Zero();
        for (int m = 0; m < 2; ++m) {
          double acc = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) {
              for (int r = 0; r < 2; ++r)
                acc += md.d3[m](p, q, r) * A(p, i) * A(q, j) * A(r, l);
              acc += md.d2[m](p, q) *
                     (inv.d2[q](j, l) * A(p, i) + inv.d2[p](i, l) * A(q, j) +
                      inv.d2[p](i, j) * A(q, l));
            }
          rhs[m] = acc;
        }
        for (int a = 0; a < 2; ++a) {
          double v = 0.0;
          for (int m = 0; m < 2; ++m) v += A(a, m) * rhs[m];
          inv.d3[a](i, j, l) = -v;
        }
      }
  return inv;
}

/// Newton inversion of the geometry map; returns the reference point or
/// nothing if the iteration leaves the element or fails to converge.
inline std::optional<Vec2> invert_map(const Mesh& mesh, int element,
                                      const Vec2& x, double tol = 1e-13) {
  Vec2 ref(1.0 / 3.0, 1.0 / 3.0);
  for (int it = 0; it < 50; ++it) {
    const ReferenceBasis& basis = ReferenceBasis::get(mesh.geometry_degree);
    const auto shapes = basis.evaluate(ref);
    Vec2 pos = Vec2::Zero();
    Mat2 jac = Mat2::Zero();
    const auto nodes = mesh.element_nodes(element);
    for (int m = 0; m < basis.size(); ++m) {
      pos += shapes[m].value * nodes[m];
      jac += nodes[m] * shapes[m].grad.transpose();
    }
    const Vec2 res = pos - x;
    if (res.norm() < tol) return ref;
    if (std::abs(jac.determinant()) < 1e-300) return std::nullopt;
    ref -= jac.inverse() * res;
    if (ref.x() < -0.5 || ref.y() < -0.5 || ref.x() + ref.y() > 1.5)
      return std::nullopt;
  }
  return std::nullopt;
}

/// Locate a physical point: element id and reference coordinates.
inline std::pair<int, Vec2> locate_point(const Mesh& mesh, const Vec2& x) {
  constexpr double tol = 1e-10;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const Vec2 a = mesh.nodes[el.vertex_ids[0]];
    const Vec2 b = mesh.nodes[el.vertex_ids[1]];
    const Vec2 c = mesh.nodes[el.vertex_ids[2]];
    Mat2 m;
    m.col(0) = b - a;
    m.col(1) = c - a;
    const Vec2 lam = m.inverse() * (x - a);
    if (lam.x() < -0.05 || lam.y() < -0.05 || lam.x() + lam.y() > 1.05) continue;
    if (!el.curved) {
      if (lam.x() >= -tol && lam.y() >= -tol && lam.x() + lam.y() <= 1.0 + tol)
        return {e, lam};
      continue;
    }
    const auto ref = invert_map(mesh, e, x);
    if (ref && ref->x() >= -tol && ref->y() >= -tol &&
        ref->x() + ref->y() <= 1.0 + tol)
      return {e, *ref};
  }
  throw ConfigError("locate_point: point is outside the mesh");
}

/// Reference coordinates on a local edge at parameter t in [0,1],
/// traversed in the element's CCW direction.
inline Vec2 edge_ref_point(int local_edge, double t) {
  static const Vec2 verts[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  const auto& lv = detail::local_edge_vertices()[local_edge];
  return verts[lv[0]] + t * (verts[lv[1]] - verts[lv[0]]);
}

/// Outward unit normal of the reference triangle on a local edge.
inline Vec2 reference_edge_normal(int local_edge) {
  static const double s = 1.0 / std::sqrt(2.0);
  static const Vec2 normals[3] = {Vec2(0, -1), Vec2(s, s), Vec2(-1, 0)};
  return normals[local_edge];
}

/// Quadrature data on a physical edge, seen from the plus element: points,
/// arclength-weighted quadrature weights, and unit normals pointing from
/// element_plus into element_minus (outward on the boundary).
struct PhysicalEdgeData {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;

  int size() const { return static_cast<int>(points.size()); }
};

/// Edge data via the plus element's map: the weight carries the metric
/// |D psi t_ref| of the edge parametrization and the normal is the Nanson
/// transport det(D psi) D psi^{-T} eta_ref, normalized.
inline PhysicalEdgeData physical_edge_data(const Mesh& mesh, int edge_id,
                                           const QuadratureRule& rule) {
  const Edge& edge = mesh.edges[edge_id];
  const ReferenceBasis& basis = ReferenceBasis::get(mesh.geometry_degree);
  const auto nodes = mesh.element_nodes(edge.element_plus);
  const bool curved = mesh.elements[edge.element_plus].curved;
  const Vec2 eta_ref = reference_edge_normal(edge.local_edge_plus);
  const auto& lv = detail::local_edge_vertices()[edge.local_edge_plus];
  static const Vec2 verts[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  const Vec2 tangent_ref = verts[lv[1]] - verts[lv[0]];

  PhysicalEdgeData data;
  for (int q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q].x();
    const Vec2 ref = edge_ref_point(edge.local_edge_plus, t);
    const auto md = map_derivatives_from_table(nodes, basis.evaluate(ref), ref,
                                               curved);
    const Vec2 gamma_dt = md.jacobian * tangent_ref;
    Vec2 nrm = md.det() * md.jacobian.inverse().transpose() * eta_ref;
    detail::check_numeric(nrm.norm() > 1e-300,
                          "physical_edge_data: degenerate edge normal");
    data.points.push_back(md.point);
    data.weights.push_back(rule.weights[q] * gamma_dt.norm());
    data.normals.push_back(nrm.normalized());
  }
  return data;
}

}  // namespace foldplate

#endif
