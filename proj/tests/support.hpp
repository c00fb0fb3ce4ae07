// Shared test utilities: a hand-built two-element unit square mesh,
// finite-difference and adaptive-quadrature oracles, and dense matrix
// helpers. Everything here is independent of the code paths it checks.

#ifndef FOLDPLATE_TESTS_SUPPORT_HPP
#define FOLDPLATE_TESTS_SUPPORT_HPP

#include "foldplate/assembly.hpp"
#include "foldplate/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace fptest {

using foldplate::Mat2;
using foldplate::Mesh;
using foldplate::Vec2;

/// Unit square split by the diagonal (0,0)-(1,1) into two triangles, all
/// boundary edges Dirichlet. The smallest usable mesh; the structured
/// builder starts at n=2, so this one is assembled by hand.
inline Mesh two_element_square(int k_geo = 2) {
  foldplate::detail::TopologyInput in;
  in.k_geo = k_geo;
  in.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  in.element_vertices.push_back({0, 1, 2});
  in.element_vertices.push_back({0, 2, 3});
  Mesh mesh = foldplate::detail::build_from_topology(in);
  foldplate::classify_edges(mesh, foldplate::BoundarySpec::all_boundary());
  return mesh;
}

/// A single curved element on which all chain-rule paths are exercised:
/// reference-like triangle with one bent edge.
inline Mesh one_curved_element(int k_geo = 2) {
  foldplate::detail::TopologyInput in;
  in.k_geo = k_geo;
  in.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  in.element_vertices.push_back({0, 1, 2});
  Mesh mesh = foldplate::detail::build_from_topology(in);
  // bend the hypotenuse midnode outward and keep the others put
  const auto& ids = mesh.edge_nodes[mesh.elements[0].edge_ids[1]];
  if (k_geo == 2) {
    mesh.nodes[ids[0]] += Vec2(0.08, 0.06);
  } else {
    mesh.nodes[ids[0]] += Vec2(0.05, 0.04);
    mesh.nodes[ids[1]] += Vec2(0.04, 0.06);
  }
  mesh.elements[0].curved = true;
  // refresh arclengths after bending
  const auto rule = foldplate::edge_rule(k_geo + 3);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto pts = mesh.edge_curve_nodes(e);
    double len = 0.0;
    for (int q = 0; q < rule.size(); ++q)
      len += rule.weights[q] *
             foldplate::edge_curve_eval(pts, rule.points[q].x()).second.norm();
    mesh.edges[e].h_s = len;
  }
  foldplate::classify_edges(mesh, foldplate::BoundarySpec::all_boundary());
  return mesh;
}

/// Central finite difference of a scalar function of one coordinate.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Adaptive Simpson quadrature (oracle for arclengths and areas).
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-13, int depth = 24) {
  auto simpson = [&](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  std::function<double(double, double, double, int)> rec =
      [&](double lo, double hi, double whole, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid), right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
  };
  return rec(a, b, simpson(a, b), depth);
}

inline Eigen::MatrixXd dense(const foldplate::SparseSystem& sys) {
  return Eigen::MatrixXd(sys.matrix);
}

inline double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues().minCoeff();
}

inline double symmetry_error(const Eigen::MatrixXd& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
}

inline std::mt19937& rng() {
  static std::mt19937 gen(42);
  return gen;
}

inline Vec2 random_ref_point() {
  std::uniform_real_distribution<double> dist(0.05, 0.9);
  double x = dist(rng()), y = dist(rng());
  if (x + y > 0.95) {
    x *= 0.5;
    y *= 0.5;
  }
  return Vec2(x, y);
}

}  // namespace fptest

#endif
