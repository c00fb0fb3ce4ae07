// Assembly of the symmetric interior-penalty bilinear form for the folding
// plate model and of the load/boundary-data linear form.
//
// Jump convention: on an edge with unit normal pointing from element_plus
// into element_minus, [v] = v_minus - v_plus and {v} = (v_plus + v_minus)/2.
// On boundary edges [v] = -v and {v} = v. Gradient-jump terms (consistency
// and gamma_1 penalty) are dropped on interface edges, which is what allows
// the deformation to fold there; value-jump terms are kept everywhere.

#ifndef FOLDPLATE_ASSEMBLY_HPP
#define FOLDPLATE_ASSEMBLY_HPP

#include "foldplate/isoparametric.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/quadrature.hpp"
#include "foldplate/space.hpp"
#include "foldplate/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace foldplate {

struct PointConstraint {
  Vec2 location = Vec2::Zero();
  double value = 0.0;
};

struct ProblemSpec {
  int degree = 2;
  double gamma0 = 10.0;
  double gamma1 = 10.0;
  std::function<double(const Vec2&)> load;                 // f, may be empty
  BoundarySpec dirichlet = BoundarySpec::all_boundary();
  std::function<double(const Vec2&)> boundary_value;       // g, may be empty
  std::function<Vec2(const Vec2&)> boundary_gradient;      // Phi, may be empty
  std::optional<PointConstraint> point_constraint;
};

struct SparseSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  int n = 0;
};

namespace detail {

// Volume quadrature degree 2k+2 and k+3 edge Gauss points: integrands on
// curved elements are rational, so the forms are over-integrated to keep
// quadrature errors below the discretization error.
inline int volume_quadrature_degree(int k) { return std::min(2 * k + 2, 10); }
inline int edge_quadrature_points(int k) { return std::min(k + 3, 10); }

struct EdgeTerms {
  bool grad_terms = false;   // consistency + gamma_1 penalty
  bool value_terms = false;  // consistency + gamma_0 penalty
  bool rhs_data = false;     // Dirichlet data in the linear form
};

inline EdgeTerms edge_terms(EdgeClass cls) {
  switch (cls) {
    case EdgeClass::Interior:
      return {true, true, false};
    case EdgeClass::Interface:
      return {false, true, false};
    case EdgeClass::Dirichlet:
      return {true, true, true};
    case EdgeClass::Free:
      return {false, false, false};
    default:
      throw ConfigError("assemble: mesh has unclassified edges");
  }
}

}  // namespace detail

/// Options for assembling reduced forms; the default is the full bilinear
/// form. With consistency_terms = false only the broken Hessian product and
/// the jump penalties remain, which is exactly the Gram matrix of the
/// dG norm.
struct AssemblyOptions {
  bool consistency_terms = true;
};

inline SparseSystem assemble(const Mesh& mesh, const ProblemSpec& spec,
                             const AssemblyOptions& options = {}) {
  const int k = spec.degree;
  detail::require(k >= 2 && k <= 3, "assemble: degree must be 2 or 3");
  detail::require(spec.gamma0 > 0.0 && spec.gamma1 >= 0.0,
                  "assemble: penalty parameters must be positive");
  const ReferenceBasis& basis = ReferenceBasis::get(k);
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  const DofMap dofs(mesh, k);
  const int bs = dofs.block_size;

  SparseSystem sys;
  sys.n = dofs.size();
  sys.rhs = Eigen::VectorXd::Zero(sys.n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * bs * bs * 5);

  // --- volume terms: sum_T int_T D^2 u : D^2 v  and  int_T f v ---
  const QuadratureRule vol_rule = triangle_rule(detail::volume_quadrature_degree(k));
  std::vector<std::vector<ShapeDeriv>> vol_table, geo_table;
  for (const auto& p : vol_rule.points) {
    vol_table.push_back(basis.evaluate(p));
    geo_table.push_back(geo.evaluate(p));
  }

  Eigen::MatrixXd local(bs, bs);
  Eigen::VectorXd local_rhs(bs);
  std::vector<PhysicalShape> shapes(bs);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const bool curved = mesh.elements[e].curved;
    local.setZero();
    local_rhs.setZero();
    MapDerivatives md;
    InverseMapDerivatives inv;
    if (!curved) {
      md = map_derivatives_from_table(nodes, geo_table[0], vol_rule.points[0],
                                      false);
      inv = inverse_map_derivatives(md);
    }
    for (int q = 0; q < vol_rule.size(); ++q) {
      if (curved) {
        md = map_derivatives_from_table(nodes, geo_table[q], vol_rule.points[q],
                                        true);
        inv = inverse_map_derivatives(md);
      }
      const double w = vol_rule.weights[q] * md.det();
      for (int i = 0; i < bs; ++i)
        shapes[i] = transport_shape(vol_table[q][i], inv, !curved);
      for (int i = 0; i < bs; ++i)
        for (int j = 0; j <= i; ++j) {
          const double v =
              w * (shapes[i].hess.array() * shapes[j].hess.array()).sum();
          local(i, j) += v;
          if (j != i) local(j, i) += v;
        }
      if (spec.load) {
        Vec2 x = Vec2::Zero();
        for (int m = 0; m < geo.size(); ++m)
          x += geo_table[q][m].value * nodes[m];
        const double fw = w * spec.load(x);
        for (int i = 0; i < bs; ++i) local_rhs[i] += fw * shapes[i].value;
      }
    }
    const int off = dofs.block_start(e);
    for (int i = 0; i < bs; ++i) {
      sys.rhs[off + i] += local_rhs[i];
      for (int j = 0; j < bs; ++j)
        triplets.emplace_back(off + i, off + j, local(i, j));
    }
  }

  // --- edge terms ---
  const QuadratureRule erule = edge_rule(detail::edge_quadrature_points(k));
  struct SideCache {
    std::vector<std::vector<ShapeDeriv>> basis_fwd, basis_rev;
    std::vector<std::vector<ShapeDeriv>> geo_fwd, geo_rev;
  };
  // Tables per local edge at forward (plus, parameter t) and reversed
  // (minus, parameter 1-t) traversal.
  std::vector<SideCache> cache(3);
  for (int le = 0; le < 3; ++le)
    for (int q = 0; q < erule.size(); ++q) {
      const double t = erule.points[q].x();
      cache[le].basis_fwd.push_back(basis.evaluate(edge_ref_point(le, t)));
      cache[le].basis_rev.push_back(basis.evaluate(edge_ref_point(le, 1.0 - t)));
      cache[le].geo_fwd.push_back(geo.evaluate(edge_ref_point(le, t)));
      cache[le].geo_rev.push_back(geo.evaluate(edge_ref_point(le, 1.0 - t)));
    }

  static const Vec2 ref_verts[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  std::vector<double> val;
  std::vector<Vec2> grd, dng;  // traces, normal-gradient D^2 v eta
  std::vector<double> dnl;     // normal Laplacian derivative
  for (int eid = 0; eid < mesh.n_edges(); ++eid) {
    const Edge& edge = mesh.edges[eid];
    const auto terms = detail::edge_terms(edge.cls);
    if (!terms.grad_terms && !terms.value_terms) continue;

    const bool interior = !edge.is_boundary();
    const int n_sides = interior ? 2 : 1;
    const int ns = n_sides * bs;
    Eigen::MatrixXd eloc = Eigen::MatrixXd::Zero(ns, ns);
    Eigen::VectorXd erhs = Eigen::VectorXd::Zero(ns);
    val.assign(ns, 0.0);
    grd.assign(ns, Vec2::Zero());
    dng.assign(ns, Vec2::Zero());
    dnl.assign(ns, 0.0);

    const double inv_h = 1.0 / edge.h_s;
    const double pen0 = spec.gamma0 * inv_h * inv_h * inv_h;
    const double pen1 = spec.gamma1 * inv_h;

    const auto& lvp = detail::local_edge_vertices()[edge.local_edge_plus];
    const Vec2 tangent_ref = ref_verts[lvp[1]] - ref_verts[lvp[0]];
    const Vec2 eta_ref = reference_edge_normal(edge.local_edge_plus);
    const auto nodes_plus = mesh.element_nodes(edge.element_plus);
    const bool curved_plus = mesh.elements[edge.element_plus].curved;
    std::vector<Vec2> nodes_minus;
    bool curved_minus = false;
    if (interior) {
      nodes_minus = mesh.element_nodes(edge.element_minus);
      curved_minus = mesh.elements[edge.element_minus].curved;
    }

    for (int q = 0; q < erule.size(); ++q) {
      const auto& cp = cache[edge.local_edge_plus];
      const auto md_plus = map_derivatives_from_table(
          nodes_plus, cp.geo_fwd[q], Vec2::Zero(), curved_plus);
      const auto inv_plus = inverse_map_derivatives(md_plus);
      const Vec2 gamma_dt = md_plus.jacobian * tangent_ref;
      const double w = erule.weights[q] * gamma_dt.norm();
      const Vec2 normal =
          (md_plus.det() * md_plus.jacobian.inverse().transpose() * eta_ref)
              .normalized();

      for (int i = 0; i < bs; ++i) {
        const auto s = transport_shape(cp.basis_fwd[q][i], inv_plus, !curved_plus);
        val[i] = s.value;
        grd[i] = s.grad;
        dng[i] = s.hess * normal;
        dnl[i] = s.third.trace12().dot(normal);
      }
      if (interior) {
        const auto& cm = cache[edge.local_edge_minus];
        const auto md_minus = map_derivatives_from_table(
            nodes_minus, cm.geo_rev[q], Vec2::Zero(), curved_minus);
        const auto inv_minus = inverse_map_derivatives(md_minus);
        for (int i = 0; i < bs; ++i) {
          const auto s =
              transport_shape(cm.basis_rev[q][i], inv_minus, !curved_minus);
          val[bs + i] = s.value;
          grd[bs + i] = s.grad;
          dng[bs + i] = s.hess * normal;
          dnl[bs + i] = s.third.trace12().dot(normal);
        }
      }

      const double avg = interior ? 0.5 : 1.0;
      auto jump_sign = [&](int idx) { return idx < bs ? -1.0 : 1.0; };

      for (int i = 0; i < ns; ++i) {
        const double ji = jump_sign(i);
        for (int j = 0; j < ns; ++j) {
          const double jj = jump_sign(j);
          double v = 0.0;
          if (terms.grad_terms) {
            if (options.consistency_terms)
              v += avg * dng[j].dot(ji * grd[i]) +
                   avg * dng[i].dot(jj * grd[j]);
            v += pen1 * (ji * grd[i]).dot(jj * grd[j]);
          }
          if (terms.value_terms) {
            if (options.consistency_terms)
              v -= avg * dnl[j] * ji * val[i] + avg * dnl[i] * jj * val[j];
            v += pen0 * ji * val[i] * jj * val[j];
          }
          eloc(i, j) += w * v;
        }
      }

      if (terms.rhs_data) {
        const Vec2 x = md_plus.point;
        const double g = spec.boundary_value ? spec.boundary_value(x) : 0.0;
        const Vec2 phi =
            spec.boundary_gradient ? spec.boundary_gradient(x) : Vec2::Zero();
        if (g != 0.0 || phi.squaredNorm() != 0.0) {
          for (int i = 0; i < bs; ++i) {
            double v = 0.0;
            if (options.consistency_terms) v += -dng[i].dot(phi) + dnl[i] * g;
            v += pen1 * grd[i].dot(phi) + pen0 * val[i] * g;
            erhs[i] += w * v;
          }
        }
      }
    }

    const int offp = dofs.block_start(edge.element_plus);
    const int offm = interior ? dofs.block_start(edge.element_minus) : 0;
    auto gdof = [&](int idx) {
      return idx < bs ? offp + idx : offm + (idx - bs);
    };
    for (int i = 0; i < ns; ++i) {
      sys.rhs[gdof(i)] += erhs[i];
      for (int j = 0; j < ns; ++j)
        triplets.emplace_back(gdof(i), gdof(j), eloc(i, j));
    }
  }

  sys.matrix.resize(sys.n, sys.n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

/// Enforce u(x0) = value by a large symmetric penalty: beta phi phi^T is
/// added to the matrix and beta value phi to the right-hand side, with
/// beta = 1e8 times the largest diagonal entry. Keeps the system SPD.
inline void apply_point_constraint(SparseSystem& sys, const Mesh& mesh,
                                   int degree, const Vec2& x0, double value) {
  const auto [element, ref] = locate_point(mesh, x0);
  const ReferenceBasis& basis = ReferenceBasis::get(degree);
  const auto shapes = physical_shape(mesh, element, ref, basis);
  const DofMap dofs(mesh, degree);

  double max_diag = 0.0;
  for (int i = 0; i < sys.n; ++i)
    max_diag = std::max(max_diag, std::abs(sys.matrix.coeff(i, i)));
  const double beta = 1e8 * max_diag;

  for (int i = 0; i < dofs.block_size; ++i) {
    const int gi = dofs.global(element, i);
    sys.rhs[gi] += beta * value * shapes[i].value;
    for (int j = 0; j < dofs.block_size; ++j)
      sys.matrix.coeffRef(gi, dofs.global(element, j)) +=
          beta * shapes[i].value * shapes[j].value;
  }
  sys.matrix.makeCompressed();
}

/// MatrixMarket coordinate dump (symmetric, lower triangle, 1-based).
inline void write_matrix_market(const std::string& path,
                                const SparseSystem& sys) {
  std::ofstream out(path);
  detail::require(out.good(), "write_matrix_market: cannot open " + path);
  std::size_t nnz = 0;
  for (int r = 0; r < sys.matrix.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             sys.matrix, r);
         it; ++it)
      if (it.row() >= it.col()) ++nnz;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << sys.n << " " << sys.n << " " << nnz << "\n";
  out.precision(16);
  for (int r = 0; r < sys.matrix.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             sys.matrix, r);
         it; ++it)
      if (it.row() >= it.col())
        out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace foldplate

#endif
