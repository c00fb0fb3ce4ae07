// dG-norm evaluation, per-element bending energy density, Aitken
// extrapolation of norm sequences, and convergence tables.

#ifndef FOLDPLATE_ANALYSIS_HPP
#define FOLDPLATE_ANALYSIS_HPP

#include "foldplate/assembly.hpp"
#include "foldplate/isoparametric.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/space.hpp"
#include "foldplate/types.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace foldplate {

namespace detail {

constexpr double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Shared edge-trace walk for the dG norm and the direct error norm. The
// exact solution, when given, is subtracted inside the traces: it has no
// interior jumps, and on Dirichlet edges the boundary jump of the error is
// the trace of u_h - u_exact itself (homogeneous-data convention).
struct ExactSolution {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Mat2(const Vec2&)> hess;
};

inline double dg_norm_squared(const SolutionField& field, double gamma0,
                              double gamma1, const ExactSolution* exact) {
  const Mesh& mesh = *field.mesh;
  const int k = field.degree;
  const ReferenceBasis& basis = ReferenceBasis::get(k);
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  const DofMap dofs(mesh, k);
  require(field.coeffs.size() == dofs.size(),
          "dg_norm: coefficient array size mismatch");
  const int bs = dofs.block_size;

  double vol_sq = 0.0;
  const QuadratureRule vol_rule = triangle_rule(volume_quadrature_degree(k));
  std::vector<std::vector<ShapeDeriv>> vol_table, geo_table;
  for (const auto& p : vol_rule.points) {
    vol_table.push_back(basis.evaluate(p));
    geo_table.push_back(geo.evaluate(p));
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const bool curved = mesh.elements[e].curved;
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
      Mat2 hess = Mat2::Zero();
      Vec2 x = Vec2::Zero();
      for (int m = 0; m < geo.size(); ++m) x += geo_table[q][m].value * nodes[m];
      for (int i = 0; i < bs; ++i) {
        const double c = field.coeffs[dofs.global(e, i)];
        if (c == 0.0) continue;
        hess += c * transport_shape(vol_table[q][i], inv, !curved).hess;
      }
      if (exact) hess -= exact->hess(x);
      vol_sq += vol_rule.weights[q] * md.det() * hess.squaredNorm();
    }
  }

  double edge_sq = 0.0;
  const QuadratureRule erule = edge_rule(edge_quadrature_points(k));
  for (int eid = 0; eid < mesh.n_edges(); ++eid) {
    const Edge& edge = mesh.edges[eid];
    const bool in_sh = edge.cls == EdgeClass::Interior ||
                       edge.cls == EdgeClass::Interface ||
                       edge.cls == EdgeClass::Dirichlet;
    if (!in_sh) continue;
    const bool grad_jumps = edge.cls != EdgeClass::Interface;
    const bool interior = !edge.is_boundary();
    const double pen0 = gamma0 / (edge.h_s * edge.h_s * edge.h_s);
    const double pen1 = gamma1 / edge.h_s;

    for (int q = 0; q < erule.size(); ++q) {
      const double t = erule.points[q].x();
      const Vec2 ref_p = edge_ref_point(edge.local_edge_plus, t);
      const auto md_p = map_derivatives(mesh, edge.element_plus, ref_p);
      const auto& lv = local_edge_vertices()[edge.local_edge_plus];
      static const Vec2 rv[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
      const double w =
          erule.weights[q] * (md_p.jacobian * (rv[lv[1]] - rv[lv[0]])).norm();

      const auto vp = evaluate_field(field, edge.element_plus, ref_p);
      double jump_v;
      Vec2 jump_g;
      if (interior) {
        const Vec2 ref_m = edge_ref_point(edge.local_edge_minus, 1.0 - t);
        const auto vm = evaluate_field(field, edge.element_minus, ref_m);
        jump_v = vm.value - vp.value;
        jump_g = vm.grad - vp.grad;
      } else {
        jump_v = -vp.value;
        jump_g = -vp.grad;
        if (exact) {
          jump_v += exact->value(md_p.point);
          jump_g += exact->grad(md_p.point);
        }
      }
      edge_sq += w * pen0 * jump_v * jump_v;
      if (grad_jumps) edge_sq += w * pen1 * jump_g.squaredNorm();
    }
  }
  return vol_sq + edge_sq;
}

}  // namespace detail

/// dG norm: broken Hessian plus gamma_1/h gradient jumps off the interface
/// plus gamma_0/h^3 value jumps on all edges of the skeleton (interior,
/// interface and Dirichlet edges; boundary jumps are the traces themselves).
inline double dg_norm(const SolutionField& field, double gamma0 = 10.0,
                      double gamma1 = 10.0) {
  return std::sqrt(detail::dg_norm_squared(field, gamma0, gamma1, nullptr));
}

/// Directly computed dG error norm against a known smooth solution with
/// homogeneous Dirichlet data.
inline double dg_error_norm(const SolutionField& field,
                            const std::function<double(const Vec2&)>& value,
                            const std::function<Vec2(const Vec2&)>& grad,
                            const std::function<Mat2(const Vec2&)>& hess,
                            double gamma0 = 10.0, double gamma1 = 10.0) {
  detail::ExactSolution exact{value, grad, hess};
  return std::sqrt(detail::dg_norm_squared(field, gamma0, gamma1, &exact));
}

/// Area-normalized bending energy density per element:
/// (1/2) int_T |D^2 u|^2 dx / |T|.
inline std::vector<double> energy_density(const SolutionField& field) {
  const Mesh& mesh = *field.mesh;
  const int k = field.degree;
  const ReferenceBasis& basis = ReferenceBasis::get(k);
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  const DofMap dofs(mesh, k);
  const int bs = dofs.block_size;
  const QuadratureRule vol_rule =
      triangle_rule(detail::volume_quadrature_degree(k));
  std::vector<std::vector<ShapeDeriv>> vol_table, geo_table;
  for (const auto& p : vol_rule.points) {
    vol_table.push_back(basis.evaluate(p));
    geo_table.push_back(geo.evaluate(p));
  }

  std::vector<double> density(mesh.n_elements(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const bool curved = mesh.elements[e].curved;
    MapDerivatives md;
    InverseMapDerivatives inv;
    if (!curved) {
      md = map_derivatives_from_table(nodes, geo_table[0], vol_rule.points[0],
                                      false);
      inv = inverse_map_derivatives(md);
    }
    double energy = 0.0, area = 0.0;
    for (int q = 0; q < vol_rule.size(); ++q) {
      if (curved) {
        md = map_derivatives_from_table(nodes, geo_table[q], vol_rule.points[q],
                                        true);
        inv = inverse_map_derivatives(md);
      }
      Mat2 hess = Mat2::Zero();
      for (int i = 0; i < bs; ++i) {
        const double c = field.coeffs[dofs.global(e, i)];
        if (c == 0.0) continue;
        hess += c * transport_shape(vol_table[q][i], inv, !curved).hess;
      }
      const double w = vol_rule.weights[q] * md.det();
      energy += 0.5 * w * hess.squaredNorm();
      area += w;
    }
    density[e] = energy / area;
  }
  return density;
}

/// Aitken extrapolated limit of the three-term sequence.
inline double extrapolate(double s0, double s1, double s2) {
  const double denom = s2 - 2.0 * s1 + s0;
  detail::check_numeric(
      std::abs(denom) > 1e-14 * std::abs(s2),
      "extrapolate: vanishing second difference (sequence already converged "
      "or not geometric)");
  return (s2 * s0 - s1 * s1) / denom;
}

struct ConvergenceRow {
  int level = 0;
  int n_dofs = 0;
  double h_max = 0.0;
  double s = 0.0;       // ||u_j||_dG
  double s_tilde = 0.0; // per-level Aitken value, NaN for j < 2
  double err = 0.0;     // sqrt(|s_ref^2 - s_j^2|), s_ref from finest triple
  double rate = 0.0;    // log2(err_{j-1}/err_j), NaN where undefined
};

/// Error/rate table from a sequence of dG norms. The reference limit is
/// extrapolated from the three finest levels; err_j = sqrt(|s_ref^2 - s_j^2|)
/// and rates are per refinement step. Zero errors leave the rate undefined
/// (NaN).
inline std::vector<ConvergenceRow> error_series(const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  detail::require(n >= 3, "error_series: need at least 3 levels");
  const double s_ref = extrapolate(s[n - 3], s[n - 2], s[n - 1]);

  std::vector<ConvergenceRow> rows(n);
  for (int j = 0; j < n; ++j) {
    rows[j].level = j;
    rows[j].s = s[j];
    rows[j].s_tilde =
        j >= 2 ? extrapolate(s[j - 2], s[j - 1], s[j]) : detail::nan_value();
    rows[j].err = std::sqrt(std::abs(s_ref * s_ref - s[j] * s[j]));
    rows[j].rate = detail::nan_value();
  }
  for (int j = 1; j < n; ++j)
    if (rows[j].err > 0.0 && rows[j - 1].err > 0.0)
      rows[j].rate = std::log2(rows[j - 1].err / rows[j].err);
  return rows;
}

inline std::string format_significant(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// CSV with columns level,ndofs,hmax,s,stilde,err,rate (12 significant
/// digits). Error columns may be suppressed for runs where the error
/// estimate is not meaningful (inhomogeneous boundary data).
inline void write_convergence_csv(const std::string& path,
                                  const std::vector<ConvergenceRow>& rows,
                                  bool with_errors = true) {
  std::ofstream out(path);
  detail::require(out.good(), "write_convergence_csv: cannot open " + path);
  out << "level,ndofs,hmax,s,stilde,err,rate\n";
  for (const auto& r : rows) {
    out << r.level << "," << r.n_dofs << "," << format_significant(r.h_max)
        << "," << format_significant(r.s) << ",";
    if (with_errors)
      out << format_significant(r.s_tilde) << "," << format_significant(r.err)
          << "," << format_significant(r.rate);
    else
      out << ",,";
    out << "\n";
  }
}

}  // namespace foldplate

#endif
