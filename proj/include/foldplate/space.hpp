// Discontinuous polynomial spaces on isoparametric elements: per-element
// dof layout, chain-rule transport of reference derivatives (up to third
// order) to the physical element, and field evaluation.

#ifndef FOLDPLATE_SPACE_HPP
#define FOLDPLATE_SPACE_HPP

#include "foldplate/isoparametric.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/reference_basis.hpp"
#include "foldplate/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace foldplate {

/// Fully discontinuous dof layout: one block of dim P_k dofs per element.
struct DofMap {
  int n_elements = 0;
  int block_size = 0;

  DofMap() = default;
  DofMap(const Mesh& mesh, int degree)
      : n_elements(mesh.n_elements()), block_size(polynomial_space_dim(degree)) {}

  int size() const { return n_elements * block_size; }
  int global(int element, int local) const {
    return element * block_size + local;
  }
  int block_start(int element) const { return element * block_size; }
};

/// One basis function transported to the physical element at one point.
struct PhysicalShape {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  Ten3 third;
};

/// Transport reference shape derivatives through the inverse map derivatives
/// (full chain rule): grad v = A^T grad_ref, and the Hessian and third
/// derivative pick up the curvature terms B = D^2(psi^{-1}), C = D^3(psi^{-1}).
inline PhysicalShape transport_shape(const ShapeDeriv& s,
                                     const InverseMapDerivatives& inv,
                                     bool affine) {
  PhysicalShape out;
  out.value = s.value;
  const Mat2& A = inv.jac_inv;
  out.grad = A.transpose() * s.grad;
  out.hess = A.transpose() * s.hess * A;
  if (!affine)
    for (int a = 0; a < 2; ++a) out.hess += s.grad[a] * inv.d2[a];

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
              acc += s.third(a, b, c) * A(a, i) * A(b, j) * A(c, k);
        if (!affine) {
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              acc += s.hess(a, b) * (inv.d2[a](i, j) * A(b, k) +
                                     inv.d2[a](i, k) * A(b, j) +
                                     A(a, i) * inv.d2[b](j, k));
          for (int a = 0; a < 2; ++a) acc += s.grad[a] * inv.d3[a](i, j, k);
        }
        out.third(i, j, k) = acc;
      }
  return out;
}

/// All basis functions of the solution space on one element at a reference
/// point, transported to physical coordinates.
inline std::vector<PhysicalShape> physical_shape(const Mesh& mesh, int element,
                                                 const Vec2& ref_point,
                                                 const ReferenceBasis& basis) {
  const auto md = map_derivatives(mesh, element, ref_point);
  const auto inv = inverse_map_derivatives(md);
  const auto shapes = basis.evaluate(ref_point);
  std::vector<PhysicalShape> out;
  out.reserve(shapes.size());
  for (const auto& s : shapes) out.push_back(transport_shape(s, inv, md.affine));
  return out;
}

/// A coefficient vector over a DofMap together with its mesh handle.
struct SolutionField {
  const Mesh* mesh = nullptr;
  int degree = 2;
  Eigen::VectorXd coeffs;

  DofMap dofs() const { return DofMap(*mesh, degree); }
};

struct FieldValue {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// Evaluate a field on one element at a reference point.
inline FieldValue evaluate_field(const SolutionField& field, int element,
                                 const Vec2& ref_point) {
  const DofMap dofs(*field.mesh, field.degree);
  detail::require(field.coeffs.size() == dofs.size(),
                  "evaluate_field: coefficient array size mismatch");
  const auto shapes = physical_shape(*field.mesh, element, ref_point,
                                     ReferenceBasis::get(field.degree));
  FieldValue out;
  for (int i = 0; i < dofs.block_size; ++i) {
    const double c = field.coeffs[dofs.global(element, i)];
    out.value += c * shapes[i].value;
    out.grad += c * shapes[i].grad;
    out.hess += c * shapes[i].hess;
  }
  return out;
}

/// Evaluate a field at a physical point (locates the element first).
inline FieldValue evaluate_field_at(const SolutionField& field, const Vec2& x) {
  const auto [element, ref] = locate_point(*field.mesh, x);
  return evaluate_field(field, element, ref);
}

/// Elementwise Lagrange interpolant of a callable u(x) on the mesh.
template <typename F>
Eigen::VectorXd interpolate(const Mesh& mesh, int degree, F&& u) {
  const ReferenceBasis& basis = ReferenceBasis::get(degree);
  const DofMap dofs(mesh, degree);
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  Eigen::VectorXd coeffs(dofs.size());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    for (int i = 0; i < basis.size(); ++i) {
      const auto shapes = geo.evaluate(basis.lattice().nodes[i]);
      Vec2 x = Vec2::Zero();
      for (int m = 0; m < geo.size(); ++m) x += shapes[m].value * nodes[m];
      coeffs[dofs.global(e, i)] = u(x);
    }
  }
  return coeffs;
}

}  // namespace foldplate

#endif
