// Assembly of the interior-penalty system: symmetry, definiteness, kernel
// structure, interface coupling structure, boundary data and the point
// constraint.

#include "foldplate/analysis.hpp"
#include "foldplate/assembly.hpp"
#include "foldplate/manufactured.hpp"
#include "foldplate/solver.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace foldplate;

namespace {

ProblemSpec homogeneous_spec(double f_const = 0.0) {
  ProblemSpec spec;
  spec.degree = 2;
  if (f_const != 0.0)
    spec.load = [f_const](const Vec2&) { return f_const; };
  return spec;
}

Mesh preset_mesh(InterfaceKind kind, int fit_order, int levels) {
  InterfaceSpec is;
  is.kind = kind;
  is.fit_order = fit_order;
  Mesh mesh = build_structured_mesh(4, is, 2);
  classify_edges(mesh, BoundarySpec::all_boundary());
  for (int j = 0; j < levels; ++j) mesh = refine_uniform(mesh);
  return mesh;
}

}  // namespace

TEST(Assemble, ZeroDataGivesZeroRhs) {
  Mesh mesh = preset_mesh(InterfaceKind::Sine, 2, 0);
  const auto sys = assemble(mesh, homogeneous_spec());
  EXPECT_EQ(sys.rhs.norm(), 0.0);
}

TEST(Assemble, RejectsUnclassifiedEdges) {
  Mesh mesh = build_structured_mesh(4, {}, 2);  // boundary not classified
  EXPECT_THROW(assemble(mesh, homogeneous_spec()), ConfigError);
}

TEST(Assemble, TwoElementSystemIsSymmetricPositiveDefinite) {
  const Mesh mesh = fptest::two_element_square();
  const auto sys = assemble(mesh, homogeneous_spec(1.0));
  ASSERT_EQ(sys.n, 12);
  const Eigen::MatrixXd a = fptest::dense(sys);
  EXPECT_LE(fptest::symmetry_error(a), 1e-12);
  EXPECT_GT(fptest::min_eigenvalue(a), 0.0);
}

TEST(Assemble, SymmetryOnAllInterfaceCases) {
  for (const auto kind : {InterfaceKind::None, InterfaceKind::StraightX05,
                          InterfaceKind::Quadratic, InterfaceKind::Sine}) {
    for (int level = 0; level <= 1; ++level) {
      Mesh mesh = preset_mesh(kind, kind == InterfaceKind::Sine ? 2 : 1, level);
      const auto sys = assemble(mesh, homogeneous_spec(100.0));
      EXPECT_LE(fptest::symmetry_error(fptest::dense(sys)), 1e-12)
          << "kind " << static_cast<int>(kind) << " level " << level;
    }
  }
}

TEST(Assemble, CoerciveAtGammaTenOnAllInterfaceCases) {
  for (const auto kind : {InterfaceKind::None, InterfaceKind::StraightX05,
                          InterfaceKind::Quadratic, InterfaceKind::Sine}) {
    for (int level = 0; level <= 1; ++level) {
      Mesh mesh = preset_mesh(kind, 2, level);
      const auto sys = assemble(mesh, homogeneous_spec());
      EXPECT_GT(fptest::min_eigenvalue(fptest::dense(sys)), 0.0)
          << "kind " << static_cast<int>(kind) << " level " << level;
    }
  }
}

TEST(Assemble, RigidKernelHasDimensionThreeWithoutDirichletEdges) {
  Mesh mesh = build_structured_mesh(4, {}, 2);
  classify_edges(mesh, BoundarySpec::none());
  const auto sys = assemble(mesh, homogeneous_spec());
  const Eigen::MatrixXd a = fptest::dense(sys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double lmax = es.eigenvalues().maxCoeff();
  int near_null = 0;
  for (int i = 0; i < sys.n; ++i)
    if (es.eigenvalues()(i) < 1e-9 * lmax) ++near_null;
  EXPECT_EQ(near_null, 3);

  // the kernel is spanned by {1, x, y}
  for (const auto& fn : {std::function<double(const Vec2&)>(
                             [](const Vec2&) { return 1.0; }),
                         std::function<double(const Vec2&)>(
                             [](const Vec2& p) { return p.x(); }),
                         std::function<double(const Vec2&)>(
                             [](const Vec2& p) { return p.y(); })}) {
    const Eigen::VectorXd c = interpolate(mesh, 2, fn);
    EXPECT_LE((a * c).norm(), 1e-9 * lmax * c.norm());
  }
}

TEST(Assemble, InterfaceEdgesCarryNoGradientCoupling) {
  // gamma_1 only enters gradient terms, which are skipped on the interface:
  // the coupling blocks supported on an interface edge alone must be
  // identical for gamma_1 = 0 and gamma_1 = 10.
  Mesh mesh = preset_mesh(InterfaceKind::StraightX05, 1, 0);
  ProblemSpec s0 = homogeneous_spec();
  s0.gamma1 = 0.0;
  ProblemSpec s10 = homogeneous_spec();
  const Eigen::MatrixXd diff =
      fptest::dense(assemble(mesh, s10)) - fptest::dense(assemble(mesh, s0));
  const DofMap dofs(mesh, 2);
  int n_interface = 0;
  for (const auto& edge : mesh.edges) {
    if (edge.cls != EdgeClass::Interface) continue;
    ++n_interface;
    const int op = dofs.block_start(edge.element_plus);
    const int om = dofs.block_start(edge.element_minus);
    EXPECT_EQ(diff.block(op, om, 6, 6).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(diff.block(om, op, 6, 6).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(n_interface, 4);
  // while gamma_1 does change entries elsewhere
  EXPECT_GT(diff.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Assemble, DgNormGramMatrixMatchesNorm) {
  Mesh mesh = preset_mesh(InterfaceKind::Quadratic, 2, 0);
  AssemblyOptions opts;
  opts.consistency_terms = false;
  const auto gram = assemble(mesh, homogeneous_spec(), opts);
  const Eigen::MatrixXd g = fptest::dense(gram);
  // SPD: the dG norm is a norm when both subdomains touch Dirichlet edges
  EXPECT_GT(fptest::min_eigenvalue(g), 0.0);

  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd c(gram.n);
  for (int i = 0; i < gram.n; ++i) c[i] = dist(fptest::rng());
  const SolutionField field{&mesh, 2, c};
  EXPECT_NEAR(std::sqrt(c.dot(g * c)), dg_norm(field, 10.0, 10.0),
              1e-10 * std::sqrt(c.dot(g * c)));
}

TEST(Assemble, GalerkinConsistencyForManufacturedSolution) {
  // || u_h - I_h u* ||_dG must decay like the interpolation error; a sign
  // error in any consistency term would stall it.
  Mesh mesh = preset_mesh(InterfaceKind::None, 1, 0);
  ProblemSpec spec = homogeneous_spec();
  spec.load = [](const Vec2& p) { return manufactured::load(p); };
  std::vector<double> gap;
  for (int level = 0; level < 4; ++level) {
    const auto sys = assemble(mesh, spec);
    const auto [coeffs, report] = solve_direct(sys);
    const Eigen::VectorXd ci =
        interpolate(mesh, 2, [](const Vec2& p) { return manufactured::value(p); });
    const SolutionField diff{&mesh, 2, coeffs - ci};
    gap.push_back(dg_norm(diff, 10.0, 10.0));
    if (level < 3) mesh = refine_uniform(mesh);
  }
  for (int j = 1; j < 4; ++j) {
    const double rate = std::log2(gap[j - 1] / gap[j]);
    EXPECT_GE(rate, 0.8) << "level " << j;
  }
}

TEST(Assemble, ManufacturedSolutionConvergesInDgNorm) {
  Mesh mesh = preset_mesh(InterfaceKind::None, 1, 0);
  ProblemSpec spec = homogeneous_spec();
  spec.load = [](const Vec2& p) { return manufactured::load(p); };
  std::vector<double> err;
  for (int level = 0; level < 4; ++level) {
    const auto sys = assemble(mesh, spec);
    const auto [coeffs, report] = solve_direct(sys);
    const SolutionField field{&mesh, 2, coeffs};
    err.push_back(dg_error_norm(
        field, [](const Vec2& p) { return manufactured::value(p); },
        [](const Vec2& p) { return manufactured::grad(p); },
        [](const Vec2& p) { return manufactured::hess(p); }));
    if (level < 3) mesh = refine_uniform(mesh);
  }
  // rates from level 2 on; the acceptance suite covers the full window
  for (int j = 2; j < 4; ++j)
    EXPECT_GE(std::log2(err[j - 1] / err[j]), 0.9) << "level " << j;
}

TEST(Assemble, InhomogeneousBoundaryDataEntersTheRhs) {
  Mesh mesh = build_structured_mesh(4, {}, 2);
  classify_edges(mesh, BoundarySpec::vertical_sides());
  ProblemSpec spec = homogeneous_spec();
  spec.boundary_value = [](const Vec2& p) { return p.x() < 0.5 ? 0.3 : 0.0; };
  const auto sys = assemble(mesh, spec);
  EXPECT_GT(sys.rhs.norm(), 0.0);
  // the lift should be approximately attained at the clamped side
  const auto [coeffs, report] = solve_direct(sys);
  const SolutionField field{&mesh, 2, coeffs};
  const auto v = evaluate_field_at(field, Vec2(0.0, 0.5));
  EXPECT_NEAR(v.value, 0.3, 0.02);
}

TEST(PointConstraint, ZeroValueOnVanishingSolutionChangesNothing) {
  const Mesh mesh = fptest::two_element_square();
  auto sys = assemble(mesh, homogeneous_spec());  // f = 0: solution is 0
  apply_point_constraint(sys, mesh, 2, Vec2(0.5, 0.5), 0.0);
  const auto [coeffs, report] = solve_direct(sys);
  EXPECT_LE(coeffs.norm(), 1e-8);
}

TEST(PointConstraint, EnforcesTargetValue) {
  Mesh mesh = preset_mesh(InterfaceKind::Quadratic, 2, 1);
  classify_edges(mesh, BoundarySpec::right_of(2.0 / 3.0));
  auto sys = assemble(mesh, homogeneous_spec());
  apply_point_constraint(sys, mesh, 2, Vec2(0.0, 0.5), 0.3);
  const auto [coeffs, report] = solve_direct(sys);
  const SolutionField field{&mesh, 2, coeffs};
  EXPECT_NEAR(evaluate_field_at(field, Vec2(0.0, 0.5)).value, 0.3, 1e-6);
}

TEST(PointConstraint, Idempotence) {
  Mesh mesh = preset_mesh(InterfaceKind::Quadratic, 2, 1);
  classify_edges(mesh, BoundarySpec::right_of(2.0 / 3.0));
  auto sys1 = assemble(mesh, homogeneous_spec());
  apply_point_constraint(sys1, mesh, 2, Vec2(0.0, 0.5), 0.3);
  auto sys2 = sys1;
  apply_point_constraint(sys2, mesh, 2, Vec2(0.0, 0.5), 0.3);
  const auto x1 = solve_direct(sys1).first;
  const auto x2 = solve_direct(sys2).first;
  EXPECT_LE((x1 - x2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PointConstraint, PointOutsideMeshIsAnError) {
  const Mesh mesh = fptest::two_element_square();
  auto sys = assemble(mesh, homogeneous_spec());
  EXPECT_THROW(apply_point_constraint(sys, mesh, 2, Vec2(2.0, 2.0), 0.0),
               ConfigError);
}

TEST(MatrixMarket, SymmetricDumpRoundTrips) {
  const Mesh mesh = fptest::two_element_square();
  const auto sys = assemble(mesh, homogeneous_spec(1.0));
  const std::string path = "/tmp/foldplate_test_matrix.mtx";
  write_matrix_market(path, sys);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real symmetric");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  EXPECT_EQ(rows, 12);
  EXPECT_EQ(cols, 12);
  const Eigen::MatrixXd a = fptest::dense(sys);
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    EXPECT_GE(i, j);  // lower triangle
    EXPECT_NEAR(v, a(i - 1, j - 1), 1e-12 * a.cwiseAbs().maxCoeff());
  }
}
