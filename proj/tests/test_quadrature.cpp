// Quadrature rules and transported edge data against analytic oracles.

#include "foldplate/isoparametric.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/quadrature.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace foldplate;

namespace {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_integral(int a, int b) {
  double num = 1.0;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  double den = 1.0;
  for (int i = 2; i <= a + b + 2; ++i) den *= i;
  return num / den;
}

double integrate(const QuadratureRule& rule,
                 const std::function<double(const Vec2&)>& f) {
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * f(rule.points[q]);
  return sum;
}

}  // namespace

TEST(TriangleRule, WeightsPositiveAndSumToArea) {
  for (int deg = 1; deg <= 10; ++deg) {
    const auto rule = triangle_rule(deg);
    double sum = 0.0;
    for (double w : rule.weights) {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 0.5, 1e-14) << "degree " << deg;
  }
}

TEST(TriangleRule, MonomialExactness) {
  for (int deg = 1; deg <= 10; ++deg) {
    const auto rule = triangle_rule(deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        const double got = integrate(rule, [&](const Vec2& p) {
          return std::pow(p.x(), a) * std::pow(p.y(), b);
        });
        EXPECT_NEAR(got, monomial_integral(a, b), 1e-14)
            << "deg " << deg << " monomial x^" << a << " y^" << b;
      }
  }
}

TEST(TriangleRule, SpecExamples) {
  EXPECT_NEAR(integrate(triangle_rule(2), [](const Vec2&) { return 1.0; }), 0.5,
              1e-15);
  EXPECT_NEAR(
      integrate(triangle_rule(2), [](const Vec2& p) { return p.x() * p.y(); }),
      1.0 / 24.0, 1e-15);
  // int x^6 = 1/((6+1)(6+2)) = 1/56
  EXPECT_NEAR(integrate(triangle_rule(6),
                        [](const Vec2& p) { return std::pow(p.x(), 6); }),
              1.0 / 56.0, 1e-14);
}

TEST(TriangleRule, SymmetricUnderVertexPermutations) {
  const auto rule = triangle_rule(6);
  // a deliberately asymmetric integrand must give identical results under
  // any relabeling of barycentric coordinates
  auto f = [](double l0, double l1, double l2) {
    return l0 * l0 * l1 + 0.3 * l2 * l2 * l2 * l1;
  };
  double v01 = 0.0, v12 = 0.0, v20 = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const double x = rule.points[q].x(), y = rule.points[q].y();
    const double l0 = 1.0 - x - y;
    v01 += rule.weights[q] * f(l0, x, y);
    v12 += rule.weights[q] * f(x, y, l0);
    v20 += rule.weights[q] * f(y, l0, x);
  }
  EXPECT_NEAR(v01, v12, 1e-15);
  EXPECT_NEAR(v01, v20, 1e-15);
}

TEST(TriangleRule, RejectsUnsupportedDegree) {
  EXPECT_THROW(triangle_rule(0), ConfigError);
  EXPECT_THROW(triangle_rule(11), ConfigError);
}

TEST(EdgeRule, GaussExactness) {
  EXPECT_NEAR(integrate(edge_rule(1), [](const Vec2&) { return 1.0; }), 1.0,
              1e-15);
  EXPECT_NEAR(integrate(edge_rule(2),
                        [](const Vec2& p) { return std::pow(p.x(), 3); }),
              0.25, 1e-15);
  EXPECT_NEAR(integrate(edge_rule(5),
                        [](const Vec2& p) { return std::pow(p.x(), 8); }),
              1.0 / 9.0, 1e-14);
  for (int n = 1; n <= 10; ++n) {
    const auto rule = edge_rule(n);
    EXPECT_EQ(rule.exact_degree, 2 * n - 1);
    for (int d = 0; d <= rule.exact_degree; ++d) {
      const double got =
          integrate(rule, [&](const Vec2& p) { return std::pow(p.x(), d); });
      EXPECT_NEAR(got, 1.0 / (d + 1), 1e-13) << "n=" << n << " t^" << d;
    }
  }
  EXPECT_THROW(edge_rule(0), ConfigError);
  EXPECT_THROW(edge_rule(11), ConfigError);
}

TEST(PhysicalEdgeData, IdentityEmbeddedHypotenuse) {
  const Mesh mesh = fptest::two_element_square();
  // element 0 = (0,0),(1,0),(1,1); its local edge 2 runs (1,1)->(0,0): the
  // diagonal. Find the diagonal edge and check from whichever side is plus.
  int diag = -1;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (!mesh.edges[e].is_boundary()) diag = e;
  ASSERT_GE(diag, 0);
  const auto data = physical_edge_data(mesh, diag, edge_rule(4));
  double total = 0.0;
  for (int q = 0; q < data.size(); ++q) {
    total += data.weights[q];
    EXPECT_NEAR(data.normals[q].norm(), 1.0, 1e-14);
    // normal is perpendicular to the diagonal direction (1,1)
    EXPECT_NEAR(std::abs(data.normals[q].dot(Vec2(1, 1).normalized())), 0.0,
                1e-13);
  }
  EXPECT_NEAR(total, std::sqrt(2.0), 1e-13);
}

TEST(PhysicalEdgeData, StraightEdgeLengthAndBoundaryPerimeter) {
  Mesh mesh = build_structured_mesh(4, {}, 2);
  classify_edges(mesh, BoundarySpec::all_boundary());
  const auto rule = edge_rule(5);
  double perimeter = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto data = physical_edge_data(mesh, e, rule);
    double len = 0.0;
    for (double w : data.weights) len += w;
    EXPECT_NEAR(len, mesh.edges[e].h_s, 1e-13);
    if (mesh.edges[e].is_boundary()) {
      perimeter += len;
      EXPECT_NEAR(len, 0.25, 1e-14);
    }
  }
  EXPECT_NEAR(perimeter, 4.0, 1e-12);
}

TEST(PhysicalEdgeData, CurvedInterfaceArclengthMatchesAdaptiveOracle) {
  Mesh mesh = build_structured_mesh(4, {InterfaceKind::Quadratic, 2}, 2);
  classify_edges(mesh, BoundarySpec::all_boundary());
  const auto rule = edge_rule(8);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edges[e].cls != EdgeClass::Interface) continue;
    const double y0 = mesh.nodes[mesh.edges[e].v0].y();
    const double y1 = mesh.nodes[mesh.edges[e].v1].y();
    const auto [lo, hi] = std::minmax(y0, y1);
    // the quadratic edge reproduces the curve exactly, so its length is the
    // true arclength integral of the curve
    const double oracle = fptest::adaptive_simpson(
        [](double y) {
          const double dx = -2.0 / 3.0 * (1.0 - 2.0 * y);
          return std::sqrt(1.0 + dx * dx);
        },
        lo, hi);
    const auto data = physical_edge_data(mesh, e, rule);
    double len = 0.0;
    for (double w : data.weights) len += w;
    EXPECT_NEAR(len, oracle, 1e-10 * oracle);
  }
}

TEST(PhysicalEdgeData, NormalsAntiparallelAcrossSharedEdges) {
  Mesh mesh = build_structured_mesh(4, {InterfaceKind::Sine, 2}, 2);
  classify_edges(mesh, BoundarySpec::all_boundary());
  const auto rule = edge_rule(4);
  const ReferenceBasis& geo = ReferenceBasis::get(2);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.is_boundary()) continue;
    const auto plus = physical_edge_data(mesh, e, rule);
    // recompute the normal from the minus side at matched points
    for (int q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q].x();
      const Vec2 ref_m = edge_ref_point(edge.local_edge_minus, 1.0 - t);
      const auto md = map_derivatives(mesh, edge.element_minus, ref_m);
      EXPECT_LT((md.point - plus.points[q]).norm(), 1e-13);
      const Vec2 nm = (md.det() * md.jacobian.inverse().transpose() *
                       reference_edge_normal(edge.local_edge_minus))
                          .normalized();
      EXPECT_LT((nm + plus.normals[q]).norm(), 1e-12);
    }
  }
  (void)geo;
}

TEST(PhysicalEdgeData, DivergenceTheoremPerElement) {
  // int_T div F dx = int_{dT} F . eta ds for F = (x^2, x y), div F = 3x
  for (const bool curved_case : {false, true}) {
    Mesh mesh = curved_case
                    ? build_structured_mesh(4, {InterfaceKind::Sine, 2}, 2)
                    : build_structured_mesh(4, {}, 2);
    classify_edges(mesh, BoundarySpec::all_boundary());
    const auto vrule = triangle_rule(6);
    const auto erule = edge_rule(6);
    const ReferenceBasis& geo = ReferenceBasis::get(2);
    std::vector<std::vector<ShapeDeriv>> table;
    for (const auto& p : vrule.points) table.push_back(geo.evaluate(p));

    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto nodes = mesh.element_nodes(e);
      double vol = 0.0;
      for (int q = 0; q < vrule.size(); ++q) {
        const auto md = map_derivatives_from_table(
            nodes, table[q], vrule.points[q], mesh.elements[e].curved);
        vol += vrule.weights[q] * md.det() * 3.0 * md.point.x();
      }
      double surf = 0.0;
      for (int le = 0; le < 3; ++le) {
        const int eid = mesh.elements[e].edge_ids[le];
        const auto data = physical_edge_data(mesh, eid, erule);
        const double sign = mesh.edges[eid].element_plus == e ? 1.0 : -1.0;
        for (int q = 0; q < data.size(); ++q) {
          const Vec2 f(data.points[q].x() * data.points[q].x(),
                       data.points[q].x() * data.points[q].y());
          surf += sign * data.weights[q] * f.dot(data.normals[q]);
        }
      }
      EXPECT_NEAR(vol, surf, 1e-10 * std::max(1.0, std::abs(vol)))
          << "element " << e << " curved_case " << curved_case;
    }
  }
}
