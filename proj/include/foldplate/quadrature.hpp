// Quadrature rules on the reference triangle and the reference edge [0,1].
//
// Edge rules are Gauss-Legendre. Triangle rules are conical products of a
// Gauss-Jacobi rule (weight 1-s) with a Gauss-Legendre rule, symmetrized over
// the six vertex permutations of the reference triangle. Both constructions
// use the Golub-Welsch eigenvalue method, so weights are positive and the
// stated polynomial exactness holds to machine precision for any degree.

#ifndef FOLDPLATE_QUADRATURE_HPP
#define FOLDPLATE_QUADRATURE_HPP

#include "foldplate/types.hpp"

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

namespace foldplate {

struct QuadratureRule {
  std::vector<Vec2> points;  // edge rules store (t, 0)
  std::vector<double> weights;
  int exact_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// Gauss nodes/weights on [-1,1] from monic three-term recurrence
// coefficients (alpha_k diagonal, beta_k off-diagonal, beta_0 = mu0).
inline std::pair<std::vector<double>, std::vector<double>> golub_welsch(
    const std::vector<double>& alpha, const std::vector<double>& beta,
    double mu0) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jac(i, i) = alpha[i];
    if (i + 1 < n) jac(i, i + 1) = jac(i + 1, i) = std::sqrt(beta[i + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
  return {x, w};
}

// n-point Gauss-Legendre on [0,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(
    int n) {
  std::vector<double> alpha(n, 0.0), beta(n, 0.0);
  for (int k = 1; k < n; ++k) beta[k] = k * k / (4.0 * k * k - 1.0);
  auto [x, w] = golub_welsch(alpha, beta, 2.0);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.5;
  }
  return {x, w};
}

// n-point Gauss-Jacobi with weight (1-s) on [0,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_jacobi10_01(
    int n) {
  std::vector<double> alpha(n), beta(n, 0.0);
  for (int k = 0; k < n; ++k) alpha[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) beta[k] = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
  auto [x, w] = golub_welsch(alpha, beta, 2.0);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.25;
  }
  return {x, w};
}

}  // namespace detail

/// Gauss rule on the reference edge [0,1]; exact degree 2*n_points - 1.
inline QuadratureRule edge_rule(int n_points) {
  detail::require(n_points >= 1 && n_points <= 10,
                  "edge_rule: point count must be in [1,10]");
  auto [x, w] = detail::gauss_legendre01(n_points);
  QuadratureRule rule;
  rule.exact_degree = 2 * n_points - 1;
  for (int i = 0; i < n_points; ++i) {
    rule.points.emplace_back(x[i], 0.0);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

/// Symmetric positive rule on the reference triangle, exact at least to
/// min_degree.
inline QuadratureRule triangle_rule(int min_degree) {
  detail::require(min_degree >= 1 && min_degree <= 10,
                  "triangle_rule: degree must be in [1,10]");
  static std::map<int, QuadratureRule> cache;
  auto it = cache.find(min_degree);
  if (it != cache.end()) return it->second;

  const int n = (min_degree + 2) / 2;  // 2n-1 >= min_degree
  auto [s, ws] = detail::gauss_jacobi10_01(n);
  auto [t, wt] = detail::gauss_legendre01(n);

  QuadratureRule rule;
  rule.exact_degree = min_degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 p(s[i], t[j] * (1.0 - s[i]));
      const double w = ws[i] * wt[j] / 6.0;
      // barycentric (l0, l1, l2) = (1-x-y, x, y); emit all 6 permutations
      const double l[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& pr : perms) {
        rule.points.emplace_back(l[pr[1]], l[pr[2]]);
        rule.weights.push_back(w);
      }
    }
  cache[min_degree] = rule;
  return rule;
}

}  // namespace foldplate

#endif
