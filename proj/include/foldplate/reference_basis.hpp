// Lagrange bases on the reference triangle: principal lattice layout and
// evaluation of basis values and derivatives up to third order.

#ifndef FOLDPLATE_REFERENCE_BASIS_HPP
#define FOLDPLATE_REFERENCE_BASIS_HPP

#include "foldplate/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <vector>

namespace foldplate {

/// dim P_k on a triangle.
inline int polynomial_space_dim(int degree) {
  return (degree + 1) * (degree + 2) / 2;
}

/// Principal lattice of degree k on the reference triangle
/// T_ref = {x >= 0, y >= 0, x + y <= 1}.
///
/// Nodes are enumerated row-wise: (i/k, j/k) for j = 0..k, i = 0..k-j.
/// Local edges follow the CCW vertex order v0=(0,0), v1=(1,0), v2=(0,1):
/// edge 0: v0->v1, edge 1: v1->v2, edge 2: v2->v0.
struct Lattice {
  int degree;
  std::vector<Vec2> nodes;
  std::array<int, 3> vertex_ids;                  // lattice ids of v0,v1,v2
  std::array<std::vector<int>, 3> edge_interior;  // per edge, ordered a->b
  std::vector<int> interior_ids;                  // strictly inside T_ref

  explicit Lattice(int k) : degree(k) {
    detail::require(k >= 1 && k <= 3, "lattice degree must be in [1,3]");
    std::vector<std::vector<int>> id(k + 1, std::vector<int>(k + 1, -1));
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= k - j; ++i) {
        id[i][j] = static_cast<int>(nodes.size());
        nodes.emplace_back(double(i) / k, double(j) / k);
      }
    vertex_ids = {id[0][0], id[k][0], id[0][k]};
    for (int t = 1; t < k; ++t) {
      edge_interior[0].push_back(id[t][0]);      // along y=0
      edge_interior[1].push_back(id[k - t][t]);  // along x+y=1
      edge_interior[2].push_back(id[0][k - t]);  // along x=0, descending
    }
    for (int j = 1; j < k; ++j)
      for (int i = 1; i < k - j; ++i) interior_ids.push_back(id[i][j]);
  }

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Value and derivatives of one scalar shape function at one point.
struct ShapeDeriv {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  Ten3 third;
};

/// Nodal Lagrange basis of degree k on the principal lattice of T_ref.
///
/// Built by inverting the monomial Vandermonde at the lattice nodes; for
/// k <= 3 this is well conditioned and exact to machine precision.
class ReferenceBasis {
 public:
  explicit ReferenceBasis(int degree) : lattice_(degree) {
    const int n = lattice_.size();
    for (int a = 0; a + 0 <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) exponents_.push_back({a, b});
    Eigen::MatrixXd vand(n, n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        vand(i, a) = monomial(exponents_[a], lattice_.nodes[i]);
    coeffs_ = vand.inverse();
  }

  int degree() const { return lattice_.degree; }
  int size() const { return lattice_.size(); }
  const Lattice& lattice() const { return lattice_; }

  /// All shape functions with derivatives up to order 3 at a reference point.
  std::vector<ShapeDeriv> evaluate(const Vec2& p) const {
    const int n = size();
    std::vector<ShapeDeriv> out(n);
    for (int a = 0; a < n; ++a) {
      const auto [ea, eb] = exponents_[a];
      const double mv = monomial({ea, eb}, p);
      const Vec2 mg(dmon(ea, 1, p.x()) * powi(p.y(), eb),
                    powi(p.x(), ea) * dmon(eb, 1, p.y()));
      Mat2 mh;
      mh(0, 0) = dmon(ea, 2, p.x()) * powi(p.y(), eb);
      mh(0, 1) = mh(1, 0) = dmon(ea, 1, p.x()) * dmon(eb, 1, p.y());
      mh(1, 1) = powi(p.x(), ea) * dmon(eb, 2, p.y());
      Ten3 mt;
      auto dxy = [&](int dx, int dy) {
        return dmon(ea, dx, p.x()) * dmon(eb, dy, p.y());
      };
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) mt(i, j, k) = dxy(3 - i - j - k, i + j + k);
      for (int f = 0; f < n; ++f) {
        const double c = coeffs_(a, f);
        if (c == 0.0) continue;
        out[f].value += c * mv;
        out[f].grad += c * mg;
        out[f].hess += c * mh;
        out[f].third += mt * c;
      }
    }
    return out;
  }

  /// Shared basis instance per degree.
  static const ReferenceBasis& get(int degree) {
    static std::map<int, ReferenceBasis> cache;
    auto it = cache.find(degree);
    if (it == cache.end()) it = cache.emplace(degree, ReferenceBasis(degree)).first;
    return it->second;
  }

 private:
  static double powi(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }
  static double monomial(std::pair<int, int> e, const Vec2& p) {
    return powi(p.x(), e.first) * powi(p.y(), e.second);
  }
  // d^m/dx^m x^e
  static double dmon(int e, int m, double x) {
    if (m > e) return 0.0;
    double c = 1.0;
    for (int i = 0; i < m; ++i) c *= double(e - i);
    return c * powi(x, e - m);
  }

  Lattice lattice_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd coeffs_;  // coeffs_(a, f): monomial a of shape f
};

}  // namespace foldplate

#endif
