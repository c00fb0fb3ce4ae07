// Small shared types and error classes for the foldplate library.

#ifndef FOLDPLATE_TYPES_HPP
#define FOLDPLATE_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace foldplate {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Symmetric rank-3 tensor on R^2 (third derivatives, D^3 psi components).
struct Ten3 {
  double a[2][2][2] = {};

  double& operator()(int i, int j, int k) { return a[i][j][k]; }
  double operator()(int i, int j, int k) const { return a[i][j][k]; }

  void set_zero() {
    for (auto& p : a)
      for (auto& q : p)
        for (auto& r : q) r = 0.0;
  }

  Ten3& operator+=(const Ten3& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) a[i][j][k] += o.a[i][j][k];
    return *this;
  }

  Ten3 operator*(double s) const {
    Ten3 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) r.a[i][j][k] = a[i][j][k] * s;
    return r;
  }

  /// Contraction over the first two indices: sum_i T(i,i,k).
  Vec2 trace12() const {
    return Vec2(a[0][0][0] + a[1][1][0], a[0][0][1] + a[1][1][1]);
  }
};

/// Base error for all library failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user input (configs, preconditions on arguments).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Numerical breakdown (degenerate geometry, solver failure, indefiniteness).
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}
inline void check_numeric(bool cond, const std::string& msg) {
  if (!cond) throw NumericalError(msg);
}
}  // namespace detail

}  // namespace foldplate

#endif
