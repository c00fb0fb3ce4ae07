// Manufactured biquartic solution u = x^2 (1-x)^2 y^2 (1-y)^2 on the unit
// square: vanishing value and gradient on the whole boundary, with the load
// f = Lap^2 u available in closed form.

#ifndef FOLDPLATE_MANUFACTURED_HPP
#define FOLDPLATE_MANUFACTURED_HPP

#include "foldplate/types.hpp"

namespace foldplate {
namespace manufactured {

inline double p(double x) { return x * x * (1.0 - x) * (1.0 - x); }
inline double dp(double x) { return 2.0 * x - 6.0 * x * x + 4.0 * x * x * x; }
inline double d2p(double x) { return 2.0 - 12.0 * x + 12.0 * x * x; }
inline double d3p(double x) { return -12.0 + 24.0 * x; }

inline double value(const Vec2& v) { return p(v.x()) * p(v.y()); }

inline Vec2 grad(const Vec2& v) {
  return Vec2(dp(v.x()) * p(v.y()), p(v.x()) * dp(v.y()));
}

inline Mat2 hess(const Vec2& v) {
  Mat2 h;
  h(0, 0) = d2p(v.x()) * p(v.y());
  h(0, 1) = h(1, 0) = dp(v.x()) * dp(v.y());
  h(1, 1) = p(v.x()) * d2p(v.y());
  return h;
}

/// f = u_xxxx + 2 u_xxyy + u_yyyy (d4p = 24).
inline double load(const Vec2& v) {
  return 24.0 * p(v.y()) + 2.0 * d2p(v.x()) * d2p(v.y()) + 24.0 * p(v.x());
}

}  // namespace manufactured
}  // namespace foldplate

#endif
