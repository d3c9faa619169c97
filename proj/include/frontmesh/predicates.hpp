#pragma once

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "frontmesh/vec3.hpp"

namespace frontmesh {

namespace detail {

// Wide enough that differences and degree-4 products of doubles whose
// exponents differ by less than ~200 binary orders are exact.
using ExactFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<1100, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon() / 2;

}  // namespace detail

/// Positive if a, b, c are counter-clockwise, negative if clockwise, zero if
/// collinear. The sign is exact.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double left = (a.x - c.x) * (b.y - c.y);
  const double right = (a.y - c.y) * (b.x - c.x);
  const double det = left - right;
  const double bound = (3.0 + 16.0 * detail::kEps) * detail::kEps * (std::fabs(left) + std::fabs(right));
  if (std::fabs(det) > bound) return det;

  using F = detail::ExactFloat;
  const F e = (F(a.x) - F(c.x)) * (F(b.y) - F(c.y)) - (F(a.y) - F(c.y)) * (F(b.x) - F(c.x));
  return e.sign() > 0 ? 1.0 : (e.sign() < 0 ? -1.0 : 0.0);
}

/// Positive if d lies strictly inside the circle through the
/// counter-clockwise triangle a, b, c; zero if cocircular. The sign is exact.
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bc = bdx * cdy - cdx * bdy, ca = cdx * ady - adx * cdy, ab = adx * bdy - bdx * ady;
  const double al = adx * adx + ady * ady, bl = bdx * bdx + bdy * bdy, cl = cdx * cdx + cdy * cdy;
  const double det = al * bc + bl * ca + cl * ab;
  const double permanent = (std::fabs(bdx * cdy) + std::fabs(cdx * bdy)) * al +
                           (std::fabs(cdx * ady) + std::fabs(adx * cdy)) * bl +
                           (std::fabs(adx * bdy) + std::fabs(bdx * ady)) * cl;
  const double bound = (10.0 + 96.0 * detail::kEps) * detail::kEps * permanent;
  if (std::fabs(det) > bound) return det;

  using F = detail::ExactFloat;
  const F xa = F(a.x) - F(d.x), ya = F(a.y) - F(d.y);
  const F xb = F(b.x) - F(d.x), yb = F(b.y) - F(d.y);
  const F xc = F(c.x) - F(d.x), yc = F(c.y) - F(d.y);
  const F e = (xa * xa + ya * ya) * (xb * yc - xc * yb) + (xb * xb + yb * yb) * (xc * ya - xa * yc) +
              (xc * xc + yc * yc) * (xa * yb - xb * ya);
  return e.sign() > 0 ? 1.0 : (e.sign() < 0 ? -1.0 : 0.0);
}

}  // namespace frontmesh
