#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "geoflip/vec2.hpp"

// Sign-certified planar predicates. Determinants are evaluated in double with a
// forward error bound; when the bound cannot certify the sign, the determinant
// is re-evaluated in exact rational arithmetic over the (exact) double inputs.

namespace geoflip {

namespace detail {

using rational = boost::multiprecision::cpp_rational;

// half-ulp of double, as in the classic Shewchuk bounds
inline constexpr double kEps = 1.1102230246251565e-16;
inline constexpr double kOrientErrBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kIncircleErrBound = (10.0 + 96.0 * kEps) * kEps;

inline int sign_of(const rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

inline int exact_orientation(Vec2 a, Vec2 b, Vec2 c) {
    const rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    return sign_of((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

inline int exact_incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const rational adx = rational(a.x) - rational(d.x);
    const rational ady = rational(a.y) - rational(d.y);
    const rational bdx = rational(b.x) - rational(d.x);
    const rational bdy = rational(b.y) - rational(d.y);
    const rational cdx = rational(c.x) - rational(d.x);
    const rational cdy = rational(c.y) - rational(d.y);
    const rational alift = adx * adx + ady * ady;
    const rational blift = bdx * bdx + bdy * bdy;
    const rational clift = cdx * cdx + cdy * cdy;
    return sign_of(alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                   clift * (adx * bdy - bdx * ady));
}

}  // namespace detail

// +1 counterclockwise, 0 collinear (in the given coordinates), -1 clockwise.
inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double detleft = (a.x - c.x) * (b.y - c.y);
    const double detright = (a.y - c.y) * (b.x - c.x);
    const double det = detleft - detright;

    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = -detleft - detright;
    } else {
        return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    }
    const double errbound = detail::kOrientErrBound * detsum;
    if (det >= errbound || -det >= errbound) return det > 0.0 ? 1 : -1;
    return detail::exact_orientation(a, b, c);
}

// Incircle sign for a counterclockwise triple (a,b,c): +1 if d lies strictly
// inside the circle through a, b, c; 0 if cocircular; -1 outside. With a
// clockwise triple the sign is negated.
inline int in_circumdisk(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double adx = a.x - d.x;
    const double ady = a.y - d.y;
    const double bdx = b.x - d.x;
    const double bdy = b.y - d.y;
    const double cdx = c.x - d.x;
    const double cdy = c.y - d.y;

    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double bdxcdy = bdx * cdy;
    const double cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady;
    const double adxcdy = adx * cdy;
    const double adxbdy = adx * bdy;
    const double bdxady = bdx * ady;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                       clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double errbound = detail::kIncircleErrBound * permanent;
    if (det > errbound || -det > errbound) return det > 0.0 ? 1 : -1;
    return detail::exact_incircle(a, b, c, d);
}

// Disk membership independent of the orientation of (a,b,c): +1 strictly
// inside the disk bounded by their circle, 0 on it, -1 outside.
inline int in_circumdisk_any(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const int o = orientation(a, b, c);
    if (o == 0) return 0;
    return o * in_circumdisk(a, b, c, d);
}

}  // namespace geoflip
