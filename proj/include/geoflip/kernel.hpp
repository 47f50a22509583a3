#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "geoflip/config.hpp"
#include "geoflip/mobius.hpp"
#include "geoflip/predicates.hpp"
#include "geoflip/vec2.hpp"

namespace geoflip {

enum class GeometryKind { Euclidean, Hyperbolic };

struct EuclideanTranslation {
    double dx = 0.0;
    double dy = 0.0;

    static EuclideanTranslation identity() { return {}; }
    Vec2 apply(Vec2 p) const { return {p.x + dx, p.y + dy}; }
    EuclideanTranslation compose(EuclideanTranslation h) const { return {dx + h.dx, dy + h.dy}; }
    EuclideanTranslation inverse() const { return {-dx, -dy}; }
};

inline Vec2 apply_isometry(const EuclideanTranslation& g, Vec2 p) { return g.apply(p); }
inline Vec2 apply_isometry(const Mobius& g, Vec2 p) { return g.apply(p); }
inline EuclideanTranslation compose(const EuclideanTranslation& g, const EuclideanTranslation& h) {
    return g.compose(h);
}
inline Mobius compose(const Mobius& g, const Mobius& h) { return g.compose(h); }
inline EuclideanTranslation inverse(const EuclideanTranslation& g) { return g.inverse(); }
inline Mobius inverse(const Mobius& g) { return g.inverse(); }

inline double euclidean_distance(Vec2 p, Vec2 q) { return norm(p - q); }

// Poincaré disk distance, 2 artanh(|z-w| / |1 - conj(z) w|).
inline double hyperbolic_distance(Vec2 p, Vec2 q) {
    const complexd z = to_complex(p), w = to_complex(q);
    const double num = std::abs(z - w);
    const double den = std::abs(1.0 - std::conj(z) * w);
    if (num == 0.0) return 0.0;
    const double r = num / den;
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::atanh(r);
}

inline double distance(Vec2 p, Vec2 q, GeometryKind geom) {
    return geom == GeometryKind::Euclidean ? euclidean_distance(p, q) : hyperbolic_distance(p, q);
}

// Poincaré -> Beltrami-Klein. Geodesics become straight chords, so orientation
// tests on Klein coordinates decide hyperbolic sidedness.
inline Vec2 klein(Vec2 z) {
    const double f = 2.0 / (1.0 + norm2(z));
    return {f * z.x, f * z.y};
}

// point on the disk boundary is its own Klein image; interior scales by < 2
inline Vec2 klein_to_poincare(Vec2 k) {
    const double n2 = norm2(k);
    const double f = 1.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - n2)));
    return {f * k.x, f * k.y};
}

struct EuclideanCircle {
    Vec2 center;
    double radius = 0.0;
};

// Circumscribed Euclidean circle of three points; empty for collinear input.
inline std::optional<EuclideanCircle> circumcircle(Vec2 a, Vec2 b, Vec2 c) {
    const double d = 2.0 * cross(b - a, c - a);
    if (d == 0.0) return std::nullopt;
    const double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
    const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    const Vec2 center{ux, uy};
    const double r = (norm(a - center) + norm(b - center) + norm(c - center)) / 3.0;
    return EuclideanCircle{center, r};
}

enum class CircleClass { Compact, Horocycle, Hypercycle };

// Classification of the circle through three points of the Poincaré disk.
// Compact circles stay inside the disk, horocycles touch the boundary,
// hypercycles cross it. Diagnostic only; tangency uses a tolerance window.
inline std::optional<CircleClass> classify_circumcircle(Vec2 a, Vec2 b, Vec2 c,
                                                        double tol = 1e-9) {
    const auto circ = circumcircle(a, b, c);
    if (!circ) return std::nullopt;
    const double reach = norm(circ->center) + circ->radius;
    if (std::abs(reach - 1.0) <= tol) return CircleClass::Horocycle;
    if (reach < 1.0) return CircleClass::Compact;
    return CircleClass::Hypercycle;
}

// Hyperbolic center and radius of a compact circle given in model coordinates.
inline std::pair<Vec2, double> hyperbolic_center_radius(const EuclideanCircle& circ) {
    const double cd = norm(circ.center);
    const double lo = cd - circ.radius;
    const double hi = cd + circ.radius;
    const double dlo = 2.0 * std::atanh(std::clamp(lo, -0.9999999999999999, 0.9999999999999999));
    const double dhi = 2.0 * std::atanh(std::clamp(hi, -0.9999999999999999, 0.9999999999999999));
    const double dc = (dlo + dhi) / 2.0;
    const double radius = (dhi - dlo) / 2.0;
    Vec2 dir{1.0, 0.0};
    if (cd > 0.0) dir = (1.0 / cd) * circ.center;
    const double ec = std::tanh(dc / 2.0);
    return {{ec * dir.x, ec * dir.y}, radius};
}

namespace detail {

inline bool on_open_segment_1d(double a, double b, double x) {
    return (a < x && x < b) || (b < x && x < a);
}

// Open-segment intersection of straight segments. Shared endpoints alone do
// not count; collinear overlap of positive length does.
inline bool straight_segments_intersect_interior(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
    const int o1 = orientation(p1, q1, p2);
    const int o2 = orientation(p1, q1, q2);
    const int o3 = orientation(p2, q2, p1);
    const int o4 = orientation(p2, q2, q1);

    if (o1 * o2 < 0 && o3 * o4 < 0) return true;

    if (o1 == 0 && o2 == 0) {
        // all four collinear: project on the dominant axis
        const Vec2 d = q1 - p1;
        const bool use_x = std::abs(d.x) >= std::abs(d.y);
        const double a1 = use_x ? p1.x : p1.y, b1 = use_x ? q1.x : q1.y;
        const double a2 = use_x ? p2.x : p2.y, b2 = use_x ? q2.x : q2.y;
        const double lo1 = std::min(a1, b1), hi1 = std::max(a1, b1);
        const double lo2 = std::min(a2, b2), hi2 = std::max(a2, b2);
        return std::max(lo1, lo2) < std::min(hi1, hi2);
    }
    return false;
}

}  // namespace detail

// True iff the open segments share a point. Hyperbolic segments are tested on
// Klein coordinates, where geodesics are straight.
inline bool segments_intersect_interior(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, GeometryKind geom) {
    if (p1 == q1 || p2 == q2) throw contract_error("segments_intersect_interior: zero-length segment");
    if (geom == GeometryKind::Hyperbolic) {
        return detail::straight_segments_intersect_interior(klein(p1), klein(q1), klein(p2),
                                                            klein(q2));
    }
    return detail::straight_segments_intersect_interior(p1, q1, p2, q2);
}

// The diameter of a geodesic triangle is its longest side.
inline double triangle_diameter(Vec2 a, Vec2 b, Vec2 c, GeometryKind geom) {
    return std::max({distance(a, b, geom), distance(b, c, geom), distance(a, c, geom)});
}

}  // namespace geoflip
