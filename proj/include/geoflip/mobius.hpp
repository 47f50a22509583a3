#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "geoflip/config.hpp"
#include "geoflip/vec2.hpp"

namespace geoflip {

using complexd = std::complex<double>;

// Orientation-preserving isometry of the Poincaré disk,
//   z  ->  (a z + b) / (conj(b) z + conj(a)),   |a|^2 - |b|^2 = 1.
// The pair is closed under composition and inversion; -M acts like M.
struct Mobius {
    complexd a{1.0, 0.0};
    complexd b{0.0, 0.0};

    static Mobius identity() { return {}; }

    // translation along the axis through the origin in direction theta,
    // by hyperbolic distance t
    static Mobius axis_translation(double theta, double t) {
        const double c = std::cosh(t / 2.0);
        const double s = std::sinh(t / 2.0);
        return {complexd{c, 0.0}, std::polar(s, theta)};
    }

    // maps p to the origin
    static Mobius point_to_origin(Vec2 p) {
        const complexd z = to_complex(p);
        const double f = 1.0 / std::sqrt(1.0 - std::norm(z));
        return {complexd{f, 0.0}, -z * f};
    }

    double det() const { return std::norm(a) - std::norm(b); }

    void renormalize() {
        const double d = det();
        if (!(d > 0.0)) throw numeric_error("mobius: non-positive determinant");
        const double f = 1.0 / std::sqrt(d);
        a *= f;
        b *= f;
    }

    Vec2 apply(Vec2 p) const {
        const complexd z = to_complex(p);
        return to_vec((a * z + b) / (std::conj(b) * z + std::conj(a)));
    }

    Mobius compose(const Mobius& h) const {
        Mobius r{a * h.a + b * std::conj(h.b), a * h.b + b * std::conj(h.a)};
        r.renormalize();
        return r;
    }

    Mobius inverse() const { return {std::conj(a), -b}; }

    bool is_identity(double tol) const {
        const double dp = std::abs(a - 1.0) + std::abs(b);
        const double dm = std::abs(a + 1.0) + std::abs(b);
        return std::min(dp, dm) <= tol;
    }

    // distance between the maps, insensitive to the +/- ambiguity
    friend double map_distance(const Mobius& g, const Mobius& h) {
        const double dp = std::abs(g.a - h.a) + std::abs(g.b - h.b);
        const double dm = std::abs(g.a + h.a) + std::abs(g.b + h.b);
        return std::min(dp, dm);
    }

    // Fixed points on the unit circle for a hyperbolic element, as
    // (repelling, attracting).  The translation axis runs from the first
    // to the second.
    std::pair<Vec2, Vec2> axis_endpoints() const {
        // conj(b) z^2 + (conj(a) - a) z - b = 0
        const complexd A = std::conj(b);
        const complexd B = std::conj(a) - a;
        const complexd C = -b;
        if (std::abs(A) < 1e-300) throw numeric_error("mobius: not a translation");
        const complexd disc = std::sqrt(B * B - 4.0 * A * C);
        const complexd z1 = (-B + disc) / (2.0 * A);
        const complexd z2 = (-B - disc) / (2.0 * A);
        // |derivative| at z: 1/|conj(b) z + conj(a)|^2; attracting where < 1
        const double d1 = std::norm(std::conj(b) * z1 + std::conj(a));
        Vec2 rep = to_vec(z2), att = to_vec(z1);
        if (d1 < 1.0) std::swap(rep, att);
        return {rep, att};
    }
};

}  // namespace geoflip
