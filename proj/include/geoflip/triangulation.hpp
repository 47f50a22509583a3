#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "geoflip/config.hpp"
#include "geoflip/kernel.hpp"
#include "geoflip/surface.hpp"

namespace geoflip {

// Directed half-edge handle: edge idx of triangle tri is the one opposite
// vertex slot idx, running from slot idx+1 to slot idx+2.
struct EdgeRef {
    std::int32_t tri = -1;
    std::int32_t idx = -1;
    friend bool operator==(EdgeRef, EdgeRef) = default;
};

// Triangulation of a surface with one representative lift per vertex and one
// lift per triangle, encoded by three deck transformations of which at least
// one is the identity.
template <class S>
struct Triangulation {
    using Surface = S;
    using Element = typename S::Element;

    struct Vertex {
        Vec2 rep;
        std::int32_t incident = -1;
    };

    struct Triangle {
        std::array<std::int32_t, 3> v{-1, -1, -1};
        std::array<std::int32_t, 3> nbr{-1, -1, -1};
        std::array<std::int32_t, 3> nbr_index{-1, -1, -1};
        std::array<Element, 3> iso{};
    };

    S surface;
    std::vector<Vertex> vertices;
    std::vector<Triangle> triangles;

    explicit Triangulation(S s) : surface(std::move(s)) {}

    static constexpr int genus() { return S::genus; }
    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return triangles.size(); }
    std::size_t edge_count() const { return triangles.size() * 3 / 2; }
};

template <class S>
std::array<Vec2, 3> lift_triangle(const Triangulation<S>& T, std::int32_t t) {
    const auto& tri = T.triangles[static_cast<std::size_t>(t)];
    std::array<Vec2, 3> out;
    for (int k = 0; k < 3; ++k)
        out[static_cast<std::size_t>(k)] = T.surface.apply(
            tri.iso[static_cast<std::size_t>(k)],
            T.vertices[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(k)])].rep);
    return out;
}

// Lifted endpoints of an edge, in the frame of e.tri (slot i+1 then i+2).
template <class S>
std::pair<Vec2, Vec2> edge_lift(const Triangulation<S>& T, EdgeRef e) {
    const auto p = lift_triangle(T, e.tri);
    return {p[static_cast<std::size_t>((e.idx + 1) % 3)],
            p[static_cast<std::size_t>((e.idx + 2) % 3)]};
}

template <class S>
double edge_length(const Triangulation<S>& T, EdgeRef e) {
    const auto [a, b] = edge_lift(T, e);
    return T.surface.distance(a, b);
}

// Deck transformation sigma with sigma * lift(t') adjacent to lift(t) across
// edge e. Fails if the two sides of the edge disagree.
template <class S>
typename S::Element neighbor_gluing(const Triangulation<S>& T, EdgeRef e) {
    const auto& t = T.triangles[static_cast<std::size_t>(e.tri)];
    const int i = e.idx;
    const std::int32_t t2 = t.nbr[static_cast<std::size_t>(i)];
    const int j = t.nbr_index[static_cast<std::size_t>(i)];
    if (t2 < 0 || j < 0) throw structural_error("neighbor_gluing: missing neighbor");
    const auto& u = T.triangles[static_cast<std::size_t>(t2)];
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    if (t.v[static_cast<std::size_t>(i1)] != u.v[static_cast<std::size_t>(j2)] ||
        t.v[static_cast<std::size_t>(i2)] != u.v[static_cast<std::size_t>(j1)])
        throw structural_error("neighbor_gluing: vertex mismatch across edge");
    const auto sigma = T.surface.compose(t.iso[static_cast<std::size_t>(i1)],
                                         T.surface.inverse(u.iso[static_cast<std::size_t>(j2)]));
    // the other endpoint must give the same element
    const auto sigma2 = T.surface.compose(t.iso[static_cast<std::size_t>(i2)],
                                          T.surface.inverse(u.iso[static_cast<std::size_t>(j1)]));
    if constexpr (S::geometry == GeometryKind::Euclidean) {
        if (!(sigma == sigma2)) throw structural_error("neighbor_gluing: inconsistent gluing");
    } else {
        if (!T.surface.equal(sigma, sigma2))
            throw structural_error("neighbor_gluing: inconsistent gluing");
    }
    return sigma;
}

// One EdgeRef per undirected edge, the side with the smaller (tri, idx).
template <class S>
std::vector<EdgeRef> canonical_sides(const Triangulation<S>& T) {
    std::vector<EdgeRef> out;
    out.reserve(T.edge_count());
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(T.triangles.size()); ++t) {
        const auto& tri = T.triangles[static_cast<std::size_t>(t)];
        for (std::int32_t i = 0; i < 3; ++i) {
            const std::int32_t t2 = tri.nbr[static_cast<std::size_t>(i)];
            const std::int32_t j = tri.nbr_index[static_cast<std::size_t>(i)];
            if (t2 > t || (t2 == t && j > i)) out.push_back({t, i});
        }
    }
    return out;
}

// Left-compose the isometry triple so that the slot holding the smallest
// vertex id stores the identity. Deterministic, so serialized files are
// reproducible.
template <class S>
void normalize_identity(const S& surface, typename Triangulation<S>::Triangle& tri) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (tri.v[static_cast<std::size_t>(k)] < tri.v[static_cast<std::size_t>(best)]) best = k;
    const auto left = surface.inverse(tri.iso[static_cast<std::size_t>(best)]);
    for (int k = 0; k < 3; ++k) {
        if (k == best)
            tri.iso[static_cast<std::size_t>(k)] = surface.identity();
        else
            tri.iso[static_cast<std::size_t>(k)] =
                surface.compose(left, tri.iso[static_cast<std::size_t>(k)]);
    }
}

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

template <class S>
ValidationReport validate_combinatorics(const Triangulation<S>& T) {
    ValidationReport rep;
    const auto nv = static_cast<std::int32_t>(T.vertices.size());
    const auto nt = static_cast<std::int32_t>(T.triangles.size());
    auto note = [&rep](std::string s) { rep.problems.push_back(std::move(s)); };

    if (nt % 2 != 0) note("face count must be even on a closed surface");

    for (std::int32_t t = 0; t < nt; ++t) {
        const auto& tri = T.triangles[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            const auto vi = tri.v[static_cast<std::size_t>(i)];
            const auto ni = tri.nbr[static_cast<std::size_t>(i)];
            const auto xi = tri.nbr_index[static_cast<std::size_t>(i)];
            if (vi < 0 || vi >= nv) note("triangle " + std::to_string(t) + ": bad vertex ref");
            if (ni < 0 || ni >= nt || xi < 0 || xi > 2) {
                note("triangle " + std::to_string(t) + " edge " + std::to_string(i) +
                     ": bad neighbor ref");
                continue;
            }
            if (ni == t && xi == i) {
                note("triangle " + std::to_string(t) + " edge " + std::to_string(i) +
                     ": glued to itself");
                continue;
            }
            const auto& other = T.triangles[static_cast<std::size_t>(ni)];
            if (other.nbr[static_cast<std::size_t>(xi)] != t ||
                other.nbr_index[static_cast<std::size_t>(xi)] != i)
                note("triangle " + std::to_string(t) + " edge " + std::to_string(i) +
                     ": neighbor reciprocity broken");
            if (tri.v[static_cast<std::size_t>((i + 1) % 3)] !=
                    other.v[static_cast<std::size_t>((xi + 2) % 3)] ||
                tri.v[static_cast<std::size_t>((i + 2) % 3)] !=
                    other.v[static_cast<std::size_t>((xi + 1) % 3)])
                note("triangle " + std::to_string(t) + " edge " + std::to_string(i) +
                     ": vertex ids disagree across edge");
        }
        bool has_id = false;
        for (int i = 0; i < 3; ++i) {
            if constexpr (S::geometry == GeometryKind::Euclidean) {
                has_id = has_id || S::is_identity(tri.iso[static_cast<std::size_t>(i)]);
            } else {
                has_id = has_id || T.surface.is_identity(tri.iso[static_cast<std::size_t>(i)]);
            }
        }
        if (!has_id) note("triangle " + std::to_string(t) + ": no identity isometry");

        const auto lift = lift_triangle(T, t);
        const int orient = orientation(T.surface.walk_point(lift[0]), T.surface.walk_point(lift[1]),
                                       T.surface.walk_point(lift[2]));
        if (orient <= 0)
            note("triangle " + std::to_string(t) + ": lift not counterclockwise");
    }

    for (std::int32_t v = 0; v < nv; ++v) {
        const auto& vert = T.vertices[static_cast<std::size_t>(v)];
        if (vert.incident < 0 || vert.incident >= nt) {
            note("vertex " + std::to_string(v) + ": bad incident triangle");
            continue;
        }
        const auto& tri = T.triangles[static_cast<std::size_t>(vert.incident)];
        if (tri.v[0] != v && tri.v[1] != v && tri.v[2] != v)
            note("vertex " + std::to_string(v) + ": incident triangle does not list it");
        const auto [p0, g] = T.surface.canonicalize(vert.rep);
        bool id;
        if constexpr (S::geometry == GeometryKind::Euclidean)
            id = S::is_identity(g);
        else
            id = T.surface.is_identity(g);
        if (!id || norm(p0 - vert.rep) > 1e-9)
            note("vertex " + std::to_string(v) + ": representative not canonical");
    }

    // Euler characteristic with |E| = 3|F|/2
    const auto euler = static_cast<std::int64_t>(nv) - static_cast<std::int64_t>(nt) * 3 / 2 +
                       static_cast<std::int64_t>(nt);
    if (euler != 2 - 2 * static_cast<std::int64_t>(S::genus))
        note("Euler characteristic " + std::to_string(euler) + " does not match genus");
    return rep;
}

template <class S>
std::pair<double, double> diameter_bounds(const Triangulation<S>& T) {
    double lo = 0.0, hi = 0.0;
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(T.triangles.size()); ++t) {
        const auto p = lift_triangle(T, t);
        const double d = triangle_diameter(p[0], p[1], p[2], S::geometry);
        lo = std::max(lo, d);
        hi += d;
    }
    return {lo, hi};
}

namespace detail {

// Lifts of the segment that meet the (slightly enlarged) fundamental domain.
inline std::vector<std::pair<Vec2, Vec2>> domain_lifts(const TorusSurface& s, Vec2 a, Vec2 b,
                                                       const Config&) {
    // walk the segment through lattice cells; every cell it touches, plus a
    // one-cell margin, contributes the translate that pulls it near the domain
    const auto [aa, ab] = s.lattice_coords(a);
    const auto [ba, bb] = s.lattice_coords(b);
    std::set<std::pair<std::int64_t, std::int64_t>> cells;
    const int steps = 2 + static_cast<int>(4.0 * (std::abs(ba - aa) + std::abs(bb - ab)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const double ca = aa + t * (ba - aa);
        const double cb = ab + t * (bb - ab);
        const auto m0 = static_cast<std::int64_t>(std::floor(ca));
        const auto n0 = static_cast<std::int64_t>(std::floor(cb));
        for (std::int64_t dm = -1; dm <= 1; ++dm)
            for (std::int64_t dn = -1; dn <= 1; ++dn) cells.insert({m0 + dm, n0 + dn});
    }
    std::vector<std::pair<Vec2, Vec2>> out;
    out.reserve(cells.size());
    for (const auto& [m, n] : cells) {
        const Vec2 t = s.translation({m, n});
        out.push_back({a - t, b - t});
    }
    return out;
}

inline std::vector<std::pair<Vec2, Vec2>> domain_lifts(const BolzaSurface& s, Vec2 a, Vec2 b,
                                                       const Config& cfg) {
    std::vector<std::pair<Vec2, Vec2>> out;
    for (const auto& g : s.tiles_along_segment(a, b, cfg)) {
        const auto gi = s.inverse(g);
        out.push_back({s.apply(gi, a), s.apply(gi, b)});
    }
    return out;
}

struct BoxedSegment {
    Vec2 a, b;        // walk coordinates (Klein for the hyperbolic case)
    Vec2 lo, hi;      // bounding box
    std::int32_t edge;
};

}  // namespace detail

// Geometric validity: no two edge lifts intersect in their interiors. Every
// crossing on the surface has a lift inside the fundamental domain, so it is
// enough to test the lifts that meet the domain, pairwise, with a sweep over
// bounding boxes. Lift pairs that share an endpoint are straight chords in
// walk coordinates and cannot cross elsewhere.
template <class S>
bool validate_geometric(const Triangulation<S>& T, const Config& cfg = default_config()) {
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(T.triangles.size()); ++t) {
        const auto p = lift_triangle(T, t);
        if (orientation(T.surface.walk_point(p[0]), T.surface.walk_point(p[1]),
                        T.surface.walk_point(p[2])) <= 0)
            return false;
    }

    std::vector<detail::BoxedSegment> segs;
    const auto sides = canonical_sides(T);
    for (std::size_t ei = 0; ei < sides.size(); ++ei) {
        const auto [a, b] = edge_lift(T, sides[ei]);
        if (norm(a - b) == 0.0) return false;
        for (const auto& [la, lb] : detail::domain_lifts(T.surface, a, b, cfg)) {
            detail::BoxedSegment s;
            s.a = T.surface.walk_point(la);
            s.b = T.surface.walk_point(lb);
            s.lo = {std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)};
            s.hi = {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)};
            s.edge = static_cast<std::int32_t>(ei);
            segs.push_back(s);
            if (segs.size() > 64 * cfg.group_ball_cap)
                throw resource_error("validate_geometric: too many segment lifts");
        }
    }
    std::sort(segs.begin(), segs.end(),
              [](const detail::BoxedSegment& x, const detail::BoxedSegment& y) { return x.lo.x < y.lo.x; });
    constexpr double kShared = 1e-10;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            if (segs[j].lo.x > segs[i].hi.x) break;
            if (segs[j].lo.y > segs[i].hi.y || segs[j].hi.y < segs[i].lo.y) continue;
            const auto& s1 = segs[i];
            const auto& s2 = segs[j];
            if (norm(s1.a - s2.a) < kShared || norm(s1.a - s2.b) < kShared ||
                norm(s1.b - s2.a) < kShared || norm(s1.b - s2.b) < kShared)
                continue;
            if (detail::straight_segments_intersect_interior(s1.a, s1.b, s2.a, s2.b)) return false;
        }
    }
    return true;
}

// Replace the two triangles adjacent to e by the other diagonal of their
// lifted quadrilateral. The quadrilateral must be strictly convex; isometries
// of the two new triangles are rebuilt from the old ones and the gluing, then
// renormalized so each triangle stores an identity again.
template <class S>
EdgeRef flip(Triangulation<S>& T, EdgeRef e) {
    using Triangle = typename Triangulation<S>::Triangle;
    const std::int32_t ta = e.tri;
    const int i = e.idx;
    Triangle A = T.triangles[static_cast<std::size_t>(ta)];
    const std::int32_t tb = A.nbr[static_cast<std::size_t>(i)];
    if (tb == ta) throw contract_error("flip: edge glued to the same triangle");
    const int j = A.nbr_index[static_cast<std::size_t>(i)];
    Triangle B = T.triangles[static_cast<std::size_t>(tb)];

    const auto sigma = neighbor_gluing(T, e);
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;

    const std::int32_t vA = A.v[static_cast<std::size_t>(i)];
    const std::int32_t vB = A.v[static_cast<std::size_t>(i1)];
    const std::int32_t vC = A.v[static_cast<std::size_t>(i2)];
    const std::int32_t vD = B.v[static_cast<std::size_t>(j)];

    const auto isoA = A.iso[static_cast<std::size_t>(i)];
    const auto isoB = A.iso[static_cast<std::size_t>(i1)];
    const auto isoC = A.iso[static_cast<std::size_t>(i2)];
    const auto isoD = T.surface.compose(sigma, B.iso[static_cast<std::size_t>(j)]);

    const Vec2 pA = T.surface.apply(isoA, T.vertices[static_cast<std::size_t>(vA)].rep);
    const Vec2 pB = T.surface.apply(isoB, T.vertices[static_cast<std::size_t>(vB)].rep);
    const Vec2 pC = T.surface.apply(isoC, T.vertices[static_cast<std::size_t>(vC)].rep);
    const Vec2 pD = T.surface.apply(isoD, T.vertices[static_cast<std::size_t>(vD)].rep);

    // strict convexity of the quadrilateral A, B, D, C in walk coordinates
    const Vec2 wA = T.surface.walk_point(pA), wB = T.surface.walk_point(pB);
    const Vec2 wC = T.surface.walk_point(pC), wD = T.surface.walk_point(pD);
    if (orientation(wA, wB, wD) <= 0 || orientation(wB, wD, wC) <= 0 ||
        orientation(wD, wC, wA) <= 0 || orientation(wC, wA, wB) <= 0)
        throw contract_error("flip: lifted quadrilateral not strictly convex");

    // four outer slots of the old pair and where they land in the new pair
    struct Slot {
        std::int32_t tri;
        std::int32_t idx;
    };
    const std::array<Slot, 4> old_outer{Slot{ta, i1}, Slot{ta, i2}, Slot{tb, j1}, Slot{tb, j2}};
    const std::array<Slot, 4> new_slot{Slot{tb, 1}, Slot{ta, 2}, Slot{ta, 0}, Slot{tb, 0}};
    auto remap = [&](Slot s) -> Slot {
        for (int k = 0; k < 4; ++k)
            if (old_outer[static_cast<std::size_t>(k)].tri == s.tri &&
                old_outer[static_cast<std::size_t>(k)].idx == s.idx)
                return new_slot[static_cast<std::size_t>(k)];
        return s;
    };

    Triangle nA;  // id ta: (A, B, D)
    nA.v = {vA, vB, vD};
    nA.iso = {isoA, isoB, isoD};
    Triangle nB;  // id tb: (A, D, C)
    nB.v = {vA, vD, vC};
    nB.iso = {isoA, isoD, isoC};
    nA.nbr[1] = tb;
    nA.nbr_index[1] = 2;
    nB.nbr[2] = ta;
    nB.nbr_index[2] = 1;

    auto far_of = [&](Slot s) -> Slot {
        const auto& tri = (s.tri == ta) ? A : B;
        return {tri.nbr[static_cast<std::size_t>(s.idx)],
                tri.nbr_index[static_cast<std::size_t>(s.idx)]};
    };
    std::array<Slot, 4> far{};
    for (int k = 0; k < 4; ++k)
        far[static_cast<std::size_t>(k)] = remap(far_of(old_outer[static_cast<std::size_t>(k)]));

    auto slot_ref = [&](Slot s) -> std::pair<std::int32_t&, std::int32_t&> {
        Triangle& tri = (s.tri == ta) ? nA : (s.tri == tb) ? nB : T.triangles[static_cast<std::size_t>(s.tri)];
        return {tri.nbr[static_cast<std::size_t>(s.idx)], tri.nbr_index[static_cast<std::size_t>(s.idx)]};
    };
    for (int k = 0; k < 4; ++k) {
        const Slot ns = new_slot[static_cast<std::size_t>(k)];
        const Slot fs = far[static_cast<std::size_t>(k)];
        auto [n1, x1] = slot_ref(ns);
        n1 = fs.tri;
        x1 = fs.idx;
        auto [n2, x2] = slot_ref(fs);
        n2 = ns.tri;
        x2 = ns.idx;
    }

    normalize_identity<S>(T.surface, nA);
    normalize_identity<S>(T.surface, nB);
    T.triangles[static_cast<std::size_t>(ta)] = nA;
    T.triangles[static_cast<std::size_t>(tb)] = nB;
    T.vertices[static_cast<std::size_t>(vA)].incident = ta;
    T.vertices[static_cast<std::size_t>(vB)].incident = ta;
    T.vertices[static_cast<std::size_t>(vD)].incident = ta;
    T.vertices[static_cast<std::size_t>(vC)].incident = tb;
    return {ta, 1};
}

}  // namespace geoflip
