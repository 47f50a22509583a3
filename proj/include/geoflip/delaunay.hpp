#pragma once

#include <deque>
#include <optional>
#include <random>
#include <set>
#include <tuple>

#include "geoflip/triangulation.hpp"

namespace geoflip {

enum class FlipPolicy { Fifo, Lifo, Random };

struct FlipOrder {
    FlipPolicy policy = FlipPolicy::Fifo;
    std::uint64_t seed = 0;
};

inline const char* to_string(FlipPolicy p) {
    switch (p) {
        case FlipPolicy::Fifo: return "fifo";
        case FlipPolicy::Lifo: return "lifo";
        default: return "random";
    }
}

// ---------------------------------------------------------------------------
// Canonical edge keys: an edge is identified by its unordered vertex pair and
// the Gamma-orbit of the isometry connecting the two representative lifts,
// anchored at the lower vertex id.
// ---------------------------------------------------------------------------

template <class S>
struct EdgeKeyTraits;

template <>
struct EdgeKeyTraits<TorusSurface> {
    struct Key {
        std::int32_t va, vb;
        std::int64_t m, n;
        friend auto operator<=>(const Key&, const Key&) = default;
    };
    static Key make(const TorusSurface&, std::int32_t va, std::int32_t vb, TorusElement h) {
        if (va > vb) return {vb, va, -h.m, -h.n};
        if (va == vb) {
            // loop edge: pick the lexicographically larger of h, h^-1
            if (std::tuple(h.m, h.n) < std::tuple(-h.m, -h.n)) h = {-h.m, -h.n};
        }
        return {va, vb, h.m, h.n};
    }
};

template <>
struct EdgeKeyTraits<BolzaSurface> {
    struct Key {
        std::int32_t va, vb;
        std::array<double, 4> q;  // sign-normalized matrix entries
    };
    static std::array<double, 4> quantize(const Mobius& m) {
        std::array<double, 4> v{m.a.real(), m.a.imag(), m.b.real(), m.b.imag()};
        double s = 1.0;
        for (double c : v) {
            if (std::abs(c) > 1e-6) {
                s = c > 0 ? 1.0 : -1.0;
                break;
            }
        }
        for (auto& c : v) c *= s;
        return v;
    }
    static Key make(const BolzaSurface& s, std::int32_t va, std::int32_t vb, BolzaElement h) {
        if (va > vb) return {vb, va, quantize(h.m.inverse())};
        if (va == vb) {
            const auto q1 = quantize(h.m);
            const auto q2 = quantize(h.m.inverse());
            return {va, vb, std::max(q1, q2)};
        }
        return {va, vb, quantize(h.m)};
    }
};

template <class S>
typename EdgeKeyTraits<S>::Key edge_key(const Triangulation<S>& T, EdgeRef e) {
    const auto& tri = T.triangles[static_cast<std::size_t>(e.tri)];
    const int i1 = (e.idx + 1) % 3, i2 = (e.idx + 2) % 3;
    const auto h = T.surface.compose(T.surface.inverse(tri.iso[static_cast<std::size_t>(i1)]),
                                     tri.iso[static_cast<std::size_t>(i2)]);
    return EdgeKeyTraits<S>::make(T.surface, tri.v[static_cast<std::size_t>(i1)],
                                  tri.v[static_cast<std::size_t>(i2)], h);
}

// Duplicate detection for flipped edges; Bolza keys go through an element
// registry so drifting matrices of one group element share an id.
template <class S>
class EdgeKeySet;

template <>
class EdgeKeySet<TorusSurface> {
  public:
    explicit EdgeKeySet(const TorusSurface&, double = 0) {}
    bool insert(const EdgeKeyTraits<TorusSurface>::Key& k) { return set_.insert(k).second; }
    std::size_t size() const { return set_.size(); }

  private:
    std::set<EdgeKeyTraits<TorusSurface>::Key> set_;
};

template <>
class EdgeKeySet<BolzaSurface> {
  public:
    explicit EdgeKeySet(const BolzaSurface&, double tol = 1e-7) : registry_(tol) {}
    bool insert(const EdgeKeyTraits<BolzaSurface>::Key& k) {
        Mobius m{{k.q[0], k.q[1]}, {k.q[2], k.q[3]}};
        return set_.insert({k.va, k.vb, registry_.find_or_insert(m)}).second;
    }
    std::size_t size() const { return set_.size(); }

  private:
    ElementRegistry registry_;
    std::set<std::tuple<std::int32_t, std::int32_t, int>> set_;
};

// ---------------------------------------------------------------------------
// Local Delaunay test
// ---------------------------------------------------------------------------

// True iff the vertex opposite e in the neighboring lifted triangle lies
// strictly inside the circumdisk of this side's lift. Cocircular reads false.
template <class S>
bool is_delaunay_flippable(const Triangulation<S>& T, EdgeRef e) {
    const auto& tri = T.triangles[static_cast<std::size_t>(e.tri)];
    const std::int32_t tb = tri.nbr[static_cast<std::size_t>(e.idx)];
    if (tb == e.tri) return false;  // folded pair, nothing to flip
    const int j = tri.nbr_index[static_cast<std::size_t>(e.idx)];
    const auto sigma = neighbor_gluing(T, e);
    const auto& other = T.triangles[static_cast<std::size_t>(tb)];
    const auto isoD = T.surface.compose(sigma, other.iso[static_cast<std::size_t>(j)]);
    const Vec2 d = T.surface.apply(isoD, T.vertices[static_cast<std::size_t>(
                                             other.v[static_cast<std::size_t>(j)])].rep);
    const auto p = lift_triangle(T, e.tri);
    return in_circumdisk_any(p[0], p[1], p[2], d) > 0;
}

// ---------------------------------------------------------------------------
// Torus weight: lifted vertices strictly inside lifted circumdisks
// ---------------------------------------------------------------------------

namespace detail {

inline std::int64_t torus_triangle_weight(const Triangulation<TorusSurface>& T, std::int32_t t) {
    const auto p = lift_triangle(T, t);
    const auto circ = circumcircle(p[0], p[1], p[2]);
    if (!circ) throw numeric_error("torus_weight: degenerate triangle");
    const Vec2 u = T.surface.u();
    std::int64_t count = 0;
    const double r = circ->radius + 1e-9;
    for (const auto& vert : T.vertices) {
        // lattice ranges covering the disk around the circumcenter
        const double by = circ->center.y - vert.rep.y;
        const auto n_lo = static_cast<std::int64_t>(std::ceil((by - r) / u.y));
        const auto n_hi = static_cast<std::int64_t>(std::floor((by + r) / u.y));
        const auto lo = std::min(n_lo, n_hi), hi = std::max(n_lo, n_hi);
        for (std::int64_t n = lo; n <= hi; ++n) {
            const double bx = circ->center.x - vert.rep.x - static_cast<double>(n) * u.x;
            const auto m_lo = static_cast<std::int64_t>(std::ceil(bx - r));
            const auto m_hi = static_cast<std::int64_t>(std::floor(bx + r));
            for (std::int64_t m = m_lo; m <= m_hi; ++m) {
                const Vec2 q = T.surface.apply({m, n}, vert.rep);
                if (in_circumdisk_any(p[0], p[1], p[2], q) > 0) ++count;
            }
        }
    }
    return count;
}

}  // namespace detail

inline std::int64_t torus_weight(const Triangulation<TorusSurface>& T) {
    std::int64_t w = 0;
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(T.triangles.size()); ++t)
        w += detail::torus_triangle_weight(T, t);
    return w;
}

// ---------------------------------------------------------------------------
// Global Delaunay verification
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
bool triangle_circumdisk_empty(const Triangulation<S>& T, std::int32_t t, const Config& cfg) {
    const auto p = lift_triangle(T, t);
    const auto circ = circumcircle(p[0], p[1], p[2]);
    if (!circ) return false;

    if constexpr (S::geometry == GeometryKind::Euclidean) {
        return torus_triangle_weight(T, t) == 0;
    } else {
        // a non-compact circumdisk contains fundamental domains, hence vertices
        if (norm(circ->center) + circ->radius >= 1.0) return false;
        const auto [hc, hr] = hyperbolic_center_radius(*circ);
        const auto ball = T.surface.group_ball(hc, hr + 1e-7, cfg);
        for (const auto& g : ball) {
            for (const auto& vert : T.vertices) {
                const Vec2 q = T.surface.apply(g, vert.rep);
                // cheap reject, then skip the triangle's own corners
                if (norm(q - circ->center) > circ->radius + 1e-12) continue;
                if (norm(q - p[0]) < 1e-9 || norm(q - p[1]) < 1e-9 || norm(q - p[2]) < 1e-9)
                    continue;
                if (in_circumdisk_any(p[0], p[1], p[2], q) > 0) return false;
            }
        }
        return true;
    }
}

}  // namespace detail

template <class S>
bool is_delaunay(const Triangulation<S>& T, const Config& cfg = default_config()) {
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(T.triangles.size()); ++t)
        if (!detail::triangle_circumdisk_empty(T, t, cfg)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// The flip algorithm
// ---------------------------------------------------------------------------

struct FlipStats {
    std::int64_t flips = 0;
    double max_new_edge_length = 0.0;
    std::vector<std::int64_t> weight_trace;  // torus runs only
    std::size_t edge_keys = 0;
    std::size_t duplicate_edge_keys = 0;
};

struct FlipRunOptions {
    bool check_geometric = true;
    bool track_weight = true;  // torus runs only; ignored otherwise
};

namespace detail {

template <class S>
class Worklist {
  public:
    Worklist(FlipOrder order) : order_(order), rng_(order.seed) {}

    void push(EdgeRef e) { items_.push_back(e); }
    bool empty() const { return items_.empty(); }

    EdgeRef pop() {
        switch (order_.policy) {
            case FlipPolicy::Fifo: {
                const EdgeRef e = items_.front();
                items_.pop_front();
                return e;
            }
            case FlipPolicy::Lifo: {
                const EdgeRef e = items_.back();
                items_.pop_back();
                return e;
            }
            default: {
                const auto k = static_cast<std::size_t>(rng_() % items_.size());
                const EdgeRef e = items_[k];
                items_[k] = items_.back();
                items_.pop_back();
                return e;
            }
        }
    }

  private:
    FlipOrder order_;
    std::deque<EdgeRef> items_;
    std::mt19937_64 rng_;
};

template <class S>
void run_flip_loop(Triangulation<S>& T, Worklist<S>& work, FlipStats& stats, EdgeKeySet<S>& keys,
                   const FlipRunOptions& opt, const Config& cfg) {
    std::optional<std::int64_t> weight;
    if constexpr (S::geometry == GeometryKind::Euclidean) {
        if (opt.track_weight) {
            weight = torus_weight(T);
            if (stats.weight_trace.empty()) stats.weight_trace.push_back(*weight);
        }
    }
    while (!work.empty()) {
        const EdgeRef e = work.pop();
        if (!is_delaunay_flippable(T, e)) continue;
        if (stats.flips >= cfg.flip_budget)
            throw resource_error("flip_to_delaunay: flip budget exceeded");

        if (!keys.insert(edge_key(T, e))) ++stats.duplicate_edge_keys;

        std::int64_t old_pair = 0;
        const std::int32_t other = T.triangles[static_cast<std::size_t>(e.tri)]
                                       .nbr[static_cast<std::size_t>(e.idx)];
        if constexpr (S::geometry == GeometryKind::Euclidean) {
            if (weight)
                old_pair = torus_triangle_weight(T, e.tri) + torus_triangle_weight(T, other);
        }

        const EdgeRef diag = flip(T, e);
        ++stats.flips;
        stats.max_new_edge_length = std::max(stats.max_new_edge_length, edge_length(T, diag));

        if constexpr (S::geometry == GeometryKind::Euclidean) {
            if (weight) {
                const std::int64_t new_pair =
                    torus_triangle_weight(T, diag.tri) + torus_triangle_weight(T, other);
                *weight += new_pair - old_pair;
                stats.weight_trace.push_back(*weight);
            }
        }

        work.push({diag.tri, 0});
        work.push({diag.tri, 2});
        work.push({other, 0});
        work.push({other, 1});
    }
    stats.edge_keys = keys.size();
}

}  // namespace detail

// Performs Delaunay flips in the order given by the policy until no edge is
// Delaunay flippable. The input must be geometric; the result is the Delaunay
// triangulation of the vertex set.
template <class S>
FlipStats flip_to_delaunay(Triangulation<S>& T, FlipOrder order = {},
                           const Config& cfg = default_config(), FlipRunOptions opt = {}) {
    if (opt.check_geometric && !validate_geometric(T, cfg))
        throw contract_error("flip_to_delaunay: input is not geometric");
    FlipStats stats;
    detail::Worklist<S> work(order);
    for (const EdgeRef e : canonical_sides(T)) work.push(e);
    EdgeKeySet<S> keys(T.surface, cfg.element_match_tol);
    detail::run_flip_loop(T, work, stats, keys, opt, cfg);
    return stats;
}

// ---------------------------------------------------------------------------
// Point location and insertion
// ---------------------------------------------------------------------------

// Straight walk towards p (given in the fundamental domain). Returns the
// triangle and the deck element g with p inside g * lift(t).
template <class S>
std::pair<std::int32_t, typename S::Element> locate(const Triangulation<S>& T, Vec2 p,
                                                    std::int32_t hint = 0,
                                                    const Config& cfg = default_config()) {
    const auto nt = static_cast<std::int32_t>(T.triangles.size());
    if (nt == 0) throw contract_error("locate: empty triangulation");
    std::int32_t t = hint >= 0 && hint < nt ? hint : 0;
    auto g = T.surface.identity();
    const Vec2 wp = T.surface.walk_point(p);
    std::mt19937_64 restart_rng(0x9e3779b97f4a7c15ull);
    const std::int64_t budget = static_cast<std::int64_t>(cfg.walk_restart_factor) * nt;
    std::int64_t steps = 0, restarts = 0;
    for (;;) {
        if (++steps > budget) {
            if (++restarts > 32) throw numeric_error("locate: walk budget exceeded");
            t = static_cast<std::int32_t>(restart_rng() % static_cast<std::uint64_t>(nt));
            g = T.surface.identity();
            steps = 0;
        }
        const auto& tri = T.triangles[static_cast<std::size_t>(t)];
        std::array<Vec2, 3> q;
        for (int k = 0; k < 3; ++k)
            q[static_cast<std::size_t>(k)] = T.surface.walk_point(T.surface.apply(
                T.surface.compose(g, tri.iso[static_cast<std::size_t>(k)]),
                T.vertices[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(k)])].rep));
        int neg = -1, zero = -1;
        for (int i = 0; i < 3; ++i) {
            const int s = orientation(q[static_cast<std::size_t>((i + 1) % 3)],
                                      q[static_cast<std::size_t>((i + 2) % 3)], wp);
            if (s < 0) {
                neg = i;
                break;
            }
            if (s == 0) zero = i;
        }
        if (neg < 0) {
            // inside or on the boundary; prefer the lower triangle id on ties
            if (zero >= 0) {
                const std::int32_t t2 = tri.nbr[static_cast<std::size_t>(zero)];
                if (t2 < t) {
                    const auto sigma = neighbor_gluing(T, {t, zero});
                    return {t2, T.surface.compose(g, sigma)};
                }
            }
            return {t, g};
        }
        const auto sigma = neighbor_gluing(T, {t, neg});
        g = T.surface.compose(g, sigma);
        t = tri.nbr[static_cast<std::size_t>(neg)];
    }
}

// 1->3 split of the triangle containing p, then flip propagation. The input
// must be Delaunay; the result is Delaunay again.
template <class S>
std::int32_t insert_point(Triangulation<S>& T, Vec2 p, const Config& cfg = default_config(),
                          FlipStats* stats_out = nullptr, std::int32_t hint = -1) {
    // reject near-duplicates of existing vertex orbits
    for (std::int32_t v = 0; v < static_cast<std::int32_t>(T.vertices.size()); ++v) {
        const Vec2 rep = T.vertices[static_cast<std::size_t>(v)].rep;
        if constexpr (S::geometry == GeometryKind::Euclidean) {
            for (std::int64_t m = -1; m <= 1; ++m)
                for (std::int64_t n = -1; n <= 1; ++n)
                    if (T.surface.distance(p, T.surface.apply({m, n}, rep)) <= cfg.duplicate_tol)
                        throw contract_error("insert_point: duplicate of vertex " + std::to_string(v));
        } else {
            if (T.surface.distance(p, rep) <= cfg.duplicate_tol)
                throw contract_error("insert_point: duplicate of vertex " + std::to_string(v));
            for (int k = 0; k < 8; ++k) {
                const Vec2 img = T.surface.generator(k).apply(rep);
                if (T.surface.distance(p, img) <= cfg.duplicate_tol)
                    throw contract_error("insert_point: duplicate of vertex " + std::to_string(v));
            }
        }
    }

    const auto [t0, g] = locate(T, p, hint, cfg);
    using Triangle = typename Triangulation<S>::Triangle;
    const Triangle old = T.triangles[static_cast<std::size_t>(t0)];

    const auto vnew = static_cast<std::int32_t>(T.vertices.size());
    T.vertices.push_back({p, t0});

    // Children in the lifted frame g * lift(t0) that contains p: child k spans
    // (vnew, v[k+1], v[k+2]) and inherits the outer edge k of the old triangle.
    const std::array<std::int32_t, 3> ids{t0, static_cast<std::int32_t>(T.triangles.size()),
                                          static_cast<std::int32_t>(T.triangles.size() + 1)};
    std::array<Triangle, 3> child{};
    for (int k = 0; k < 3; ++k) {
        const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
        Triangle& c = child[static_cast<std::size_t>(k)];
        c.v = {vnew, old.v[static_cast<std::size_t>(k1)], old.v[static_cast<std::size_t>(k2)]};
        c.iso = {T.surface.identity(),
                 T.surface.compose(g, old.iso[static_cast<std::size_t>(k1)]),
                 T.surface.compose(g, old.iso[static_cast<std::size_t>(k2)])};
        // spokes to the sibling children
        c.nbr[1] = ids[static_cast<std::size_t>(k1)];
        c.nbr_index[1] = 2;
        c.nbr[2] = ids[static_cast<std::size_t>(k2)];
        c.nbr_index[2] = 1;
    }
    // degenerate split would break the ccw invariant
    for (int k = 0; k < 3; ++k) {
        const auto& c = child[static_cast<std::size_t>(k)];
        const Vec2 q0 = T.surface.walk_point(p);
        const Vec2 q1 = T.surface.walk_point(T.surface.apply(
            c.iso[1], T.vertices[static_cast<std::size_t>(c.v[1])].rep));
        const Vec2 q2 = T.surface.walk_point(T.surface.apply(
            c.iso[2], T.vertices[static_cast<std::size_t>(c.v[2])].rep));
        if (orientation(q0, q1, q2) <= 0) {
            T.vertices.pop_back();
            throw numeric_error("insert_point: point lies on an edge of the located triangle");
        }
    }
    // outer gluings, with old self-gluings remapped onto the children
    for (int k = 0; k < 3; ++k) {
        std::int32_t ft = old.nbr[static_cast<std::size_t>(k)];
        std::int32_t fi = old.nbr_index[static_cast<std::size_t>(k)];
        if (ft == t0) {  // the split triangle was glued to itself
            child[static_cast<std::size_t>(k)].nbr[0] = ids[static_cast<std::size_t>(fi)];
            child[static_cast<std::size_t>(k)].nbr_index[0] = 0;
            continue;
        }
        child[static_cast<std::size_t>(k)].nbr[0] = ft;
        child[static_cast<std::size_t>(k)].nbr_index[0] = fi;
    }

    for (int k = 0; k < 3; ++k) normalize_identity<S>(T.surface, child[static_cast<std::size_t>(k)]);
    T.triangles[static_cast<std::size_t>(t0)] = child[0];
    T.triangles.push_back(child[1]);
    T.triangles.push_back(child[2]);
    for (int k = 0; k < 3; ++k) {
        const std::int32_t ft = old.nbr[static_cast<std::size_t>(k)];
        if (ft == t0) continue;
        T.triangles[static_cast<std::size_t>(ft)].nbr[static_cast<std::size_t>(
            old.nbr_index[static_cast<std::size_t>(k)])] = ids[static_cast<std::size_t>(k)];
        T.triangles[static_cast<std::size_t>(ft)].nbr_index[static_cast<std::size_t>(
            old.nbr_index[static_cast<std::size_t>(k)])] = 0;
    }
    T.vertices[static_cast<std::size_t>(vnew)].incident = ids[0];
    for (int k = 0; k < 3; ++k)
        T.vertices[static_cast<std::size_t>(old.v[static_cast<std::size_t>((k + 1) % 3)])].incident =
            ids[static_cast<std::size_t>(k)];

    // restore the Delaunay property from the link of the new vertex
    FlipStats local;
    FlipStats& stats = stats_out ? *stats_out : local;
    detail::Worklist<S> work({FlipPolicy::Fifo, 0});
    for (int k = 0; k < 3; ++k) work.push({ids[static_cast<std::size_t>(k)], 0});
    EdgeKeySet<S> keys(T.surface, cfg.element_match_tol);
    FlipRunOptions opt;
    opt.track_weight = false;
    detail::run_flip_loop(T, work, stats, keys, opt, cfg);
    return vnew;
}

// ---------------------------------------------------------------------------
// Flip-count bound shapes
// ---------------------------------------------------------------------------

struct FlipBoundReport {
    std::size_t n = 0;
    double diam_upper = 0.0;
    double torus_bound_shape = 0.0;       // diam^2 * n^2
    double hyperbolic_bound_shape = 0.0;  // diam^(6g-4) * n^2
    int hyperbolic_exponent = 0;          // 6g-4
};

template <class S>
FlipBoundReport flip_bound_report(const Triangulation<S>& T) {
    FlipBoundReport r;
    r.n = T.vertex_count();
    r.diam_upper = diameter_bounds(T).second;
    const double n2 = static_cast<double>(r.n) * static_cast<double>(r.n);
    r.torus_bound_shape = r.diam_upper * r.diam_upper * n2;
    r.hyperbolic_exponent = 6 * S::genus - 4;
    r.hyperbolic_bound_shape = std::pow(r.diam_upper, r.hyperbolic_exponent) * n2;
    return r;
}

}  // namespace geoflip
