#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoflip/config.hpp"
#include "geoflip/kernel.hpp"
#include "geoflip/mobius.hpp"
#include "geoflip/vec2.hpp"

namespace geoflip {

// ---------------------------------------------------------------------------
// Flat torus R^2 / (Z e1 + Z u)
// ---------------------------------------------------------------------------

// Deck transformation m*e1 + n*u, kept as exact integers.
struct TorusElement {
    std::int64_t m = 0;
    std::int64_t n = 0;
    friend bool operator==(TorusElement, TorusElement) = default;
    friend auto operator<=>(TorusElement, TorusElement) = default;
};

class TorusSurface {
  public:
    using Element = TorusElement;
    static constexpr int genus = 1;
    static constexpr GeometryKind geometry = GeometryKind::Euclidean;

    explicit TorusSurface(Vec2 u) : u_(u) {
        if (u.y == 0.0 || !finite(u)) throw contract_error("torus: u must have u_y != 0");
    }

    Vec2 u() const { return u_; }
    double area() const { return std::abs(u_.y); }

    static Element identity() { return {}; }
    static bool is_identity(Element g) { return g.m == 0 && g.n == 0; }
    static Element compose(Element g, Element h) { return {g.m + h.m, g.n + h.n}; }
    static Element inverse(Element g) { return {-g.m, -g.n}; }
    bool equal(Element g, Element h) const { return g == h; }

    Vec2 translation(Element g) const {
        return {static_cast<double>(g.m) + static_cast<double>(g.n) * u_.x,
                static_cast<double>(g.n) * u_.y};
    }
    Vec2 apply(Element g, Vec2 p) const { return p + translation(g); }

    double distance(Vec2 p, Vec2 q) const { return euclidean_distance(p, q); }

    // coordinates used for orientation/walk tests (identity in the flat case)
    Vec2 walk_point(Vec2 p) const { return p; }

    // lattice coordinates (alpha, beta) with p = alpha*e1 + beta*u
    std::pair<double, double> lattice_coords(Vec2 p) const {
        const double beta = p.y / u_.y;
        const double alpha = p.x - beta * u_.x;
        return {alpha, beta};
    }

    // Representative in the half-open domain {alpha*e1 + beta*u : 0 <= alpha,beta < 1}
    // together with the deck element g such that g * p0 = p.
    std::pair<Vec2, Element> canonicalize(Vec2 p, const Config& = Config()) const {
        const auto [alpha, beta] = lattice_coords(p);
        Element g{static_cast<std::int64_t>(std::floor(alpha)),
                  static_cast<std::int64_t>(std::floor(beta))};
        Vec2 p0 = apply(inverse(g), p);
        // guard against floor landing one off after rounding
        for (int pass = 0; pass < 2; ++pass) {
            auto [a0, b0] = lattice_coords(p0);
            if (a0 < 0.0) { g.m -= 1; p0 = apply(Element{1, 0}, p0); continue; }
            if (a0 >= 1.0) { g.m += 1; p0 = apply(Element{-1, 0}, p0); continue; }
            if (b0 < 0.0) { g.n -= 1; p0 = apply(Element{0, 1}, p0); continue; }
            if (b0 >= 1.0) { g.n += 1; p0 = apply(Element{0, -1}, p0); continue; }
            break;
        }
        return {p0, g};
    }

    // corners of the fundamental parallelogram
    std::array<Vec2, 4> domain_corners() const {
        return {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 0} + u_, u_};
    }

    double domain_diameter() const {
        const auto c = domain_corners();
        return std::max(norm(c[2]), norm(c[3] - c[1]));
    }

    double distance_to_domain(Vec2 p, Element g) const {
        const Vec2 t = translation(g);
        const auto c = domain_corners();
        // inside test in lattice coordinates
        const auto [a, b] = lattice_coords(p - t);
        if (a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4; ++i) {
            best = std::min(best, point_segment_distance(p, c[i] + t, c[(i + 1) % 4] + t));
        }
        return best;
    }

    // Every deck element whose translated domain meets the closed ball B(center, r).
    std::vector<Element> group_ball(Vec2 center, double radius, const Config& cfg) const {
        if (radius < 0.0) throw contract_error("group_ball: negative radius");
        const double reach = radius + domain_diameter() + 1e-9;
        const auto [ac, bc] = lattice_coords(center);
        const double ra = reach * (1.0 + std::abs(u_.x / u_.y));
        const double rb = reach / std::abs(u_.y);
        const auto lo_m = static_cast<std::int64_t>(std::floor(ac - ra)) - 1;
        const auto hi_m = static_cast<std::int64_t>(std::ceil(ac + ra)) + 1;
        const auto lo_n = static_cast<std::int64_t>(std::floor(bc - rb)) - 1;
        const auto hi_n = static_cast<std::int64_t>(std::ceil(bc + rb)) + 1;
        std::vector<Element> out;
        for (std::int64_t n = lo_n; n <= hi_n; ++n) {
            for (std::int64_t m = lo_m; m <= hi_m; ++m) {
                const Element g{m, n};
                if (distance_to_domain(center, g) <= radius + 1e-12) {
                    out.push_back(g);
                    if (out.size() > cfg.group_ball_cap)
                        throw resource_error("group_ball: cap exceeded");
                }
            }
        }
        return out;
    }

    // Exact shortest lattice vector via Lagrange reduction.
    double systole_lower_bound() const {
        Vec2 b1{1.0, 0.0};
        Vec2 b2 = u_;
        if (norm2(b1) > norm2(b2)) std::swap(b1, b2);
        for (int it = 0; it < 64; ++it) {
            const double t = std::round(dot(b2, b1) / norm2(b1));
            b2 = b2 - t * b1;
            if (norm2(b2) >= norm2(b1)) break;
            std::swap(b1, b2);
        }
        return norm(b1);
    }

    static std::string encode(Element g) {
        return std::to_string(g.m) + "," + std::to_string(g.n);
    }
    static Element decode(const std::string& s) {
        const auto comma = s.find(',');
        if (comma == std::string::npos) throw io_error("torus element: expected m,n");
        try {
            return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
        } catch (const std::exception&) {
            throw io_error("torus element: bad integers in '" + s + "'");
        }
    }

  private:
    static double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
        const Vec2 d = b - a;
        const double t = std::clamp(dot(p - a, d) / norm2(d), 0.0, 1.0);
        return norm(p - (a + t * d));
    }

    Vec2 u_;
};

// ---------------------------------------------------------------------------
// Bolza surface H^2 / Gamma, regular octagon with opposite sides identified
// ---------------------------------------------------------------------------

using Word = std::vector<std::uint8_t>;  // generator indices 0..7, inverse of k is k^4

inline Word word_inverse(const Word& w) {
    Word r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(*it ^ 4);
    return r;
}

inline Word word_concat(const Word& a, const Word& b) {
    Word r = a;
    std::size_t cut = 0;
    while (!r.empty() && cut < b.size() && r.back() == (b[cut] ^ 4)) {
        r.pop_back();
        ++cut;
    }
    r.insert(r.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
    return r;
}

// Group element of the Bolza surface group: cached matrix plus the generator
// word that produced it.
struct BolzaElement {
    Mobius m;
    Word word;
};

// Hash-bucket registry identifying Mobius elements up to the +/- matrix
// ambiguity and floating drift. Buckets are coarse; candidates in neighboring
// buckets are compared with map_distance.
class ElementRegistry {
  public:
    explicit ElementRegistry(double tol = 1e-7) : tol_(tol) {}

    int find(const Mobius& m) const {
        const auto probe = [&](const Mobius& v) -> int {
            const auto base = bucket_of(v);
            std::array<std::int64_t, 4> off{};
            for (off[0] = -1; off[0] <= 1; ++off[0])
                for (off[1] = -1; off[1] <= 1; ++off[1])
                    for (off[2] = -1; off[2] <= 1; ++off[2])
                        for (off[3] = -1; off[3] <= 1; ++off[3]) {
                            const auto it = buckets_.find(hash_key(
                                {base[0] + off[0], base[1] + off[1], base[2] + off[2], base[3] + off[3]}));
                            if (it == buckets_.end()) continue;
                            for (int id : it->second) {
                                const double scale = std::max(1.0, std::abs(elements_[static_cast<std::size_t>(id)].a));
                                if (map_distance(elements_[static_cast<std::size_t>(id)], v) <= tol_ * scale)
                                    return id;
                            }
                        }
            return -1;
        };
        return probe(m);
    }

    int find_or_insert(const Mobius& m) {
        if (const int id = find(m); id >= 0) return id;
        const int id = static_cast<int>(elements_.size());
        elements_.push_back(m);
        const auto base = bucket_of(m);
        buckets_[hash_key(base)].push_back(id);
        const Mobius neg{-m.a, -m.b};
        const auto nbase = bucket_of(neg);
        if (nbase != base) buckets_[hash_key(nbase)].push_back(id);
        return id;
    }

    std::size_t size() const { return elements_.size(); }
    const Mobius& element(int id) const { return elements_[static_cast<std::size_t>(id)]; }

  private:
    static std::array<std::int64_t, 4> bucket_of(const Mobius& m) {
        const double g = 1e-3;
        return {static_cast<std::int64_t>(std::llround(m.a.real() / g)),
                static_cast<std::int64_t>(std::llround(m.a.imag() / g)),
                static_cast<std::int64_t>(std::llround(m.b.real() / g)),
                static_cast<std::int64_t>(std::llround(m.b.imag() / g))};
    }
    static std::uint64_t hash_key(const std::array<std::int64_t, 4>& k) {
        std::uint64_t h = 1469598103934665603ull;
        for (auto v : k) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }

    double tol_;
    std::vector<Mobius> elements_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

class BolzaSurface {
  public:
    using Element = BolzaElement;
    static constexpr int genus = 2;
    static constexpr GeometryKind geometry = GeometryKind::Hyperbolic;

    BolzaSurface() {
        const double coshr = 1.0 + std::sqrt(2.0);  // cosh of the octagon inradius
        inradius_ = std::acosh(coshr);
        circumradius_ = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
        const double vr = std::pow(2.0, -0.25);  // Euclidean radius of the corners
        for (int k = 0; k < 8; ++k) {
            const double th = (2.0 * k + 1.0) * kPi / 8.0;
            gens_[static_cast<std::size_t>(k)] = Mobius::axis_translation(th, 2.0 * inradius_);
            corners_[static_cast<std::size_t>(k)] =
                Vec2{vr * std::cos(k * kPi / 4.0), vr * std::sin(k * kPi / 4.0)};
        }
        // supporting circles of the octagon sides: side k has its midpoint in
        // direction (2k+1)pi/8 at Euclidean radius e = tanh(inradius/2)
        const double e = std::tanh(inradius_ / 2.0);
        side_center_dist_ = (e + 1.0 / e) / 2.0;
        side_radius_ = (1.0 / e - e) / 2.0;
        for (int k = 0; k < 8; ++k) {
            const double th = (2.0 * k + 1.0) * kPi / 8.0;
            side_centers_[static_cast<std::size_t>(k)] =
                Vec2{side_center_dist_ * std::cos(th), side_center_dist_ * std::sin(th)};
        }
        build_corner_elements();
    }

    const Mobius& generator(int k) const { return gens_[static_cast<std::size_t>(k & 7)]; }
    Vec2 octagon_vertex(int k) const { return corners_[static_cast<std::size_t>(k & 7)]; }
    const Element& corner_element(int k) const { return corner_elements_[static_cast<std::size_t>(k & 7)]; }
    double inradius() const { return inradius_; }
    double circumradius() const { return circumradius_; }

    // relation along the opposite-side identification: g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3
    static Word relation_word() { return {0, 5, 2, 7, 4, 1, 6, 3}; }

    static Element identity() { return {}; }
    bool is_identity(const Element& g) const { return g.m.is_identity(1e-9); }
    Element compose(const Element& g, const Element& h) const {
        return {g.m.compose(h.m), word_concat(g.word, h.word)};
    }
    Element inverse(const Element& g) const { return {g.m.inverse(), word_inverse(g.word)}; }
    bool equal(const Element& g, const Element& h) const {
        const double scale = std::max(1.0, std::abs(g.m.a));
        return map_distance(g.m, h.m) <= 1e-7 * scale;
    }
    Element from_word(const Word& w) const {
        Mobius m = Mobius::identity();
        for (auto k : w) m = m.compose(generator(k));
        return {m, w};
    }

    Vec2 apply(const Element& g, Vec2 p) const { return g.m.apply(p); }
    double distance(Vec2 p, Vec2 q) const { return hyperbolic_distance(p, q); }
    Vec2 walk_point(Vec2 p) const { return klein(p); }

    bool in_octagon(Vec2 p, double slack = 0.0) const {
        for (int k = 0; k < 8; ++k) {
            if (norm(p - side_centers_[static_cast<std::size_t>(k)]) < side_radius_ - slack)
                return false;
        }
        return true;
    }

    // Greedy Dirichlet reduction: pull p toward the origin while a side-pairing
    // strictly reduces the distance, then resolve boundary ownership (sides
    // paired from the lower generator index are kept; corner w0 is kept).
    std::pair<Vec2, Element> canonicalize(Vec2 p, const Config& cfg = Config()) const {
        if (norm2(p) >= 1.0) throw contract_error("canonicalize: point outside the disk");
        Vec2 q = p;
        Element g = identity();
        int steps = 0;
        for (;;) {
            if (++steps > cfg.canonicalize_steps)
                throw numeric_error("canonicalize: step budget exhausted");
            const double d0 = hyperbolic_distance(q, Vec2{0, 0});
            int best = -1;
            double bestd = d0 - 1e-12;
            for (int k = 0; k < 8; ++k) {
                const double dk = hyperbolic_distance(q, gens_[static_cast<std::size_t>(k)].apply(Vec2{0, 0}));
                if (dk < bestd) {
                    bestd = dk;
                    best = k;
                }
            }
            if (best < 0) break;
            q = generator(best).inverse().apply(q);
            g = compose(g, Element{generator(best), Word{static_cast<std::uint8_t>(best)}});
        }
        // boundary ownership
        if (hyperbolic_distance(q, corners_[0]) <= 1e-9) return {q, g};
        for (int pass = 0; pass < 8; ++pass) {
            int moved = -1;
            for (int s = 7; s >= 4; --s) {
                const double d = norm(q - side_centers_[static_cast<std::size_t>(s)]) - side_radius_;
                if (std::abs(d) <= 1e-12) {
                    const int k = s - 4;
                    q = generator(k).apply(q);
                    g = compose(g, inverse(Element{generator(k), Word{static_cast<std::uint8_t>(k)}}));
                    moved = s;
                    break;
                }
            }
            if (moved < 0) break;
        }
        return {q, g};
    }

    double domain_diameter() const { return 2.0 * circumradius_; }

    // Conservative, complete enumeration of deck elements whose octagon copy
    // can meet the closed ball B(center, r): keep d(g*0, center) <= r + R and
    // flood through tiles meeting the enlarged convex ball (threshold + 2R).
    std::vector<Element> group_ball(Vec2 center, double radius, const Config& cfg) const {
        if (radius < 0.0) throw contract_error("group_ball: negative radius");
        const double keep = radius + circumradius_ + 1e-9;
        const double expand = radius + 2.0 * circumradius_ + 1e-9;
        std::vector<Element> kept;
        ElementRegistry seen(cfg.element_match_tol);
        std::deque<Element> frontier;
        const Element start = canonicalize(center, cfg).second;
        seen.find_or_insert(start.m);
        frontier.push_back(start);
        while (!frontier.empty()) {
            Element g = std::move(frontier.front());
            frontier.pop_front();
            const double d = hyperbolic_distance(g.m.apply(Vec2{0, 0}), center);
            if (d <= keep) {
                kept.push_back(g);
                if (kept.size() > cfg.group_ball_cap) throw resource_error("group_ball: cap exceeded");
            }
            if (d > expand) continue;
            for (int k = 0; k < 8; ++k) {
                Element h = compose(g, Element{generator(k), Word{static_cast<std::uint8_t>(k)}});
                if (seen.find(h.m) >= 0) continue;
                seen.find_or_insert(h.m);
                if (seen.size() > 64 * cfg.group_ball_cap)
                    throw resource_error("group_ball: expansion cap exceeded");
                frontier.push_back(std::move(h));
            }
        }
        return kept;
    }

    double systole_lower_bound() const { return 2.0 * std::acosh(1.0 + std::sqrt(2.0)); }

    // Chain of deck elements whose octagon copies are crossed by the geodesic
    // segment [a, b]; complete for segments with endpoints off the tiling
    // corners. Segments grazing a corner include both adjacent copies.
    std::vector<Element> tiles_along_segment(Vec2 a, Vec2 b, const Config& cfg) const {
        std::vector<Element> chain;
        auto [a0, ga] = canonicalize(a, cfg);
        Element g = ga;
        Vec2 pa = a0;
        Vec2 pb = inverse(g).m.apply(b);
        chain.push_back(g);
        int guard = 0;
        // The segment is a straight chord in Klein coordinates and the octagon
        // is convex there, so each tile has a unique outward boundary crossing.
        while (!in_octagon_closed(pb, 1e-12)) {
            if (++guard > 16 * cfg.canonicalize_steps)
                throw numeric_error("tiles_along_segment: walk stuck");
            const Vec2 ka = klein(pa), kb = klein(pb);
            int side = -1, graze = -1;
            double best_t = std::numeric_limits<double>::infinity();
            for (int s = 0; s < 8; ++s) {
                const Vec2 c1 = klein(corners_[static_cast<std::size_t>(s)]);
                const Vec2 c2 = klein(corners_[static_cast<std::size_t>((s + 1) & 7)]);
                const double oa = cross(c2 - c1, ka - c1);
                const double ob = cross(c2 - c1, kb - c1);
                if (!(oa > 0.0 && ob <= 0.0)) continue;  // outward crossings only
                const double t = oa / (oa - ob);
                const Vec2 x = ka + t * (kb - ka);
                const double uu = dot(x - c1, c2 - c1) / norm2(c2 - c1);
                if (uu < -1e-9 || uu > 1.0 + 1e-9) continue;
                if (t < best_t - 1e-12) {
                    best_t = t;
                    side = s;
                    graze = -1;
                } else if (t <= best_t + 1e-12 && s != side) {
                    graze = s;
                }
            }
            if (side < 0) break;  // endpoint sits on the boundary within tolerance
            if (graze >= 0)
                chain.push_back(
                    compose(g, Element{generator(graze), Word{static_cast<std::uint8_t>(graze)}}));
            g = compose(g, Element{generator(side), Word{static_cast<std::uint8_t>(side)}});
            pa = generator(side).inverse().apply(pa);
            pb = generator(side).inverse().apply(pb);
            chain.push_back(g);
        }
        return chain;
    }

    static std::string encode(const Element& g) {
        if (g.word.empty()) return "e";
        std::string s;
        for (std::size_t i = 0; i < g.word.size(); ++i) {
            if (i) s += '.';
            s += std::to_string(static_cast<int>(g.word[i]));
        }
        return s;
    }
    Element decode(const std::string& s) const {
        if (s == "e") return identity();
        Word w;
        std::size_t pos = 0;
        while (pos < s.size()) {
            const auto next = s.find('.', pos);
            const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            int v;
            try {
                v = std::stoi(tok);
            } catch (const std::exception&) {
                throw io_error("bolza element: bad word '" + s + "'");
            }
            if (v < 0 || v > 7) throw io_error("bolza element: generator index out of range");
            w.push_back(static_cast<std::uint8_t>(v));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return from_word(w);
    }

    bool in_octagon_closed(Vec2 p, double slack) const { return in_octagon(p, -slack); }

  private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    // Shortest words mapping corner w0 to each corner; the action is free so
    // they are unique. Found by breadth-first search over short words.
    void build_corner_elements() {
        corner_elements_[0] = identity();
        std::array<bool, 8> have{};
        have[0] = true;
        int found = 1;
        std::vector<Element> frontier{identity()};
        for (int depth = 1; depth <= 5 && found < 8; ++depth) {
            std::vector<Element> next;
            for (const auto& e : frontier) {
                for (int k = 0; k < 8; ++k) {
                    if (!e.word.empty() && (e.word.back() ^ 4) == k) continue;
                    Element f = compose(e, Element{generator(k), Word{static_cast<std::uint8_t>(k)}});
                    const Vec2 img = f.m.apply(corners_[0]);
                    for (int j = 1; j < 8; ++j) {
                        if (!have[static_cast<std::size_t>(j)] &&
                            norm(img - corners_[static_cast<std::size_t>(j)]) < 1e-9) {
                            corner_elements_[static_cast<std::size_t>(j)] = f;
                            have[static_cast<std::size_t>(j)] = true;
                            ++found;
                        }
                    }
                    next.push_back(std::move(f));
                }
            }
            frontier = std::move(next);
        }
        if (found != 8) throw numeric_error("bolza: corner element search failed");
    }

    std::array<Mobius, 8> gens_;
    std::array<Vec2, 8> corners_;
    std::array<Element, 8> corner_elements_;
    std::array<Vec2, 8> side_centers_;
    double side_center_dist_ = 0.0;
    double side_radius_ = 0.0;
    double inradius_ = 0.0;
    double circumradius_ = 0.0;
};

}  // namespace geoflip
