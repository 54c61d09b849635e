// Primitives for the square domain [-w,w]^2: side bookkeeping, distances,
// projections and the mirror reflection used by the reflected Euler scheme.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace nmc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Fixed priority order; ties in projections resolve to the lowest enum value.
enum class Side : int { right = 0, top = 1, left = 2, bottom = 3 };

enum class BcKind { neumann, dirichlet };

// Inward unit normal of each side.
inline Point2 inward_normal(Side s) {
    switch (s) {
        case Side::right:  return {-1.0, 0.0};
        case Side::top:    return {0.0, -1.0};
        case Side::left:   return {1.0, 0.0};
        default:           return {0.0, 1.0};
    }
}

// A fixed tangential unit vector along each side.
inline Point2 tangent(Side s) {
    switch (s) {
        case Side::right:
        case Side::left:   return {0.0, 1.0};
        default:           return {1.0, 0.0};
    }
}

struct SquareDomain {
    double half_width = 1.0;
    std::array<BcKind, 4> side_kind = {BcKind::neumann, BcKind::neumann,
                                       BcKind::neumann, BcKind::neumann};

    static SquareDomain pure_neumann(double w = 1.0) { return SquareDomain{w, {}}; }

    // The mixed layout used by the bundled experiments: Dirichlet on the
    // right side, Neumann elsewhere.
    static SquareDomain mixed_right_dirichlet(double w = 1.0) {
        SquareDomain d{w, {}};
        d.side_kind[static_cast<int>(Side::right)] = BcKind::dirichlet;
        return d;
    }

    BcKind kind(Side s) const { return side_kind[static_cast<int>(s)]; }

    bool has_dirichlet() const {
        for (auto k : side_kind)
            if (k == BcKind::dirichlet) return true;
        return false;
    }

    // Closed square: boundary points count as inside.
    bool contains(const Point2& p) const {
        return std::fabs(p.x) <= half_width && std::fabs(p.y) <= half_width;
    }

    double side_distance(const Point2& p, Side s) const {
        switch (s) {
            case Side::right:  return half_width - p.x;
            case Side::top:    return half_width - p.y;
            case Side::left:   return p.x + half_width;
            default:           return p.y + half_width;
        }
    }

    Point2 side_projection(const Point2& p, Side s) const {
        switch (s) {
            case Side::right:  return {half_width, p.y};
            case Side::top:    return {p.x, half_width};
            case Side::left:   return {-half_width, p.y};
            default:           return {p.x, -half_width};
        }
    }

    // Signed coordinate along a side (the non-normal coordinate).
    double side_coordinate(const Point2& p, Side s) const {
        return (s == Side::right || s == Side::left) ? p.y : p.x;
    }
};

struct SideHit {
    double distance = 0.0;
    Side side = Side::right;
    Point2 projection;
};

// Nearest side among all four, tie broken by side priority. Valid for any
// point of the closed square (distance 0 on the boundary).
inline SideHit nearest_side(const Point2& p, const SquareDomain& dom) {
    SideHit best{dom.side_distance(p, Side::right), Side::right, {}};
    for (int i = 1; i < 4; ++i) {
        const Side s = static_cast<Side>(i);
        const double d = dom.side_distance(p, s);
        if (d < best.distance) { best.distance = d; best.side = s; }
    }
    best.projection = dom.side_projection(p, best.side);
    return best;
}

// Nearest side restricted to Neumann sides (local-time scoring must not
// deposit Neumann data on an absorbing side).
inline SideHit nearest_neumann_side(const Point2& p, const SquareDomain& dom) {
    bool found = false;
    SideHit best;
    for (int i = 0; i < 4; ++i) {
        const Side s = static_cast<Side>(i);
        if (dom.kind(s) != BcKind::neumann) continue;
        const double d = dom.side_distance(p, s);
        if (!found || d < best.distance) { best = {d, s, {}}; found = true; }
    }
    if (!found) throw std::logic_error("nearest_neumann_side: no Neumann side");
    best.projection = dom.side_projection(p, best.side);
    return best;
}

inline double distance_to_boundary(const Point2& p, const SquareDomain& dom) {
    if (!finite(p)) throw std::invalid_argument("distance_to_boundary: non-finite point");
    const double d = nearest_side(p, dom).distance;
    if (d <= 0.0) throw std::domain_error("distance_to_boundary: point not strictly inside");
    return d;
}

inline SideHit project_to_boundary(const Point2& p, const SquareDomain& dom) {
    if (!dom.contains(p)) throw std::domain_error("project_to_boundary: point outside");
    return nearest_side(p, dom);
}

// Mirror a proposed Euler position back into the square, one fold per
// violated side (conormal = normal for identity diffusion). Throws if a
// single fold is not enough; unreachable for the step sizes in use.
inline Point2 symmetrize(const Point2& p_out, const SquareDomain& dom) {
    const double w = dom.half_width;
    Point2 q = p_out;
    if (q.x > w) q.x = 2.0 * w - q.x;
    else if (q.x < -w) q.x = -2.0 * w - q.x;
    if (q.y > w) q.y = 2.0 * w - q.y;
    else if (q.y < -w) q.y = -2.0 * w - q.y;
    if (!dom.contains(q))
        throw std::runtime_error("symmetrize: reflection still outside (overshoot too large)");
    return q;
}

} // namespace nmc
