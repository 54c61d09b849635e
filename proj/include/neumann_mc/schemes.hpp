// Boundary-replacement schemes applied when a walker reaches a Neumann side:
// order-1 finite differences, the order-2-diamond-derived scheme, the
// one-sided order-3 scheme and the kinetic approximation. Each returns a
// replacement point, a score increment and a time increment.
//
// All formulas are written in the local frame of the hit: `inward` is the
// unit vector into the domain, `tang` a unit tangent. Boundary data g is the
// half outward-conormal derivative (see coefficients.hpp).
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/geometry.hpp"
#include "neumann_mc/rng.hpp"

namespace nmc {

enum class Scheme { fd1, diamond, oneside3, kinetic };

// The kinetic step's elapsed time: pathwise h^2 * t_c (default) or its
// expectation h^2.
enum class KineticTimeMode { pathwise, fixed };

struct SchemeOutcome {
    Point2 new_point;
    double score_inc = 0.0;
    double time_inc = 0.0;
};

struct SchemeConfig {
    Scheme scheme = Scheme::oneside3;
    KineticTimeMode kinetic_time = KineticTimeMode::pathwise;
};

namespace detail {

struct BoundaryFrame {
    Point2 b;
    Side side;
    Point2 inward;
    Point2 tang;
};

// Local frame at a boundary point; corner hits get the inward diagonal.
inline BoundaryFrame boundary_frame(const Point2& b, Side side, const SquareDomain& dom) {
    BoundaryFrame fr{b, side, inward_normal(side), tangent(side)};
    const double w = dom.half_width;
    if (std::fabs(std::fabs(b.x) - w) < 1e-14 && std::fabs(std::fabs(b.y) - w) < 1e-14) {
        const double inv = 1.0 / std::numbers::sqrt2;
        fr.inward = {-inv * (b.x > 0 ? 1.0 : -1.0), -inv * (b.y > 0 ? 1.0 : -1.0)};
        fr.tang = {-fr.inward.y, fr.inward.x};
    }
    return fr;
}

inline Point2 offset(const Point2& b, const Point2& dir, double a) {
    return {b.x + a * dir.x, b.y + a * dir.y};
}

constexpr int kMaxHalvings = 60;

} // namespace detail

// u(b) ~ 2 h g(b) + u(b + h inward). Order-1 scheme; carries no elapsed time.
template <WalkProblem P>
SchemeOutcome fd1(const Point2& b, Side side, double h, const P& problem,
                  const SquareDomain& dom) {
    const auto fr = detail::boundary_frame(b, side, dom);
    for (int i = 0; i < detail::kMaxHalvings; ++i, h *= 0.5) {
        const Point2 np = detail::offset(fr.b, fr.inward, h);
        if (!dom.contains(np)) continue;
        return {np, 2.0 * h * problem.neumann(side, b.x, b.y), 0.0};
    }
    throw std::runtime_error("fd1: halving rule did not terminate");
}

// Diamond (order-2 Laplacian stencil) combined with the centered normal
// derivative. Eliminating the fictitious node gives
//   u(b) = [2 u(b+h in) + u(b+h t) + u(b-h t)]/4 + (h^2/2) f(b) + h g(b),
// randomized over the three replacement points with law (1/2, 1/4, 1/4).
// The tangential candidates lie on the boundary (a sliding scheme).
template <WalkProblem P>
SchemeOutcome fd3_diamond(const Point2& b, Side side, double h, const P& problem,
                          const SquareDomain& dom, RngStream& rng) {
    const auto fr = detail::boundary_frame(b, side, dom);
    for (int i = 0; i < detail::kMaxHalvings; ++i, h *= 0.5) {
        const Point2 cin = detail::offset(fr.b, fr.inward, h);
        const Point2 cp = detail::offset(fr.b, fr.tang, h);
        const Point2 cm = detail::offset(fr.b, fr.tang, -h);
        if (!dom.contains(cin) || !dom.contains(cp) || !dom.contains(cm)) continue;
        const double u = rng.uniform();
        const Point2 np = (u < 0.5) ? cin : (u < 0.75 ? cp : cm);
        const double score = 0.5 * h * h * problem.source(b.x, b.y) +
                             h * problem.neumann(side, b.x, b.y);
        return {np, score, h * h};
    }
    throw std::runtime_error("fd3_diamond: halving rule did not terminate");
}

// One-sided order-3 scheme:
//   u(b) = 2 h g(b) + h^2 f(b + h inward) + [u(b+h in+h t) + u(b+h in-h t)]/2.
template <WalkProblem P>
SchemeOutcome fd3_oneside(const Point2& b, Side side, double h, const P& problem,
                          const SquareDomain& dom, RngStream& rng) {
    const auto fr = detail::boundary_frame(b, side, dom);
    const double sgn = rng.uniform() < 0.5 ? 1.0 : -1.0;
    for (int i = 0; i < detail::kMaxHalvings; ++i, h *= 0.5) {
        Point2 np = detail::offset(fr.b, fr.inward, h);
        np = detail::offset(np, fr.tang, sgn * h);
        if (!dom.contains(np)) continue;
        const Point2 fpt = detail::offset(fr.b, fr.inward, h);
        const double score = 2.0 * h * problem.neumann(side, b.x, b.y) +
                             h * h * problem.source(fpt.x, fpt.y);
        return {np, score, h * h};
    }
    throw std::runtime_error("fd3_oneside: halving rule did not terminate");
}

// Kinetic approximation: collision time t_c ~ Exp(1), velocity uniform on the
// inward half circle; score (4/pi) h g(b) + h^2 f(b), elapsed time h^2 t_c.
template <WalkProblem P>
SchemeOutcome kinetic(const Point2& b, Side side, double h, const P& problem,
                      const SquareDomain& dom, RngStream& rng,
                      KineticTimeMode time_mode = KineticTimeMode::pathwise) {
    const auto fr = detail::boundary_frame(b, side, dom);
    const double tc = rng.exponential();
    const double theta = rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    const double vn = std::cos(theta);
    const double vt = std::sin(theta);
    for (int i = 0; i < detail::kMaxHalvings; ++i, h *= 0.5) {
        Point2 np = detail::offset(fr.b, fr.inward, h * tc * vn);
        np = detail::offset(np, fr.tang, h * tc * vt);
        if (!dom.contains(np)) continue;
        const double score = (4.0 / std::numbers::pi) * h * problem.neumann(side, b.x, b.y) +
                             h * h * problem.source(b.x, b.y);
        const double dt = (time_mode == KineticTimeMode::pathwise) ? h * h * tc : h * h;
        return {np, score, dt};
    }
    throw std::runtime_error("kinetic: halving rule did not terminate");
}

template <WalkProblem P>
SchemeOutcome apply_scheme(const SchemeConfig& cfg, const Point2& b, Side side, double h,
                           const P& problem, const SquareDomain& dom, RngStream& rng) {
    switch (cfg.scheme) {
        case Scheme::fd1:      return fd1(b, side, h, problem, dom);
        case Scheme::diamond:  return fd3_diamond(b, side, h, problem, dom, rng);
        case Scheme::oneside3: return fd3_oneside(b, side, h, problem, dom, rng);
        default:               return kinetic(b, side, h, problem, dom, rng, cfg.kinetic_time);
    }
}

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::fd1:      return "fd1";
        case Scheme::diamond:  return "diamond";
        case Scheme::oneside3: return "oneside3";
        default:               return "kinetic";
    }
}

inline Scheme scheme_from_name(const std::string& name) {
    if (name == "fd1") return Scheme::fd1;
    if (name == "diamond") return Scheme::diamond;
    if (name == "oneside3") return Scheme::oneside3;
    if (name == "kinetic") return Scheme::kinetic;
    throw std::invalid_argument("unknown scheme: " + name);
}

} // namespace nmc
