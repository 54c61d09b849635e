// Walk on spheres with an epsilon absorption layer, one-random-point source
// scoring from the precomputed circle table, boundary-replacement schemes on
// Neumann sides, and a finite horizon for the pure Neumann problem.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "neumann_mc/circle_table.hpp"
#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/geometry.hpp"
#include "neumann_mc/rng.hpp"
#include "neumann_mc/schemes.hpp"
#include "neumann_mc/walk.hpp"

namespace nmc {

struct WosConfig {
    double eps = 1e-6;      // absorption-layer width
    double h = 0.1;         // boundary-scheme step
    double t0 = 10.0;       // finite horizon (pure Neumann runs only)
    SchemeConfig scheme{};  // boundary-replacement scheme
    std::uint64_t seed = 0;

    void validate(bool finite_horizon) const {
        if (eps <= 0.0 || h <= 0.0)
            throw std::invalid_argument("WosConfig: eps and h must be positive");
        if (finite_horizon && scheme.scheme == Scheme::fd1)
            throw std::invalid_argument(
                "WosConfig: fd1 carries no elapsed time and cannot drive a "
                "finite-horizon (pure Neumann) run");
    }
};

struct SphereStep {
    Point2 exit;    // next walker position, on the sphere
    Point2 u_point; // interior position at a uniform time, for the source term
    double tau;     // sampled sojourn time in the sphere
    double cos_a;   // rotation used, kept for the truncated last sphere
    double sin_a;
};

// Draw one (exit time, interior point) pair from the table, rotate it by a
// uniform angle and rescale from the unit disk to radius r (time scales r^2).
inline SphereStep sample_sphere_step(const Point2& center, double radius,
                                     const CircleTable& table, RngStream& rng) {
    if (table.pairs.empty()) throw std::invalid_argument("sample_sphere_step: empty table");
    const TimedPoint& pair = table.pairs[rng.uniform_index(table.n_pairs())];
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(a), s = std::sin(a);
    SphereStep st;
    st.cos_a = c;
    st.sin_a = s;
    st.tau = radius * radius * pair.t;
    st.exit = {center.x + radius * c, center.y + radius * s};
    st.u_point = {center.x + radius * (c * pair.x - s * pair.y),
                  center.y + radius * (s * pair.x + c * pair.y)};
    return st;
}

// Unbiased single-sample estimate of the source integral over one sphere:
// int_0^tau f(B_t) dt = tau E[f(B_{U tau})].
template <class F>
double source_score_one_point(double tau, const Point2& u_point, F&& f) {
    return tau * f(u_point.x, u_point.y);
}

namespace detail {

constexpr long kMaxSphereSteps = 1000000;

[[noreturn]] inline void sphere_cap_exceeded() {
    throw std::runtime_error("walk on spheres exceeded the sphere-step cap");
}

// Rectangle-rule integral of f along one stored trajectory, rescaled to the
// sphere (space by r, time by r^2) and rotated like the exit sample, up to
// local time t1.
template <WalkProblem P>
double truncated_path_source(const P& problem, const CircleTable& table,
                             const Point2& center, double radius, double ca, double sa,
                             double t1, RngStream& rng) {
    const TimedPoint* path = table.path(rng.uniform_index(table.q_paths()));
    const double r2 = radius * radius;
    double score = 0.0;
    for (std::uint32_t a = 0; a + 1 < table.path_len; ++a) {
        const double t_lo = r2 * path[a].t;
        if (t_lo >= t1) break;
        const double t_hi = std::min(r2 * path[a + 1].t, t1);
        if (t_hi <= t_lo) continue;
        const double px = center.x + radius * (ca * path[a].x - sa * path[a].y);
        const double py = center.y + radius * (sa * path[a].x + ca * path[a].y);
        score += problem.source(px, py) * (t_hi - t_lo);
    }
    return score;
}

} // namespace detail

// Mixed problem: spheres until the epsilon layer; Dirichlet side absorbs,
// Neumann sides re-inject through the configured scheme. No time budget.
template <WalkProblem P>
WalkOutcome run_wos_mixed(const Point2& start, const P& problem, const SquareDomain& dom,
                          const WosConfig& cfg, const CircleTable& table, RngStream& rng) {
    cfg.validate(false);
    Point2 p = start;
    double score = 0.0;
    double elapsed = 0.0;
    for (long n = 0; n < detail::kMaxSphereSteps; ++n) {
        const SideHit hit = nearest_side(p, dom);
        if (hit.distance <= cfg.eps) {
            if (dom.kind(hit.side) == BcKind::dirichlet) {
                score += problem.dirichlet(hit.projection.x, hit.projection.y);
                return {score, elapsed, TerminationCause::dirichlet_hit};
            }
            const SchemeOutcome out =
                apply_scheme(cfg.scheme, hit.projection, hit.side, cfg.h, problem, dom, rng);
            score += out.score_inc;
            elapsed += out.time_inc;
            p = out.new_point;
            continue;
        }
        const SphereStep st = sample_sphere_step(p, hit.distance, table, rng);
        score += source_score_one_point(st.tau, st.u_point,
                                        [&](double x, double y) { return problem.source(x, y); });
        elapsed += st.tau;
        p = st.exit;
    }
    detail::sphere_cap_exceeded();
}

// Pure Neumann problem with finite horizon t0: a running clock accumulates
// sphere sojourn times and scheme time increments; the sphere that would
// overshoot t0 is replaced by a truncated stored trajectory.
template <WalkProblem P>
WalkOutcome run_wos_neumann(const Point2& start, const P& problem, const SquareDomain& dom,
                            const WosConfig& cfg, const CircleTable& table, RngStream& rng) {
    cfg.validate(true);
    if (cfg.t0 <= 0.0) throw std::invalid_argument("run_wos_neumann: t0 must be positive");
    if (table.q_paths() == 0)
        throw std::invalid_argument("run_wos_neumann: table has no stored trajectories");
    Point2 p = start;
    double score = 0.0;
    double elapsed = 0.0;
    for (long n = 0; n < detail::kMaxSphereSteps; ++n) {
        const SideHit hit = nearest_side(p, dom);
        if (hit.distance <= cfg.eps) {
            const SchemeOutcome out =
                apply_scheme(cfg.scheme, hit.projection, hit.side, cfg.h, problem, dom, rng);
            score += out.score_inc;
            elapsed += out.time_inc;
            p = out.new_point;
            if (elapsed >= cfg.t0)
                return {score, cfg.t0, TerminationCause::horizon_reached};
            continue;
        }
        const SphereStep st = sample_sphere_step(p, hit.distance, table, rng);
        if (elapsed + st.tau > cfg.t0) {
            score += detail::truncated_path_source(problem, table, p, hit.distance,
                                                   st.cos_a, st.sin_a, cfg.t0 - elapsed, rng);
            return {score, cfg.t0, TerminationCause::horizon_reached};
        }
        score += source_score_one_point(st.tau, st.u_point,
                                        [&](double x, double y) { return problem.source(x, y); });
        elapsed += st.tau;
        p = st.exit;
    }
    detail::sphere_cap_exceeded();
}

} // namespace nmc
