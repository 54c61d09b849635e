// Reflected Euler scheme with Gaussian-kernel scoring of the boundary local
// time, rectangle-rule source scoring, and half-space (Brownian bridge)
// stopping on Dirichlet sides.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/geometry.hpp"
#include "neumann_mc/kernels.hpp"
#include "neumann_mc/quadrature.hpp"
#include "neumann_mc/rng.hpp"
#include "neumann_mc/walk.hpp"

namespace nmc {

struct EulerConfig {
    double delta = 0.001;   // time step
    double xi = 0.001;      // delocalization parameter
    double t0 = 10.0;       // finite horizon (hard cap for mixed runs)
    std::uint64_t seed = 0;
    KernelShape kernel_shape = KernelShape::gaussian_as_printed;

    long steps() const {
        if (delta <= 0.0 || xi <= 0.0 || t0 <= 0.0)
            throw std::invalid_argument("EulerConfig: delta, xi, t0 must be positive");
        const double n = t0 / delta;
        const long rounded = static_cast<long>(std::llround(n));
        if (rounded < 1 || std::fabs(n - static_cast<double>(rounded)) > 1e-9 * n)
            throw std::invalid_argument("EulerConfig: t0 must be a multiple of delta");
        return rounded;
    }
};

namespace detail {

template <WalkProblem P>
inline Point2 euler_propose(const Point2& p, const P& problem, double delta,
                            double sqrt_delta, RngStream& rng) {
    double z0, z1;
    rng.gaussian_pair(z0, z1);
    Point2 q{p.x + sqrt_delta * z0, p.y + sqrt_delta * z1};
    if constexpr (!P::zero_drift) {
        const Point2 b = problem.drift(p.x, p.y);
        q.x += b.x * delta;
        q.y += b.y * delta;
    }
    return q;
}

} // namespace detail

// One step of the symmetrized reflected Euler scheme.
template <WalkProblem P>
Point2 euler_step(const Point2& state, const P& problem, const SquareDomain& dom,
                  const EulerConfig& cfg, RngStream& rng) {
    const Point2 prop =
        detail::euler_propose(state, problem, cfg.delta, std::sqrt(cfg.delta), rng);
    return dom.contains(prop) ? prop : symmetrize(prop, dom);
}

// Pure Neumann walk: runs for exactly t0/delta steps and accumulates
//   delta * sum f(X_k)  +  delta * sum g(pi(X_k)) k(d(X_k)).
template <WalkProblem P>
WalkOutcome run_neumann(const Point2& start, const P& problem, const SquareDomain& dom,
                        const EulerConfig& cfg, RngStream& rng) {
    const long steps = cfg.steps();
    const double sqrt_delta = std::sqrt(cfg.delta);
    const LocalTimeKernel kernel(cfg.kernel_shape, cfg.xi);
    const double cutoff = kernel.cutoff();

    Point2 p = start;
    double score = 0.0;
    for (long k = 0; k < steps; ++k) {
        score += cfg.delta * problem.source(p.x, p.y);
        const SideHit hit = nearest_side(p, dom);
        if (hit.distance < cutoff)
            score += cfg.delta *
                     problem.neumann(hit.side, hit.projection.x, hit.projection.y) *
                     kernel(hit.distance);
        const Point2 prop = detail::euler_propose(p, problem, cfg.delta, sqrt_delta, rng);
        p = dom.contains(prop) ? prop : symmetrize(prop, dom);
    }
    return {score, cfg.t0, TerminationCause::horizon_reached};
}

// As run_neumann, but records the running score at the requested step counts
// (ascending; the last entry is the total step count). One trajectory then
// yields the whole mean-versus-T curve.
template <WalkProblem P>
void run_neumann_snapshots(const Point2& start, const P& problem, const SquareDomain& dom,
                           const EulerConfig& cfg, std::span<const long> snapshot_steps,
                           std::span<double> out, RngStream& rng) {
    const double sqrt_delta = std::sqrt(cfg.delta);
    const LocalTimeKernel kernel(cfg.kernel_shape, cfg.xi);
    const double cutoff = kernel.cutoff();
    const long total = snapshot_steps.back();

    Point2 p = start;
    double score = 0.0;
    std::size_t next = 0;
    for (long k = 0; k < total; ++k) {
        while (next < snapshot_steps.size() && snapshot_steps[next] == k)
            out[next++] = score;
        score += cfg.delta * problem.source(p.x, p.y);
        const SideHit hit = nearest_side(p, dom);
        if (hit.distance < cutoff)
            score += cfg.delta *
                     problem.neumann(hit.side, hit.projection.x, hit.projection.y) *
                     kernel(hit.distance);
        const Point2 prop = detail::euler_propose(p, problem, cfg.delta, sqrt_delta, rng);
        p = dom.contains(prop) ? prop : symmetrize(prop, dom);
    }
    while (next < snapshot_steps.size()) out[next++] = score;
}

// Mixed Dirichlet-Neumann walk. Local-time scoring runs against the nearest
// Neumann side only; each step is tested for a direct or Brownian-bridge
// crossing of the Dirichlet side(s), and absorption adds the Dirichlet datum
// at the (interpolated) exit point. Hard time cap at t0.
template <WalkProblem P>
WalkOutcome run_mixed(const Point2& start, const P& problem, const SquareDomain& dom,
                      const EulerConfig& cfg, RngStream& rng) {
    if (!dom.has_dirichlet())
        throw std::invalid_argument("run_mixed: domain has no Dirichlet side");
    const long steps = cfg.steps();
    const double sqrt_delta = std::sqrt(cfg.delta);
    const LocalTimeKernel kernel(cfg.kernel_shape, cfg.xi);
    const double cutoff = kernel.cutoff();
    const double bridge_window = 6.0 * sqrt_delta;
    const double w = dom.half_width;

    // Immediate absorption for starts on an absorbing side.
    for (int i = 0; i < 4; ++i) {
        const Side s = static_cast<Side>(i);
        if (dom.kind(s) == BcKind::dirichlet && dom.side_distance(start, s) <= 0.0)
            return {problem.dirichlet(start.x, start.y), 0.0, TerminationCause::dirichlet_hit};
    }

    Point2 p = start;
    double score = 0.0;
    for (long k = 0; k < steps; ++k) {
        score += cfg.delta * problem.source(p.x, p.y);
        const SideHit nh = nearest_neumann_side(p, dom);
        if (nh.distance < cutoff)
            score += cfg.delta *
                     problem.neumann(nh.side, nh.projection.x, nh.projection.y) *
                     kernel(nh.distance);

        Point2 prop = detail::euler_propose(p, problem, cfg.delta, sqrt_delta, rng);

        // Direct exit through a Dirichlet side: absorb at the segment crossing.
        bool absorbed = false;
        Point2 exit{};
        double best_t = 2.0;
        for (int i = 0; i < 4; ++i) {
            const Side s = static_cast<Side>(i);
            if (dom.kind(s) != BcKind::dirichlet) continue;
            const double d_new = dom.side_distance(prop, s);
            if (d_new >= 0.0) continue;
            const double d_old = dom.side_distance(p, s);
            const double t = d_old / (d_old - d_new);
            if (t < best_t) {
                best_t = t;
                Point2 cross{p.x + t * (prop.x - p.x), p.y + t * (prop.y - p.y)};
                cross = dom.side_projection(cross, s);
                const double tc = dom.side_coordinate(cross, s);
                if (tc > w) cross = (s == Side::right || s == Side::left)
                                        ? Point2{cross.x, w} : Point2{w, cross.y};
                if (tc < -w) cross = (s == Side::right || s == Side::left)
                                         ? Point2{cross.x, -w} : Point2{-w, cross.y};
                exit = cross;
                absorbed = true;
            }
        }
        if (absorbed) {
            score += problem.dirichlet(exit.x, exit.y);
            return {score, (k + 1) * cfg.delta, TerminationCause::dirichlet_hit};
        }

        const Point2 next = dom.contains(prop) ? prop : symmetrize(prop, dom);

        // Brownian-bridge crossing test against each Dirichlet side.
        for (int i = 0; i < 4; ++i) {
            const Side s = static_cast<Side>(i);
            if (dom.kind(s) != BcKind::dirichlet) continue;
            const double d1 = dom.side_distance(p, s);
            const double d2 = dom.side_distance(next, s);
            if (d1 >= bridge_window || d2 >= bridge_window) continue;
            if (rng.uniform() < std::exp(-2.0 * d1 * d2 / cfg.delta)) {
                Point2 mid{0.5 * (p.x + next.x), 0.5 * (p.y + next.y)};
                const Point2 exit_b = dom.side_projection(mid, s);
                score += problem.dirichlet(exit_b.x, exit_b.y);
                return {score, (k + 1) * cfg.delta, TerminationCause::dirichlet_hit};
            }
        }
        p = next;
    }
    return {score, cfg.t0, TerminationCause::horizon_reached};
}

// Residual of the compatibility condition  int_D f p + int_dD g p  by tensor
// Gauss-Legendre quadrature (32 nodes per axis and per side).
template <WalkProblem P, class Density>
double compatibility_residual(const P& problem, const SquareDomain& dom,
                              Density&& density, int quad_order = 32) {
    const QuadratureRule q = gauss_legendre(quad_order);
    const double w = dom.half_width;

    double interior = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        for (std::size_t j = 0; j < q.nodes.size(); ++j) {
            const double x = w * q.nodes[i];
            const double y = w * q.nodes[j];
            interior += q.weights[i] * q.weights[j] * problem.source(x, y) * density(x, y);
        }
    interior *= w * w;

    double boundary = 0.0;
    for (int si = 0; si < 4; ++si) {
        const Side s = static_cast<Side>(si);
        if (dom.kind(s) != BcKind::neumann) continue;
        boundary += integrate(q, -w, w, [&](double t) {
            Point2 b = (s == Side::right || s == Side::left)
                           ? Point2{dom.side_projection({0, t}, s).x, t}
                           : Point2{t, dom.side_projection({t, 0}, s).y};
            return problem.neumann(s, b.x, b.y) * density(b.x, b.y);
        });
    }
    return interior + boundary;
}

} // namespace nmc
