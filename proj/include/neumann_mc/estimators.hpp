// Monte Carlo driver (mean / variance / sigma-over-sqrt-N with a fixed-shape
// parallel reduction), variance-versus-horizon scans, Tchebychef-grid bias
// metrics, and invariant-measure particle samplers.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/euler.hpp"
#include "neumann_mc/geometry.hpp"
#include "neumann_mc/rng.hpp"

namespace nmc {

struct McSummary {
    long n = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased (n-1)
    double std_error = 0.0;
};

// Streaming mean/M2 accumulator with Chan's pairwise merge, so a blocked
// parallel run reduces to exactly the same bits as a serial one.
struct RunningMoments {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningMoments& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const double nt = static_cast<double>(n + o.n);
        mean += d * static_cast<double>(o.n) / nt;
        m2 += o.m2 + d * d * (static_cast<double>(n) * static_cast<double>(o.n)) / nt;
        n += o.n;
    }

    McSummary summary() const {
        McSummary s;
        s.n = n;
        s.mean = mean;
        s.variance = (n > 1) ? m2 / static_cast<double>(n - 1) : 0.0;
        s.std_error = (n > 0) ? std::sqrt(s.variance / static_cast<double>(n)) : 0.0;
        return s;
    }
};

namespace detail {

constexpr long kMcBlock = 512;

inline unsigned resolve_workers(unsigned workers) {
    if (workers == 0) workers = std::thread::hardware_concurrency();
    return workers == 0 ? 1 : workers;
}

// Runs `body(block_begin, block_end, block_index)` over fixed-size blocks of
// [0, n); the caller merges per-block results in index order afterwards.
template <class Body>
void blocked_parallel_for(long n, unsigned workers, Body&& body) {
    const long nblocks = (n + kMcBlock - 1) / kMcBlock;
    workers = resolve_workers(workers);
    if (workers == 1 || nblocks == 1) {
        for (long b = 0; b < nblocks; ++b)
            body(b * kMcBlock, std::min(n, (b + 1) * kMcBlock), b);
        return;
    }
    std::atomic<long> next{0};
    auto work = [&] {
        for (;;) {
            const long b = next.fetch_add(1);
            if (b >= nblocks) return;
            body(b * kMcBlock, std::min(n, (b + 1) * kMcBlock), b);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

} // namespace detail

// Runs n independent trajectories of `run` (a callable taking an RngStream
// and returning the trajectory score). Trajectory i always uses stream
// (seed, i), and partial results merge in fixed block order, so the summary
// is bit-identical for any worker count.
template <class Run>
McSummary monte_carlo(Run&& run, long n, std::uint64_t seed, unsigned workers = 0) {
    if (n < 2) throw std::invalid_argument("monte_carlo: need n >= 2");
    const long nblocks = (n + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<RunningMoments> partial(nblocks);
    detail::blocked_parallel_for(n, workers, [&](long lo, long hi, long b) {
        RunningMoments acc;
        for (long i = lo; i < hi; ++i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i));
            acc.add(run(rng));
        }
        partial[b] = acc;
    });
    RunningMoments total;
    for (const auto& p : partial) total.merge(p);
    return total.summary();
}

// Vector-valued variant: `run(rng, out)` fills m values per trajectory
// (e.g. the running score at several horizons); returns one summary per slot.
template <class Run>
std::vector<McSummary> monte_carlo_vec(Run&& run, long n, std::size_t m,
                                       std::uint64_t seed, unsigned workers = 0) {
    if (n < 2) throw std::invalid_argument("monte_carlo_vec: need n >= 2");
    const long nblocks = (n + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<std::vector<RunningMoments>> partial(nblocks);
    detail::blocked_parallel_for(n, workers, [&](long lo, long hi, long b) {
        std::vector<RunningMoments> acc(m);
        std::vector<double> buf(m);
        for (long i = lo; i < hi; ++i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i));
            run(rng, std::span<double>(buf));
            for (std::size_t k = 0; k < m; ++k) acc[k].add(buf[k]);
        }
        partial[b] = std::move(acc);
    });
    std::vector<RunningMoments> total(m);
    for (const auto& p : partial)
        for (std::size_t k = 0; k < m; ++k) total[k].merge(p[k]);
    std::vector<McSummary> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = total[k].summary();
    return out;
}

// Variance of the score as a function of the horizon T; every T gets fresh,
// independent trajectories (factory(T) -> run callable).
template <class RunFactory>
std::vector<std::pair<double, McSummary>> variance_scan(RunFactory&& factory,
                                                        std::span<const double> times,
                                                        long n, std::uint64_t seed,
                                                        unsigned workers = 0) {
    std::vector<std::pair<double, McSummary>> out;
    out.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && times[i] <= times[i - 1])
            throw std::invalid_argument("variance_scan: times must be increasing");
        auto run = factory(times[i]);
        out.emplace_back(times[i],
                         monte_carlo(run, n, derive_seed(seed, 1000 + i), workers));
    }
    return out;
}

// Ordinary least-squares slope of v against T.
inline double fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [t, v] : points) { sx += t; sy += v; }
    const double mx = sx / points.size(), my = sy / points.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, v] : points) {
        sxx += (t - mx) * (t - mx);
        sxy += (t - mx) * (v - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return sxy / sxx;
}

// Tchebychef points cos((2i-1)pi/(2P)), i = 1..P.
inline std::vector<double> tcheb_points(int p) {
    if (p < 1) throw std::invalid_argument("tcheb_points: P >= 1");
    std::vector<double> pts(p);
    for (int i = 1; i <= p; ++i)
        pts[i - 1] = std::cos((2.0 * i - 1.0) * std::numbers::pi / (2.0 * p));
    return pts;
}

struct BiasMetrics {
    double a_bar = 0.0; // fitted additive constant
    double rho = 0.0;   // sqrt(J1(a_bar)), the model misfit
    int grid_p = 0;
};

// u_hat holds the P*P estimates on the tensor Tchebychef grid, row-major over
// (x_i, x_j); a_bar is the grid mean of (u_hat - u), rho the residual RMS.
template <class Exact>
BiasMetrics bias_metrics(std::span<const double> u_hat, Exact&& u_exact, int p) {
    const auto pts = tcheb_points(p);
    if (u_hat.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p))
        throw std::invalid_argument("bias_metrics: grid size mismatch");
    double mean = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            mean += u_hat[i * p + j] - u_exact(pts[i], pts[j]);
    mean /= static_cast<double>(p) * p;
    double j1 = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double r = u_hat[i * p + j] - u_exact(pts[i], pts[j]) - mean;
            j1 += r * r;
        }
    j1 /= static_cast<double>(p) * p;
    return {mean, std::sqrt(j1), p};
}

enum class CloudProvenance { iid_uniform, long_path };

struct ParticleCloud {
    std::vector<Point2> points;
    CloudProvenance provenance = CloudProvenance::iid_uniform;
};

inline ParticleCloud sample_invariant_uniform(std::size_t q, std::uint64_t seed) {
    if (q < 1) throw std::invalid_argument("sample_invariant_uniform: q >= 1");
    ParticleCloud cloud;
    cloud.provenance = CloudProvenance::iid_uniform;
    cloud.points.resize(q);
    RngStream rng(seed, 0);
    for (auto& p : cloud.points) p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return cloud;
}

// One reflected Euler path from the center; its q post-step positions
// approximate the invariant measure (the caller owns the mixing-time choice).
template <WalkProblem P>
ParticleCloud sample_invariant_path(const P& problem, const SquareDomain& dom,
                                    double delta, std::size_t q, std::uint64_t seed) {
    if (q < 1) throw std::invalid_argument("sample_invariant_path: q >= 1");
    ParticleCloud cloud;
    cloud.provenance = CloudProvenance::long_path;
    cloud.points.resize(q);
    RngStream rng(seed, 0);
    const double sqrt_delta = std::sqrt(delta);
    Point2 p{0.0, 0.0};
    for (std::size_t k = 0; k < q; ++k) {
        const Point2 prop = detail::euler_propose(p, problem, delta, sqrt_delta, rng);
        p = dom.contains(prop) ? prop : symmetrize(prop, dom);
        cloud.points[k] = p;
    }
    return cloud;
}

} // namespace nmc
