// Precomputed samples of the Brownian exit from the unit disk, standardized
// by rotation so the exit lands at (1,0):
//  - pairs (exit time, one uniformly-chosen interior position), used for the
//    sphere jumps and the one-random-point source estimate;
//  - full subsampled trajectories, used to integrate the source over the
//    truncated last sphere of finite-horizon walks.
//
// Persisted as a flat little-endian file:
//   magic "WOSTBL01" | u32 n_pairs | u32 q_paths | u32 path_len | f64 delta_pre
//   then n_pairs x (f64 time, f64 x, f64 y)
//   then q_paths x path_len x (f64 time, f64 x, f64 y)
#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "neumann_mc/geometry.hpp"
#include "neumann_mc/rng.hpp"

namespace nmc {

struct TimedPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct CircleTable {
    std::vector<TimedPoint> pairs;        // (exit time, interior point)
    std::vector<TimedPoint> trajectories; // q_paths * path_len samples, flattened
    std::uint32_t path_len = 0;
    double delta_pre = 0.0;

    std::size_t n_pairs() const { return pairs.size(); }
    std::size_t q_paths() const {
        return path_len == 0 ? 0 : trajectories.size() / path_len;
    }

    const TimedPoint* path(std::size_t j) const { return &trajectories[j * path_len]; }
};

namespace detail {

// One absorbed Euler walk in the unit disk from the origin, with the
// half-space bridge test against the tangent line. Returns the step count;
// fills `path` with the pre-exit positions when requested.
inline int disk_walk(double delta, RngStream& rng, Point2& exit_dir,
                     std::vector<Point2>* path) {
    const double sd = std::sqrt(delta);
    const double window = 6.0 * sd;
    Point2 p{0.0, 0.0};
    int m = 0;
    for (;;) {
        if (path) path->push_back(p);
        ++m;
        double z0, z1;
        rng.gaussian_pair(z0, z1);
        const Point2 q{p.x + sd * z0, p.y + sd * z1};
        const double rq = std::hypot(q.x, q.y);
        if (rq >= 1.0) {
            exit_dir = {q.x / rq, q.y / rq};
            return m;
        }
        const double d1 = 1.0 - std::hypot(p.x, p.y);
        const double d2 = 1.0 - rq;
        if (d1 < window && d2 < window &&
            rng.uniform() < std::exp(-2.0 * d1 * d2 / delta)) {
            exit_dir = {q.x / rq, q.y / rq};
            return m;
        }
        p = q;
    }
}

inline Point2 rotate(const Point2& p, double c, double s) {
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

} // namespace detail

inline CircleTable precompute_circle_table(double delta_pre, std::size_t n_pairs,
                                           std::size_t q_paths, std::uint64_t seed,
                                           std::size_t path_len = 100,
                                           unsigned workers = 0) {
    if (delta_pre <= 0.0) throw std::invalid_argument("precompute: delta_pre must be > 0");
    if (path_len < 2) throw std::invalid_argument("precompute: path_len must be >= 2");
    CircleTable table;
    table.delta_pre = delta_pre;
    table.path_len = static_cast<std::uint32_t>(path_len);
    table.pairs.resize(n_pairs);
    table.trajectories.resize(q_paths * path_len);

    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;

    // Pair samples: reservoir-pick one interior position per walk.
    {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(256);
                if (i >= n_pairs) return;
                const std::size_t hi = std::min(n_pairs, i + 256);
                for (std::size_t k = i; k < hi; ++k) {
                    RngStream rng(seed, k);
                    const double sd = std::sqrt(delta_pre);
                    const double window = 6.0 * sd;
                    Point2 p{0.0, 0.0}, pick{0.0, 0.0}, exit_dir{};
                    int m = 0;
                    for (;;) {
                        ++m;
                        if (m == 1 || rng.uniform() * m < 1.0) pick = p;
                        double z0, z1;
                        rng.gaussian_pair(z0, z1);
                        const Point2 q{p.x + sd * z0, p.y + sd * z1};
                        const double rq = std::hypot(q.x, q.y);
                        if (rq >= 1.0) { exit_dir = {q.x / rq, q.y / rq}; break; }
                        const double d1 = 1.0 - std::hypot(p.x, p.y);
                        const double d2 = 1.0 - rq;
                        if (d1 < window && d2 < window &&
                            rng.uniform() < std::exp(-2.0 * d1 * d2 / delta_pre)) {
                            exit_dir = {q.x / rq, q.y / rq};
                            break;
                        }
                        p = q;
                    }
                    // rotate so the exit is at (1,0)
                    const Point2 r = detail::rotate(pick, exit_dir.x, -exit_dir.y);
                    table.pairs[k] = {m * delta_pre, r.x, r.y};
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // Full trajectories, subsampled uniformly in step index; the final stored
    // sample is the exit event itself, so segment times are recoverable.
    {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            std::vector<Point2> scratch;
            for (;;) {
                const std::size_t j = next.fetch_add(16);
                if (j >= q_paths) return;
                const std::size_t hi = std::min(q_paths, j + 16);
                for (std::size_t k = j; k < hi; ++k) {
                    RngStream rng(seed + 0x5851F42D4C957F2DULL, k);
                    scratch.clear();
                    Point2 exit_dir{};
                    const int m = detail::disk_walk(delta_pre, rng, exit_dir, &scratch);
                    TimedPoint* out = &table.trajectories[k * path_len];
                    const double c = exit_dir.x, s = -exit_dir.y;
                    for (std::size_t a = 0; a + 1 < path_len; ++a) {
                        const std::size_t idx = (a * static_cast<std::size_t>(m)) /
                                                (path_len - 1);
                        const Point2 r = detail::rotate(scratch[idx], c, s);
                        out[a] = {idx * delta_pre, r.x, r.y};
                    }
                    out[path_len - 1] = {m * delta_pre, 1.0, 0.0};
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return table;
}

inline constexpr char kTableMagic[8] = {'W', 'O', 'S', 'T', 'B', 'L', '0', '1'};

inline void save_circle_table(const CircleTable& table, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "table files are little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint32_t np = static_cast<std::uint32_t>(table.n_pairs());
    const std::uint32_t qp = static_cast<std::uint32_t>(table.q_paths());
    out.write(kTableMagic, 8);
    out.write(reinterpret_cast<const char*>(&np), 4);
    out.write(reinterpret_cast<const char*>(&qp), 4);
    out.write(reinterpret_cast<const char*>(&table.path_len), 4);
    out.write(reinterpret_cast<const char*>(&table.delta_pre), 8);
    out.write(reinterpret_cast<const char*>(table.pairs.data()),
              static_cast<std::streamsize>(table.pairs.size() * sizeof(TimedPoint)));
    out.write(reinterpret_cast<const char*>(table.trajectories.data()),
              static_cast<std::streamsize>(table.trajectories.size() * sizeof(TimedPoint)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline CircleTable load_circle_table(const std::string& path) {
    static_assert(sizeof(TimedPoint) == 24);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open table file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kTableMagic, 8) != 0)
        throw std::runtime_error("not a circle-table file: " + path);
    std::uint32_t np = 0, qp = 0, pl = 0;
    double dp = 0.0;
    in.read(reinterpret_cast<char*>(&np), 4);
    in.read(reinterpret_cast<char*>(&qp), 4);
    in.read(reinterpret_cast<char*>(&pl), 4);
    in.read(reinterpret_cast<char*>(&dp), 8);
    CircleTable table;
    table.path_len = pl;
    table.delta_pre = dp;
    table.pairs.resize(np);
    table.trajectories.resize(static_cast<std::size_t>(qp) * pl);
    in.read(reinterpret_cast<char*>(table.pairs.data()),
            static_cast<std::streamsize>(table.pairs.size() * sizeof(TimedPoint)));
    in.read(reinterpret_cast<char*>(table.trajectories.data()),
            static_cast<std::streamsize>(table.trajectories.size() * sizeof(TimedPoint)));
    if (!in) throw std::runtime_error("truncated table file: " + path);
    return table;
}

} // namespace nmc
