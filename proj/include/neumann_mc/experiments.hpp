// Configuration-driven experiment runners: each experiment wires the walkers,
// estimators and spectral solver into one CSV artifact (plus a JSON sidecar
// with the full configuration and seed).
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "neumann_mc/circle_table.hpp"
#include "neumann_mc/csv.hpp"
#include "neumann_mc/estimators.hpp"
#include "neumann_mc/euler.hpp"
#include "neumann_mc/problems.hpp"
#include "neumann_mc/schemes.hpp"
#include "neumann_mc/spectral.hpp"
#include "neumann_mc/wos.hpp"

namespace nmc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentId {
    mixed_euler,
    mixed_wos,
    neumann_preliminary,
    neumann_euler,
    neumann_wos,
    spectral_exact,
    spectral_approx,
    convection
};

inline const char* experiment_name(ExperimentId id) {
    switch (id) {
        case ExperimentId::mixed_euler:         return "mixed_euler";
        case ExperimentId::mixed_wos:           return "mixed_wos";
        case ExperimentId::neumann_preliminary: return "neumann_preliminary";
        case ExperimentId::neumann_euler:       return "neumann_euler";
        case ExperimentId::neumann_wos:         return "neumann_wos";
        case ExperimentId::spectral_exact:      return "spectral_exact";
        case ExperimentId::spectral_approx:     return "spectral_approx";
        default:                                return "convection";
    }
}

inline ExperimentId experiment_from_name(const std::string& s) {
    for (const ExperimentId id :
         {ExperimentId::mixed_euler, ExperimentId::mixed_wos, ExperimentId::neumann_preliminary,
          ExperimentId::neumann_euler, ExperimentId::neumann_wos, ExperimentId::spectral_exact,
          ExperimentId::spectral_approx, ExperimentId::convection})
        if (s == experiment_name(id)) return id;
    throw ConfigError("unknown experiment: " + s);
}

// Reference points of the mixed and pure Neumann pointwise studies.
inline constexpr std::array<Point2, 3> kMixedPoints{{{0.8, 0.0}, {0.0, 0.0}, {-0.8, 0.0}}};
inline constexpr std::array<Point2, 6> kNeumannPoints{
    {{0.0, 0.0}, {-0.2, 0.2}, {-0.8, 0.8}, {0.0, 0.8}, {0.2, 0.6}, {0.4, 0.4}}};

struct ExperimentConfig {
    ExperimentId id = ExperimentId::mixed_euler;
    std::string name;              // output file stem; defaults to the id
    std::uint64_t seed = 42;
    long n = 50000;                // Monte Carlo trajectories per estimate

    std::vector<double> alphas{1.0 / 3.0, 2.0 / 3.0, 1.0};

    // Euler-scheme parameters: one run per (delta, xi) pair
    std::vector<std::pair<double, double>> delta_xi{{0.001, 0.001}};
    double t0 = 10.0;              // pure Neumann horizon
    double t_cap_mixed = 200.0;    // safety cap for mixed runs
    KernelShape kernel_shape = KernelShape::gaussian_as_printed;

    // walk-on-spheres parameters
    std::vector<double> h_list{0.1};
    std::vector<Scheme> schemes{Scheme::oneside3};
    double eps = 1e-6;
    KineticTimeMode kinetic_time = KineticTimeMode::pathwise;
    std::string table_path;        // cache file; default <out>/wos_table.bin
    std::size_t table_pairs = 1000000;
    std::size_t table_paths = 100000;
    std::size_t table_path_len = 100;
    double table_delta_pre = 1e-4;

    int grid_p = 3;                // bias-metric grid

    // preliminary (figures) experiment
    Point2 prelim_point{-0.5, -0.5};
    double prelim_delta = 0.005;
    std::vector<double> t_grid;    // defaults to 0.1, 1, 2, ..., 20
    std::vector<double> var_t_grid; // defaults to t_grid

    // spectral experiments: explicit (delta, m_walks, q_cloud) rows
    std::vector<std::tuple<double, long, long>> spectral_rows;
    std::vector<int> basis_n{2, 4};
    double spectral_xi = 0.001;
    double beta_x = 0.2;
    double beta_y = 0.1;

    std::string stem() const { return name.empty() ? experiment_name(id) : name; }
};

// ---------------------------------------------------------------------------
// flat key = value configuration files

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

class KeyValues {
  public:
    explicit KeyValues(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value': " + line);
            kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
    }

    std::optional<std::string> get(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) {
        auto v = get(key);
        if (!v) return fallback;
        try {
            return std::stod(*v);
        } catch (...) {
            throw ConfigError("bad number for " + key + ": " + *v);
        }
    }

    long get_long(const std::string& key, long fallback) {
        return static_cast<long>(get_double(key, static_cast<double>(fallback)));
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
        auto v = get(key);
        if (!v) return fallback;
        std::vector<double> out;
        for (const auto& tok : split(*v, ',')) {
            try {
                out.push_back(std::stod(trim(tok)));
            } catch (...) {
                throw ConfigError("bad list entry for " + key + ": " + tok);
            }
        }
        return out;
    }

    void check_all_used() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw ConfigError("unknown config key: " + k);
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
};

inline std::vector<double> default_t_grid() {
    std::vector<double> g{0.1};
    for (int t = 1; t <= 20; ++t) g.push_back(t);
    return g;
}

} // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n < 2) throw ConfigError("n must be >= 2");
    for (const auto& [d, x] : cfg.delta_xi)
        if (d <= 0 || x <= 0) throw ConfigError("delta and xi must be positive");
    if (cfg.t0 <= 0) throw ConfigError("t0 must be positive");
    const bool finite_horizon =
        cfg.id == ExperimentId::neumann_wos; // the only scheme-driven horizon run
    if (finite_horizon)
        for (const Scheme s : cfg.schemes)
            if (s == Scheme::fd1)
                throw ConfigError("fd1 carries no elapsed time: rejected for "
                                  "finite-horizon (pure Neumann) runs");
    for (const int nb : cfg.basis_n)
        if (nb < 2 || nb % 2 != 0) throw ConfigError("basis N must be even and >= 2");
    if (cfg.grid_p < 1) throw ConfigError("grid P must be >= 1");
    if (!std::is_sorted(cfg.t_grid.begin(), cfg.t_grid.end()))
        throw ConfigError("t_grid must be increasing");
    if (!std::is_sorted(cfg.var_t_grid.begin(), cfg.var_t_grid.end()))
        throw ConfigError("var_t_grid must be increasing");
}

inline ExperimentConfig parse_config(std::istream& in) {
    detail::KeyValues kv(in);
    ExperimentConfig cfg;
    {
        auto id = kv.get("experiment");
        if (!id) throw ConfigError("missing key: experiment");
        cfg.id = experiment_from_name(*id);
    }
    if (auto v = kv.get("name")) cfg.name = *v;
    cfg.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(cfg.seed)));
    cfg.n = kv.get_long("n", cfg.n);
    cfg.alphas = kv.get_list("alpha_list", cfg.alphas);

    {
        auto deltas = kv.get_list("delta_list", {});
        auto xis = kv.get_list("xi_list", {});
        if (deltas.size() != xis.size()) throw ConfigError("delta_list and xi_list differ");
        if (!deltas.empty()) {
            cfg.delta_xi.clear();
            for (std::size_t i = 0; i < deltas.size(); ++i)
                cfg.delta_xi.emplace_back(deltas[i], xis[i]);
        }
    }
    cfg.t0 = kv.get_double("t0", cfg.t0);
    cfg.t_cap_mixed = kv.get_double("t_cap_mixed", cfg.t_cap_mixed);
    if (auto v = kv.get("kernel")) {
        if (*v == "as_printed") cfg.kernel_shape = KernelShape::gaussian_as_printed;
        else if (*v == "normal_1d") cfg.kernel_shape = KernelShape::normal_1d;
        else throw ConfigError("kernel must be as_printed or normal_1d");
    }

    cfg.h_list = kv.get_list("h_list", cfg.h_list);
    if (auto v = kv.get("scheme_list")) {
        cfg.schemes.clear();
        for (const auto& tok : detail::split(*v, ',')) {
            try {
                cfg.schemes.push_back(scheme_from_name(detail::trim(tok)));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    cfg.eps = kv.get_double("eps", cfg.eps);
    if (auto v = kv.get("kinetic_time")) {
        if (*v == "pathwise") cfg.kinetic_time = KineticTimeMode::pathwise;
        else if (*v == "fixed") cfg.kinetic_time = KineticTimeMode::fixed;
        else throw ConfigError("kinetic_time must be pathwise or fixed");
    }
    if (auto v = kv.get("table_path")) cfg.table_path = *v;
    cfg.table_pairs = static_cast<std::size_t>(kv.get_long("table_pairs", 1000000));
    cfg.table_paths = static_cast<std::size_t>(kv.get_long("table_paths", 100000));
    cfg.table_path_len = static_cast<std::size_t>(kv.get_long("table_path_len", 100));
    cfg.table_delta_pre = kv.get_double("table_delta_pre", cfg.table_delta_pre);

    cfg.grid_p = static_cast<int>(kv.get_long("grid_p", cfg.grid_p));

    cfg.prelim_point.x = kv.get_double("point_x", cfg.prelim_point.x);
    cfg.prelim_point.y = kv.get_double("point_y", cfg.prelim_point.y);
    cfg.prelim_delta = kv.get_double("prelim_delta", cfg.prelim_delta);
    cfg.t_grid = kv.get_list("t_grid", detail::default_t_grid());
    cfg.var_t_grid = kv.get_list("var_t_grid", cfg.t_grid);

    {
        auto deltas = kv.get_list("spectral_delta_list", {});
        auto ms = kv.get_list("m_list", {});
        auto qs = kv.get_list("q_list", {});
        const std::size_t rows = std::max({deltas.size(), ms.size(), qs.size()});
        if (rows > 0) {
            if ((deltas.size() != rows) ||
                (!ms.empty() && ms.size() != rows) ||
                (!qs.empty() && qs.size() != rows))
                throw ConfigError("spectral_delta_list, m_list, q_list must align");
            cfg.spectral_rows.clear();
            for (std::size_t i = 0; i < rows; ++i)
                cfg.spectral_rows.emplace_back(
                    deltas[i], ms.empty() ? 5000 : static_cast<long>(ms[i]),
                    qs.empty() ? 10000 : static_cast<long>(qs[i]));
        }
    }
    {
        auto ns = kv.get_list("basis_n_list", {});
        if (!ns.empty()) {
            cfg.basis_n.clear();
            for (double v : ns) cfg.basis_n.push_back(static_cast<int>(v));
        }
    }
    cfg.spectral_xi = kv.get_double("spectral_xi", cfg.spectral_xi);
    cfg.beta_x = kv.get_double("beta_x", cfg.beta_x);
    cfg.beta_y = kv.get_double("beta_y", cfg.beta_y);

    kv.check_all_used();
    validate_config(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------

struct ExperimentResult {
    std::vector<std::string> files;
};

namespace detail {

inline std::string side_file(const std::filesystem::path& dir, const std::string& stem,
                             const std::string& suffix) {
    return (dir / (stem + suffix)).string();
}

// Regression tripwire, not a hard failure: flags rows whose error exceeds the
// Monte Carlo noise by more than the documented scheme-bias allowance of
// 2% of max(1, |exact|).
inline std::string tripwire(double abs_error, double std_error, double exact) {
    const double allowance = 0.02 * std::max(1.0, std::fabs(exact));
    return abs_error > 5.0 * std_error + allowance ? "check" : "ok";
}

inline const CircleTable& experiment_table(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir,
                                           unsigned workers) {
    static std::map<std::string, CircleTable> cache;
    std::string path = cfg.table_path.empty()
                           ? (out_dir / "wos_table.bin").string()
                           : cfg.table_path;
    auto it = cache.find(path);
    if (it != cache.end()) return it->second;
    if (std::filesystem::exists(path))
        return cache.emplace(path, load_circle_table(path)).first->second;
    CircleTable t = precompute_circle_table(cfg.table_delta_pre, cfg.table_pairs,
                                            cfg.table_paths, derive_seed(cfg.seed, 0xC14C),
                                            cfg.table_path_len, workers);
    save_circle_table(t, path);
    return cache.emplace(path, std::move(t)).first->second;
}

// grid + pointwise estimates for one pure-Neumann run; fills bias metrics and
// the per-point value F(M) and model error B(M) = |u_hat - u - a_bar|
template <class RunAt>
void pure_neumann_block(RunAt&& run_at, const PureNeumannExpProblem& problem,
                        const ExperimentConfig& cfg, unsigned workers, std::uint64_t salt,
                        BiasMetrics& metrics, std::vector<double>& f_vals,
                        std::vector<double>& b_vals) {
    const auto pts = tcheb_points(cfg.grid_p);
    std::vector<double> grid(pts.size() * pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const Point2 p{pts[i], pts[j]};
            grid[i * pts.size() + j] =
                monte_carlo([&](RngStream& rng) { return run_at(p, rng); }, cfg.n,
                            derive_seed(cfg.seed, salt + i * 97 + j), workers)
                    .mean;
        }
    metrics = bias_metrics(grid, [&](double x, double y) { return problem.exact(x, y); },
                           cfg.grid_p);
    f_vals.clear();
    b_vals.clear();
    for (std::size_t m = 0; m < kNeumannPoints.size(); ++m) {
        const Point2 p = kNeumannPoints[m];
        const double est =
            monte_carlo([&](RngStream& rng) { return run_at(p, rng); }, cfg.n,
                        derive_seed(cfg.seed, salt + 1000 + m), workers)
                .mean;
        f_vals.push_back(est);
        b_vals.push_back(std::fabs(est - problem.exact(p.x, p.y) - metrics.a_bar));
    }
}

} // namespace detail

inline ExperimentResult run_experiment(ExperimentConfig cfg, const std::string& out_dir_s,
                                       unsigned workers = 0) {
    validate_config(cfg);
    const std::filesystem::path out_dir(out_dir_s);
    std::filesystem::create_directories(out_dir);
    ExperimentResult result;

    auto add_csv = [&](const std::string& suffix) {
        result.files.push_back(detail::side_file(out_dir, cfg.stem(), suffix));
        return CsvWriter(result.files.back());
    };

    switch (cfg.id) {
        case ExperimentId::mixed_euler: {
            const SquareDomain dom = SquareDomain::mixed_right_dirichlet();
            CsvWriter csv = add_csv(".csv");
            csv.row({"alpha", "delta", "xi", "point", "x", "y", "exact", "estimate",
                     "abs_error", "std_error", "flag"});
            for (const auto& [delta, xi] : cfg.delta_xi) {
                EulerConfig ec;
                ec.delta = delta;
                ec.xi = xi;
                ec.t0 = cfg.t_cap_mixed;
                ec.kernel_shape = cfg.kernel_shape;
                for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
                    const MixedExpProblem problem{cfg.alphas[ai]};
                    for (std::size_t mi = 0; mi < kMixedPoints.size(); ++mi) {
                        const Point2 p = kMixedPoints[mi];
                        const auto s = monte_carlo(
                            [&](RngStream& rng) {
                                return run_mixed(p, problem, dom, ec, rng).score;
                            },
                            cfg.n, derive_seed(cfg.seed, 10 * ai + mi), workers);
                        const double exact = problem.exact(p.x, p.y);
                        const double err = std::fabs(s.mean - exact);
                        csv.row({fmt_g(problem.alpha), fmt_g(delta), fmt_g(xi),
                                 "M" + std::to_string(mi + 1), fmt_g(p.x), fmt_g(p.y),
                                 fmt_g(exact), fmt_g(s.mean), fmt_e(err),
                                 fmt_e(s.std_error),
                                 detail::tripwire(err, s.std_error, exact)});
                    }
                }
            }
            break;
        }

        case ExperimentId::mixed_wos: {
            const SquareDomain dom = SquareDomain::mixed_right_dirichlet();
            const CircleTable& table = detail::experiment_table(cfg, out_dir, workers);
            CsvWriter csv = add_csv(".csv");
            csv.row({"alpha", "scheme", "h", "point", "x", "y", "exact", "estimate",
                     "abs_error", "std_error", "flag"});
            for (const Scheme scheme : cfg.schemes)
                for (const double h : cfg.h_list)
                    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
                        const MixedExpProblem problem{cfg.alphas[ai]};
                        WosConfig wc;
                        wc.eps = cfg.eps;
                        wc.h = h;
                        wc.scheme = {scheme, cfg.kinetic_time};
                        for (std::size_t mi = 0; mi < kMixedPoints.size(); ++mi) {
                            const Point2 p = kMixedPoints[mi];
                            const auto s = monte_carlo(
                                [&](RngStream& rng) {
                                    return run_wos_mixed(p, problem, dom, wc, table, rng).score;
                                },
                                cfg.n, derive_seed(cfg.seed, 10 * ai + mi), workers);
                            const double exact = problem.exact(p.x, p.y);
                            const double err = std::fabs(s.mean - exact);
                            csv.row({fmt_g(problem.alpha), scheme_name(scheme), fmt_g(h),
                                     "M" + std::to_string(mi + 1), fmt_g(p.x), fmt_g(p.y),
                                     fmt_g(exact), fmt_g(s.mean), fmt_e(err),
                                     fmt_e(s.std_error),
                                     detail::tripwire(err, s.std_error, exact)});
                        }
                    }
            break;
        }

        case ExperimentId::neumann_preliminary: {
            const SquareDomain dom;
            const PolyNeumannProblem problem;
            if (cfg.t_grid.empty()) cfg.t_grid = detail::default_t_grid();
            if (cfg.var_t_grid.empty()) cfg.var_t_grid = cfg.t_grid;
            EulerConfig ec;
            ec.delta = cfg.prelim_delta;
            ec.xi = 0.001; // unused: homogeneous data
            // one trajectory yields the running score at every grid horizon
            std::vector<long> snap_steps;
            for (double t : cfg.t_grid)
                snap_steps.push_back(static_cast<long>(std::llround(t / ec.delta)));
            ec.t0 = cfg.t_grid.back();
            const auto means = monte_carlo_vec(
                [&](RngStream& rng, std::span<double> out) {
                    run_neumann_snapshots(cfg.prelim_point, problem, dom, ec, snap_steps,
                                          out, rng);
                },
                cfg.n, snap_steps.size(), derive_seed(cfg.seed, 1), workers);
            {
                CsvWriter csv = add_csv("_mean.csv");
                csv.row({"t", "mean", "std_error"});
                for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
                    csv.row({fmt_g(cfg.t_grid[i]), fmt_g(means[i].mean),
                             fmt_e(means[i].std_error)});
            }
            // fresh trajectories per horizon for the variance series
            const auto scan = variance_scan(
                [&](double t) {
                    EulerConfig vc = ec;
                    vc.t0 = t;
                    return [&, vc](RngStream& rng) {
                        return run_neumann(cfg.prelim_point, problem, dom, vc, rng).score;
                    };
                },
                cfg.var_t_grid, cfg.n, derive_seed(cfg.seed, 2), workers);
            {
                CsvWriter csv = add_csv("_variance.csv");
                csv.row({"t", "variance", "mean", "std_error"});
                for (const auto& [t, s] : scan)
                    csv.row({fmt_g(t), fmt_g(s.variance), fmt_g(s.mean), fmt_e(s.std_error)});
            }
            break;
        }

        case ExperimentId::neumann_euler: {
            const SquareDomain dom;
            CsvWriter csv = add_csv(".csv");
            std::vector<std::string> head{"alpha", "delta", "xi", "a_bar", "rho"};
            for (int m = 4; m <= 9; ++m) head.push_back("F_M" + std::to_string(m));
            for (int m = 4; m <= 9; ++m) head.push_back("B_M" + std::to_string(m));
            csv.row(head);
            for (const auto& [delta, xi] : cfg.delta_xi)
                for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
                    const PureNeumannExpProblem problem{cfg.alphas[ai]};
                    EulerConfig ec;
                    ec.delta = delta;
                    ec.xi = xi;
                    ec.t0 = cfg.t0;
                    ec.kernel_shape = cfg.kernel_shape;
                    BiasMetrics metrics;
                    std::vector<double> f_vals, b_vals;
                    detail::pure_neumann_block(
                        [&](const Point2& p, RngStream& rng) {
                            return run_neumann(p, problem, dom, ec, rng).score;
                        },
                        problem, cfg, workers, 5000 + 37 * ai, metrics, f_vals, b_vals);
                    std::vector<std::string> row{fmt_g(problem.alpha), fmt_g(delta),
                                                 fmt_g(xi), fmt_g(metrics.a_bar),
                                                 fmt_g(metrics.rho)};
                    for (double v : f_vals) row.push_back(fmt_g(v));
                    for (double v : b_vals) row.push_back(fmt_e(v));
                    csv.row(row);
                }
            break;
        }

        case ExperimentId::neumann_wos: {
            const SquareDomain dom;
            const CircleTable& table = detail::experiment_table(cfg, out_dir, workers);
            CsvWriter csv = add_csv(".csv");
            std::vector<std::string> head{"alpha", "scheme", "h", "a_bar", "rho"};
            for (int m = 4; m <= 9; ++m) head.push_back("F_M" + std::to_string(m));
            for (int m = 4; m <= 9; ++m) head.push_back("B_M" + std::to_string(m));
            csv.row(head);
            for (const Scheme scheme : cfg.schemes)
                for (const double h : cfg.h_list)
                    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
                        const PureNeumannExpProblem problem{cfg.alphas[ai]};
                        WosConfig wc;
                        wc.eps = cfg.eps;
                        wc.h = h;
                        wc.t0 = cfg.t0;
                        wc.scheme = {scheme, cfg.kinetic_time};
                        BiasMetrics metrics;
                        std::vector<double> f_vals, b_vals;
                        detail::pure_neumann_block(
                            [&](const Point2& p, RngStream& rng) {
                                return run_wos_neumann(p, problem, dom, wc, table, rng).score;
                            },
                            problem, cfg, workers, 7000 + 41 * ai, metrics, f_vals, b_vals);
                        std::vector<std::string> row{fmt_g(problem.alpha), scheme_name(scheme),
                                                     fmt_g(h), fmt_g(metrics.a_bar),
                                                     fmt_g(metrics.rho)};
                        for (double v : f_vals) row.push_back(fmt_g(v));
                        for (double v : b_vals) row.push_back(fmt_e(v));
                        csv.row(row);
                    }
            break;
        }

        case ExperimentId::spectral_exact:
        case ExperimentId::spectral_approx:
        case ExperimentId::convection: {
            const bool exact_centering = cfg.id == ExperimentId::spectral_exact;
            const bool convection = cfg.id == ExperimentId::convection;
            std::vector<std::tuple<double, long, long>> rows = cfg.spectral_rows;
            if (rows.empty()) throw ConfigError("spectral experiment needs rows");

            CsvWriter csv = add_csv(".csv");
            std::vector<std::string> head{"delta", "m", "q"};
            for (const int nb : cfg.basis_n) {
                const std::string t = std::to_string(nb);
                if (!convection) head.push_back("err1_N" + t);
                if (!exact_centering) head.push_back("err2_N" + t);
                head.push_back("kappa_N" + t);
            }
            csv.row(head);
            CsvWriter nodal_csv = add_csv("_nodal.csv");
            nodal_csv.row({"delta", "m", "q", "basis_n", "a", "b", "z_x", "z_y", "u"});

            const double alpha = cfg.alphas.front();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& [delta, m_walks, q_cloud] = rows[r];
                std::vector<std::string> row{fmt_g(delta), fmt_g(m_walks), fmt_g(q_cloud)};
                for (const int nb : cfg.basis_n) {
                    const TchebBasis basis = build_basis(nb);
                    EulerConfig ec;
                    ec.delta = delta;
                    ec.xi = cfg.spectral_xi;
                    ec.t0 = cfg.t0;
                    ec.kernel_shape = cfg.kernel_shape;
                    ec.seed = derive_seed(cfg.seed, 100 * r + nb);

                    ParticleCloud cloud;
                    CenteredBasis cb = [&] {
                        if (exact_centering) return center_exact(basis);
                        if (convection) {
                            const ConvectionProblem cp{alpha, cfg.beta_x, cfg.beta_y};
                            cloud = sample_invariant_path(cp, SquareDomain{}, delta, q_cloud,
                                                          derive_seed(cfg.seed, 900 + r));
                        } else {
                            cloud = sample_invariant_uniform(
                                q_cloud, derive_seed(cfg.seed, 900 + r));
                        }
                        return center_approx(basis, cloud);
                    }();

                    SpectralSystem sys;
                    if (convection) {
                        const ConvectionProblem problem{alpha, cfg.beta_x, cfg.beta_y};
                        const SpectralOperator op(cb, cfg.beta_x, cfg.beta_y);
                        sys = run_spectral_euler(problem, op, ec, m_walks, workers);
                    } else {
                        const PureNeumannExpProblem problem{alpha};
                        const SpectralOperator op(cb);
                        sys = run_spectral_euler(problem, op, ec, m_walks, workers);
                    }
                    std::vector<double> nodal(sys.u.data(), sys.u.data() + sys.u.size());

                    if (!convection) {
                        const PureNeumannExpProblem problem{alpha};
                        row.push_back(fmt_e(err1(cb, nodal, [&](double x, double y) {
                            return problem.exact(x, y);
                        })));
                        if (!exact_centering)
                            row.push_back(fmt_e(err2(
                                cb, nodal,
                                [&](double x, double y) { return problem.exact(x, y); },
                                cloud)));
                    } else {
                        const ConvectionProblem problem{alpha, cfg.beta_x, cfg.beta_y};
                        row.push_back(fmt_e(err2(
                            cb, nodal,
                            [&](double x, double y) { return problem.exact_raw(x, y); },
                            cloud)));
                    }
                    row.push_back(fmt_g(sys.kappa));

                    for (int k = 0; k < cb.size(); ++k) {
                        const auto [a, b] = cb.retained[k];
                        const Point2 z = cb.node(k);
                        nodal_csv.row({fmt_g(delta), fmt_g(m_walks), fmt_g(q_cloud),
                                       std::to_string(nb), std::to_string(a),
                                       std::to_string(b), fmt_g(z.x), fmt_g(z.y),
                                       fmt_g(nodal[k])});
                    }
                }
                csv.row(row);
            }
            break;
        }
    }

    // JSON sidecar with the full configuration (deterministic key order)
    {
        const std::string path = detail::side_file(out_dir, cfg.stem(), ".json");
        std::ofstream js(path);
        js << "{\n";
        js << "  \"experiment\": \"" << experiment_name(cfg.id) << "\",\n";
        js << "  \"seed\": " << cfg.seed << ",\n";
        js << "  \"n\": " << cfg.n << ",\n";
        js << "  \"alphas\": [";
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i)
            js << (i ? "," : "") << fmt_g(cfg.alphas[i]);
        js << "],\n";
        js << "  \"t0\": " << fmt_g(cfg.t0) << ",\n";
        js << "  \"eps\": " << fmt_g(cfg.eps) << ",\n";
        js << "  \"outputs\": [";
        for (std::size_t i = 0; i < result.files.size(); ++i)
            js << (i ? "," : "") << "\"" << std::filesystem::path(result.files[i]).filename().string()
               << "\"";
        js << "]\n}\n";
        result.files.push_back(path);
    }
    return result;
}

// Built-in table configurations of the experiment suite.
inline ExperimentConfig table_config(int table) {
    ExperimentConfig cfg;
    cfg.name = "table" + std::to_string(table);
    switch (table) {
        case 1:
            cfg.id = ExperimentId::mixed_euler;
            cfg.delta_xi = {{0.01, 0.01}, {0.001, 0.000001}, {0.001, 0.001}};
            break;
        case 2:
            cfg.id = ExperimentId::mixed_wos;
            cfg.schemes = {Scheme::oneside3, Scheme::kinetic, Scheme::fd1};
            cfg.h_list = {0.2, 0.1};
            break;
        case 3:
        case 4:
            // two halves of the same study: the six reference points
            cfg.id = ExperimentId::neumann_euler;
            cfg.delta_xi = {{0.01, 0.01}, {0.001, 0.001}};
            break;
        case 5:
            cfg.id = ExperimentId::neumann_wos;
            cfg.schemes = {Scheme::oneside3};
            cfg.h_list = {0.1, 0.05};
            break;
        case 6:
            cfg.id = ExperimentId::spectral_exact;
            cfg.alphas = {1.0 / 3.0};
            cfg.spectral_rows = {{0.01, 1000, 0}, {0.01, 5000, 0},
                                 {0.001, 1000, 0}, {0.001, 5000, 0}};
            break;
        case 7:
            cfg.id = ExperimentId::spectral_approx;
            cfg.alphas = {1.0 / 3.0};
            cfg.spectral_rows = {{0.01, 1000, 100},  {0.01, 1000, 10000},
                                 {0.01, 5000, 100},  {0.01, 5000, 10000},
                                 {0.001, 1000, 100}, {0.001, 1000, 10000},
                                 {0.001, 5000, 100}, {0.001, 5000, 10000}};
            break;
        case 8:
            cfg.id = ExperimentId::convection;
            cfg.alphas = {0.3};
            cfg.spectral_rows = {{0.01, 1000, 100},  {0.01, 1000, 10000},
                                 {0.01, 5000, 100},  {0.01, 5000, 10000},
                                 {0.001, 1000, 10000}, {0.001, 5000, 10000}};
            break;
        default:
            throw ConfigError("table must be in 1..8");
    }
    return cfg;
}

} // namespace nmc
