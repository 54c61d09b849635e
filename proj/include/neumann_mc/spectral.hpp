// Stochastic spectral formulation for the pure Neumann problem: tensor
// Tchebychef Lagrange basis with one function removed and the rest centered
// against the invariant measure (exactly or through particles), assembly of
// the linear system C u = d from per-node walk data, dense solve and
// condition number, plus the err1/err2 grid metrics.
//
// Row i of the system gathers, over the walk started at grid node x_i,
//   c_{i,k} = sum_j alpha_{i,j} dPsi_k/dn_a(z^b_{i,j})
//           - sum_j beta_{i,j}  L Psi_k(z^s_{i,j})  + [k==i] - Psi_k(x_i),
//   d_i     = sum_j alpha_{i,j} g(z^b_{i,j}) + sum_j beta_{i,j} f(z^s_{i,j}).
// Boundary and interior events enter through per-side tangential moments and
// an interior monomial-moment matrix, which is the same sum reassociated:
// L Psi_k and dPsi_k/dn_a are polynomials with precomputed coefficients, so
// one moment pass serves every column of the row.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "neumann_mc/chebyshev.hpp"
#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/estimators.hpp"
#include "neumann_mc/euler.hpp"
#include "neumann_mc/geometry.hpp"
#include "neumann_mc/kernels.hpp"
#include "neumann_mc/quadrature.hpp"
#include "neumann_mc/rng.hpp"

namespace nmc {

struct TchebBasis {
    int n = 0;        // even degree parameter N
    Lagrange1D one_d; // shared between the two tensor directions

    explicit TchebBasis(int n_) : n(n_), one_d(n_) {}

    // w_{a,b} = int l_a(x) l_b(y) over the square = I_a I_b
    double weight(int a, int b) const {
        return one_d.integral(a) * one_d.integral(b);
    }
};

inline TchebBasis build_basis(int n_even) {
    if (n_even < 2 || n_even % 2 != 0)
        throw std::invalid_argument("build_basis: N must be even and >= 2");
    return TchebBasis(n_even);
}

enum class CenteringMode { exact, approximate };

class CenteredBasis {
  public:
    explicit CenteredBasis(TchebBasis b) : base(std::move(b)) {}

    TchebBasis base;
    CenteringMode mode = CenteringMode::exact;
    int removed_a = 0, removed_b = 0;
    std::vector<std::pair<int, int>> retained; // K = (N+1)^2 - 1 index pairs
    std::vector<double> ratio;                 // r_k = c_k / c_0

    int size() const { return static_cast<int>(retained.size()); }

    Point2 node(int k) const {
        const auto [a, b] = retained[k];
        return {base.one_d.nodes()[a], base.one_d.nodes()[b]};
    }

    // Psi_k(x, y) = l_a(x) l_b(y) - r_k l_A(x) l_B(y)
    double psi(int k, double x, double y) const {
        std::vector<double> lx, ly;
        base.one_d.eval_all(x, lx);
        base.one_d.eval_all(y, ly);
        const auto [a, b] = retained[k];
        return lx[a] * ly[b] - ratio[k] * lx[removed_a] * ly[removed_b];
    }

    // P_N u(x, y) = sum_k nodal_k Psi_k(x, y)
    double evaluate(std::span<const double> nodal, double x, double y) const {
        std::vector<double> lx, ly;
        base.one_d.eval_all(x, lx);
        base.one_d.eval_all(y, ly);
        const double phi0 = lx[removed_a] * ly[removed_b];
        double acc = 0.0;
        for (int k = 0; k < size(); ++k) {
            const auto [a, b] = retained[k];
            acc += nodal[k] * (lx[a] * ly[b] - ratio[k] * phi0);
        }
        return acc;
    }
};

namespace detail {

inline void fill_retained(CenteredBasis& cb) {
    const int n = cb.base.n;
    cb.retained.clear();
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            if (a != cb.removed_a || b != cb.removed_b) cb.retained.emplace_back(a, b);
}

} // namespace detail

// Exact centering against the uniform invariant measure: the removed function
// is l_{N/2} x l_{N/2} (the largest integral on an even grid) and the ratios
// are exact integral quotients, so int Psi_k = 0 identically.
inline CenteredBasis center_exact(const TchebBasis& basis) {
    CenteredBasis cb(basis);
    cb.mode = CenteringMode::exact;
    cb.removed_a = cb.removed_b = basis.n / 2;
    detail::fill_retained(cb);
    const double c0 = basis.weight(cb.removed_a, cb.removed_b);
    cb.ratio.resize(cb.retained.size());
    for (std::size_t k = 0; k < cb.retained.size(); ++k) {
        const auto [a, b] = cb.retained[k];
        cb.ratio[k] = basis.weight(a, b) / c0;
    }
    return cb;
}

// Approximate centering: integrals replaced by particle averages over the
// cloud; the removed index is the argmax of |average| (ties fall back to
// (N/2, N/2)). The particle mean of every retained Psi is zero by build.
inline CenteredBasis center_approx(const TchebBasis& basis, const ParticleCloud& cloud) {
    if (cloud.points.empty()) throw std::invalid_argument("center_approx: empty cloud");
    const int n = basis.n;
    std::vector<double> avg((n + 1) * (n + 1), 0.0);
    std::vector<double> lx, ly;
    for (const Point2& p : cloud.points) {
        basis.one_d.eval_all(p.x, lx);
        basis.one_d.eval_all(p.y, ly);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b) avg[a * (n + 1) + b] += lx[a] * ly[b];
    }
    for (auto& v : avg) v /= static_cast<double>(cloud.points.size());

    CenteredBasis cb(basis);
    cb.mode = CenteringMode::approximate;
    double best = -1.0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            if (std::fabs(avg[a * (n + 1) + b]) > best) {
                best = std::fabs(avg[a * (n + 1) + b]);
                cb.removed_a = a;
                cb.removed_b = b;
            }
    if (std::fabs(avg[(n / 2) * (n + 1) + n / 2]) == best) {
        cb.removed_a = cb.removed_b = n / 2;
    }
    const double c0 = avg[cb.removed_a * (n + 1) + cb.removed_b];
    if (c0 == 0.0) throw std::invalid_argument("center_approx: degenerate cloud");
    detail::fill_retained(cb);
    cb.ratio.resize(cb.retained.size());
    for (std::size_t k = 0; k < cb.retained.size(); ++k) {
        const auto [a, b] = cb.retained[k];
        cb.ratio[k] = avg[a * (n + 1) + b] / c0;
    }
    return cb;
}

// (1/4) int int Psi_k over the square, by Gauss-Legendre (exact for the
// polynomial degrees involved). The exact-centering invariant check.
inline double psi_mean_uniform(const CenteredBasis& cb, int k, int quad_order = 0) {
    if (quad_order == 0) quad_order = cb.base.n + 2;
    const QuadratureRule q = gauss_legendre(quad_order);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        for (std::size_t j = 0; j < q.nodes.size(); ++j)
            acc += q.weights[i] * q.weights[j] * cb.psi(k, q.nodes[i], q.nodes[j]);
    return acc / 4.0;
}

struct SpectralSystem {
    Eigen::MatrixXd C;
    Eigen::VectorXd d;
    Eigen::VectorXd u; // solved nodal values at the retained grid nodes
    double kappa = 0.0;
};

// Precomputed polynomial tables for one (centered basis, drift) pair. The
// drift family is b(x,y) = (beta_x x, beta_y y), covering all experiments.
class SpectralOperator {
  public:
    SpectralOperator(const CenteredBasis& cb, double beta_x = 0.0, double beta_y = 0.0)
        : cb_(cb), np_(cb.base.n + 1) {
        const auto& l = cb.base.one_d;

        // Per 1-D index: value coeffs, (1/2) l'' coeffs, x l' coeffs, and
        // endpoint derivative values.
        std::vector<Poly1> val(np_), half_dd(np_), x_d(np_);
        std::vector<double> dp1(np_), dm1(np_);
        for (int a = 0; a < np_; ++a) {
            val[a] = l.poly(a);
            Poly1 d1 = l.poly(a).derivative();
            Poly1 d2 = d1.derivative();
            for (auto& c : d2.c) c *= 0.5;
            half_dd[a] = d2;
            x_d[a] = d1.shift_up();
            dp1[a] = d1.eval(1.0);
            dm1[a] = d1.eval(-1.0);
        }
        auto at = [&](const Poly1& p, int deg) {
            return deg < static_cast<int>(p.c.size()) ? p.c[deg] : 0.0;
        };

        const int k_all = cb.size();
        lcoef_.assign(k_all, std::vector<double>(np_ * np_, 0.0));
        for (int s = 0; s < 4; ++s) dcoef_[s].assign(k_all, std::vector<double>(np_, 0.0));
        psi_at_node_.assign(k_all, std::vector<double>(k_all, 0.0));

        auto fill_phi = [&](int a, int b, double scale, std::vector<double>& lc,
                            std::array<std::vector<double>*, 4> dc) {
            // L phi, phi = l_a(x) l_b(y):
            //  (1/2)(l_a'' l_b + l_a l_b'') + beta_x (x l_a') l_b + beta_y l_a (y l_b')
            for (int p = 0; p < np_; ++p)
                for (int q = 0; q < np_; ++q)
                    lc[p * np_ + q] +=
                        scale * (at(half_dd[a], p) * at(val[b], q) +
                                 at(val[a], p) * at(half_dd[b], q) +
                                 beta_x * at(x_d[a], p) * at(val[b], q) +
                                 beta_y * at(val[a], p) * at(x_d[b], q));
            // half outward conormal on each side, as a polynomial in the
            // tangential coordinate
            for (int q = 0; q < np_; ++q) {
                (*dc[0])[q] += scale * 0.5 * dp1[a] * at(val[b], q);  // right
                (*dc[2])[q] += scale * -0.5 * dm1[a] * at(val[b], q); // left
                (*dc[1])[q] += scale * 0.5 * dp1[b] * at(val[a], q);  // top
                (*dc[3])[q] += scale * -0.5 * dm1[b] * at(val[a], q); // bottom
            }
        };

        for (int k = 0; k < k_all; ++k) {
            const auto [a, b] = cb.retained[k];
            std::array<std::vector<double>*, 4> dc = {&dcoef_[0][k], &dcoef_[1][k],
                                                      &dcoef_[2][k], &dcoef_[3][k]};
            fill_phi(a, b, 1.0, lcoef_[k], dc);
            fill_phi(cb.removed_a, cb.removed_b, -cb.ratio[k], lcoef_[k], dc);
            for (int i = 0; i < k_all; ++i) {
                const Point2 xi = cb.node(i);
                psi_at_node_[k][i] = cb.psi(k, xi.x, xi.y);
            }
        }
    }

    const CenteredBasis& basis() const { return cb_; }
    int order() const { return np_; }

    // sum_{p,q} coef(L Psi_k)[p,q] * M[p,q] with M the interior moment matrix
    double contract_l(int k, std::span<const double> interior_moments) const {
        const auto& lc = lcoef_[k];
        double acc = 0.0;
        for (int pq = 0; pq < np_ * np_; ++pq) acc += lc[pq] * interior_moments[pq];
        return acc;
    }

    // sum_q coef(dPsi_k/dn_a on side s)[q] * B[q] with B the tangential moments
    double contract_conormal(int k, Side s, std::span<const double> side_moments) const {
        const auto& dc = dcoef_[static_cast<int>(s)][k];
        double acc = 0.0;
        for (int q = 0; q < np_; ++q) acc += dc[q] * side_moments[q];
        return acc;
    }

    double psi_at_node(int k, int i) const { return psi_at_node_[k][i]; }

    // pointwise evaluations of the precomputed polynomials (cold paths/tests)
    double l_psi_value(int k, double x, double y) const {
        const auto& lc = lcoef_[k];
        double acc = 0.0;
        double xp = 1.0;
        for (int p = 0; p < np_; ++p) {
            double yq = xp;
            for (int q = 0; q < np_; ++q) {
                acc += lc[p * np_ + q] * yq;
                yq *= y;
            }
            xp *= x;
        }
        return acc;
    }

    double conormal_value(int k, Side s, double t) const {
        const auto& dc = dcoef_[static_cast<int>(s)][k];
        double acc = 0.0, tp = 1.0;
        for (int q = 0; q < np_; ++q) {
            acc += dc[q] * tp;
            tp *= t;
        }
        return acc;
    }

  private:
    CenteredBasis cb_;
    int np_;
    std::vector<std::vector<double>> lcoef_;
    std::array<std::vector<std::vector<double>>, 4> dcoef_;
    std::vector<std::vector<double>> psi_at_node_;
};

// Streaming accumulator for one row: monomial moments of the interior events,
// tangential moments of the boundary events per side, and the data term.
// Feeding events here is equivalent to the per-column event sums, one moment
// pass serving all columns.
class RowAccumulator {
  public:
    explicit RowAccumulator(int order) : np_(order), interior_(order * order, 0.0) {
        for (auto& b : boundary_) b.assign(order, 0.0);
    }

    void add_interior(double x, double y, double beta, double f_val) {
        double xp = beta;
        for (int p = 0; p < np_; ++p) {
            double v = xp;
            for (int q = 0; q < np_; ++q) {
                interior_[p * np_ + q] += v;
                v *= y;
            }
            xp *= x;
        }
        d_ += beta * f_val;
    }

    void add_boundary(Side s, double t, double alpha, double g_val) {
        auto& mom = boundary_[static_cast<int>(s)];
        double tp = alpha;
        for (int q = 0; q < np_; ++q) {
            mom[q] += tp;
            tp *= t;
        }
        d_ += alpha * g_val;
    }

    void merge(const RowAccumulator& o) {
        for (std::size_t i = 0; i < interior_.size(); ++i) interior_[i] += o.interior_[i];
        for (int s = 0; s < 4; ++s)
            for (int q = 0; q < np_; ++q) boundary_[s][q] += o.boundary_[s][q];
        d_ += o.d_;
    }

    void scale(double a) {
        for (auto& v : interior_) v *= a;
        for (auto& b : boundary_)
            for (auto& v : b) v *= a;
        d_ *= a;
    }

    double data_term() const { return d_; }
    std::span<const double> interior() const { return interior_; }
    std::span<const double> boundary(Side s) const { return boundary_[static_cast<int>(s)]; }

  private:
    int np_;
    std::vector<double> interior_;
    std::array<std::vector<double>, 4> boundary_;
    double d_ = 0.0;
};

inline void finalize_row(const SpectralOperator& op, int i, const RowAccumulator& acc,
                         SpectralSystem& sys) {
    const int k_all = op.basis().size();
    for (int k = 0; k < k_all; ++k) {
        double c = -op.contract_l(k, acc.interior());
        for (int s = 0; s < 4; ++s)
            c += op.contract_conormal(k, static_cast<Side>(s), acc.boundary(static_cast<Side>(s)));
        if (k == i) c += 1.0;
        c -= op.psi_at_node(k, i);
        sys.C(i, k) = c;
    }
    sys.d(i) = acc.data_term();
}

// Dense LU solve with an SVD condition number; throws (carrying kappa) on a
// numerically singular matrix.
inline void solve_system(SpectralSystem& sys) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.C);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    sys.kappa = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin > smax * 1e-14))
        throw std::runtime_error("spectral system is numerically singular (kappa ~ " +
                                 std::to_string(sys.kappa) + ")");
    sys.u = Eigen::PartialPivLU<Eigen::MatrixXd>(sys.C).solve(sys.d);
}

// Explicit event lists for one node's walk, matching the row contract above.
struct WalkTrace {
    struct BoundaryEvent { Side side; Point2 point; double alpha; };
    struct InteriorEvent { Point2 point; double beta; };
    std::vector<BoundaryEvent> boundary;
    std::vector<InteriorEvent> interior;
};

// Assembles and solves C u = d from explicit per-node traces (one per
// retained node, in node order).
template <WalkProblem P>
SpectralSystem assemble(const SpectralOperator& op, const P& problem,
                        std::span<const WalkTrace> traces) {
    const int k_all = op.basis().size();
    if (static_cast<int>(traces.size()) != k_all)
        throw std::invalid_argument("assemble: need one trace per retained node");
    SpectralSystem sys;
    sys.C.resize(k_all, k_all);
    sys.d.resize(k_all);
    for (int i = 0; i < k_all; ++i) {
        RowAccumulator acc(op.order());
        for (const auto& ev : traces[i].interior)
            acc.add_interior(ev.point.x, ev.point.y, ev.beta,
                             problem.source(ev.point.x, ev.point.y));
        for (const auto& ev : traces[i].boundary) {
            const SquareDomain dom; // tangential coordinate on the unit square
            acc.add_boundary(ev.side, dom.side_coordinate(ev.point, ev.side), ev.alpha,
                             problem.neumann(ev.side, ev.point.x, ev.point.y));
        }
        finalize_row(op, i, acc, sys);
    }
    solve_system(sys);
    return sys;
}

// Reflected-Euler-driven assembly for the pure Neumann problem: per retained
// node, m trajectories of horizon t0 feed interior events (weight delta) and
// kernel-weighted boundary events (weight delta * k(d)); the same events fill
// the row of C and the entry of d, which is what cancels most of the Monte
// Carlo noise in the solved nodal values.
template <WalkProblem P>
SpectralSystem run_spectral_euler(const P& problem, const SpectralOperator& op,
                                  const EulerConfig& cfg, long m_walks,
                                  unsigned workers = 0) {
    const SquareDomain dom = SquareDomain::pure_neumann();
    const int k_all = op.basis().size();
    const long steps = cfg.steps();
    const double sqrt_delta = std::sqrt(cfg.delta);
    const LocalTimeKernel kernel(cfg.kernel_shape, cfg.xi);
    const double cutoff = kernel.cutoff();

    SpectralSystem sys;
    sys.C.resize(k_all, k_all);
    sys.d.resize(k_all);

    std::vector<RowAccumulator> rows(k_all, RowAccumulator(op.order()));
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= k_all) return;
            RowAccumulator acc(op.order());
            const Point2 start = op.basis().node(i);
            for (long t = 0; t < m_walks; ++t) {
                RngStream rng(cfg.seed,
                              (static_cast<std::uint64_t>(i) << 40) ^ static_cast<std::uint64_t>(t));
                Point2 p = start;
                for (long k = 0; k < steps; ++k) {
                    acc.add_interior(p.x, p.y, cfg.delta, problem.source(p.x, p.y));
                    const SideHit hit = nearest_side(p, dom);
                    if (hit.distance < cutoff)
                        acc.add_boundary(hit.side, dom.side_coordinate(hit.projection, hit.side),
                                         cfg.delta * kernel(hit.distance),
                                         problem.neumann(hit.side, hit.projection.x,
                                                         hit.projection.y));
                    const Point2 prop =
                        detail::euler_propose(p, problem, cfg.delta, sqrt_delta, rng);
                    p = dom.contains(prop) ? prop : symmetrize(prop, dom);
                }
            }
            acc.scale(1.0 / static_cast<double>(m_walks));
            rows[i] = std::move(acc);
        }
    };
    {
        unsigned w = detail::resolve_workers(workers);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (int i = 0; i < k_all; ++i) finalize_row(op, i, rows[i], sys);
    solve_system(sys);
    return sys;
}

// Maximum nodal error over the whole (N+1)^2 grid (the removed node is read
// through the interpolant).
template <class Exact>
double err1(const CenteredBasis& cb, std::span<const double> nodal, Exact&& exact) {
    const auto& z = cb.base.one_d.nodes();
    double worst = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = 0; b < z.size(); ++b) {
            const double approx = cb.evaluate(nodal, z[a], z[b]);
            worst = std::max(worst, std::fabs(exact(z[a], z[b]) - approx));
        }
    return worst;
}

// err2 additionally removes the additive shift a particle-centered solution
// carries: the computed interpolant has zero cloud mean, so the comparison
// subtracts the cloud average of the exact solution. Valid when the exact
// field is known only up to a constant (the constant cancels).
template <class Exact>
double err2(const CenteredBasis& cb, std::span<const double> nodal, Exact&& exact,
            const ParticleCloud& cloud) {
    if (cloud.points.empty()) throw std::invalid_argument("err2: empty cloud");
    double corr = 0.0;
    for (const Point2& p : cloud.points) corr += exact(p.x, p.y);
    corr /= static_cast<double>(cloud.points.size());
    const auto& z = cb.base.one_d.nodes();
    double worst = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = 0; b < z.size(); ++b) {
            const double approx = cb.evaluate(nodal, z[a], z[b]);
            worst = std::max(worst, std::fabs(exact(z[a], z[b]) - corr - approx));
        }
    return worst;
}

// The ideal (exact-integral) matrix of the approximate centering:
// c_ij = delta_ij - v_i with v_i = int Psi_i p. All eigenvalues are 1 except
// one equal to 1 - sum_i v_i.
inline Eigen::MatrixXd ideal_approx_matrix(const Eigen::VectorXd& v) {
    const auto k = v.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(k, k);
    c.colwise() -= v;
    return c;
}

} // namespace nmc
