// Type-erased problem data. Hot experiment paths use concrete problem structs
// (see problems.hpp); Coefficients is the flexible std::function-based model
// of the same concept for tests and one-off setups.
#pragma once

#include <functional>

#include "neumann_mc/geometry.hpp"

namespace nmc {

// A walk problem provides, on the square:
//   source(x,y)          : f, with the convention  L u = -f
//   neumann(side,x,y)    : g = (1/2) du/dn with n the *outward* normal
//                          (the sign convention the boundary schemes and the
//                          local-time estimator are consistent with)
//   dirichlet(x,y)       : boundary value on absorbing sides (0 if unused)
//   drift(x,y)           : b, the first-order coefficient of L
// plus `static constexpr bool zero_drift` so driftless walks skip the drift.
template <class P>
concept WalkProblem = requires(const P& p, Side s, double x, double y) {
    { p.source(x, y) } -> std::convertible_to<double>;
    { p.neumann(s, x, y) } -> std::convertible_to<double>;
    { p.dirichlet(x, y) } -> std::convertible_to<double>;
    { p.drift(x, y) } -> std::convertible_to<Point2>;
    { P::zero_drift } -> std::convertible_to<bool>;
};

struct Coefficients {
    static constexpr bool zero_drift = false;

    std::function<double(double, double)> f = [](double, double) { return 0.0; };
    std::function<double(Side, double, double)> g =
        [](Side, double, double) { return 0.0; };
    std::function<double(double, double)> g2 = [](double, double) { return 0.0; };
    std::function<Point2(double, double)> b = [](double, double) { return Point2{}; };
    double sigma = 1.0; // unit diffusion (a = I) is the only supported value

    double source(double x, double y) const { return f(x, y); }
    double neumann(Side s, double x, double y) const { return g(s, x, y); }
    double dirichlet(double x, double y) const { return g2(x, y); }
    Point2 drift(double x, double y) const { return b(x, y); }
};

} // namespace nmc
