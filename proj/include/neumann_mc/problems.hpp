// The four built-in test problems on [-1,1]^2, with closed-form solutions.
//
// Conventions (see coefficients.hpp): the PDE is L u = -f with
// L = (1/2) Lap + b . grad, and the Neumann datum is g = (1/2) du/dn with n
// the outward normal. For u = exp(alpha(x+y)) that makes g positive on the
// top and right sides and negative on the bottom and left sides.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "neumann_mc/coefficients.hpp"
#include "neumann_mc/geometry.hpp"

namespace nmc {

namespace detail {
inline double side_sign_outward(Side s) {
    return (s == Side::top || s == Side::right) ? 1.0 : -1.0;
}
} // namespace detail

// Mixed Dirichlet-Neumann Poisson problem: u = exp(alpha(x+y)), Dirichlet on
// the right side, Neumann elsewhere.
struct MixedExpProblem {
    static constexpr bool zero_drift = true;
    double alpha = 1.0 / 3.0;

    double source(double x, double y) const {
        return -alpha * alpha * std::exp(alpha * (x + y));
    }
    double neumann(Side s, double x, double y) const {
        return detail::side_sign_outward(s) * 0.5 * alpha * std::exp(alpha * (x + y));
    }
    double dirichlet(double x, double y) const { return std::exp(alpha * (x + y)); }
    Point2 drift(double, double) const { return {}; }

    double exact(double x, double y) const { return std::exp(alpha * (x + y)); }
};

// Homogeneous pure Neumann Poisson problem with polynomial solution
// u = (x^2-1)^2 (y^2-1)^2 - 64/225 (zero mean).
struct PolyNeumannProblem {
    static constexpr bool zero_drift = true;

    double source(double x, double y) const {
        const double qx = (x * x - 1.0), qy = (y * y - 1.0);
        return -2.0 * (3.0 * x * x - 1.0) * qy * qy - 2.0 * (3.0 * y * y - 1.0) * qx * qx;
    }
    double neumann(Side, double, double) const { return 0.0; }
    double dirichlet(double, double) const { return 0.0; }
    Point2 drift(double, double) const { return {}; }

    double exact(double x, double y) const {
        const double qx = (x * x - 1.0), qy = (y * y - 1.0);
        return qx * qx * qy * qy - 64.0 / 225.0;
    }
    // (1/4) int |grad u|^2, the asymptotic slope of the score variance in T
    static constexpr double variance_slope = 32768.0 / 33075.0;
};

// Inhomogeneous pure Neumann problem, zero-mean solution
// u = exp(alpha(x+y)) - (exp(alpha)-exp(-alpha))^2 / (4 alpha^2).
struct PureNeumannExpProblem {
    static constexpr bool zero_drift = true;
    double alpha = 1.0 / 3.0;

    double source(double x, double y) const {
        return -alpha * alpha * std::exp(alpha * (x + y));
    }
    double neumann(Side s, double x, double y) const {
        return detail::side_sign_outward(s) * 0.5 * alpha * std::exp(alpha * (x + y));
    }
    double dirichlet(double, double) const { return 0.0; }
    Point2 drift(double, double) const { return {}; }

    double zero_mean_constant() const {
        const double d = std::exp(alpha) - std::exp(-alpha);
        return d * d / (4.0 * alpha * alpha);
    }
    double exact(double x, double y) const {
        return std::exp(alpha * (x + y)) - zero_mean_constant();
    }
};

// Convection-diffusion: L = (1/2) Lap + x bx d/dx + y by d/dy, with solution
// exp(alpha(x+y)) up to an additive constant (the invariant measure is not
// known in closed form).
struct ConvectionProblem;

struct BuiltinProblem {
    Coefficients coefficients;
    std::function<double(double, double)> exact; // zero-mean where applicable
    SquareDomain domain;
};

BuiltinProblem builtin_problem(const std::string& id, double alpha = 1.0 / 3.0,
                               double beta_x = 0.2, double beta_y = 0.1);

struct ConvectionProblem {
    static constexpr bool zero_drift = false;
    double alpha = 0.3;
    double beta_x = 0.2;
    double beta_y = 0.1;

    double source(double x, double y) const {
        return -alpha * (alpha + x * beta_x + y * beta_y) * std::exp(alpha * (x + y));
    }
    double neumann(Side s, double x, double y) const {
        return detail::side_sign_outward(s) * 0.5 * alpha * std::exp(alpha * (x + y));
    }
    double dirichlet(double, double) const { return 0.0; }
    Point2 drift(double x, double y) const { return {beta_x * x, beta_y * y}; }

    // known only up to an additive constant
    double exact_raw(double x, double y) const { return std::exp(alpha * (x + y)); }
};

namespace detail {

template <class P>
Coefficients erase_problem(const P& p) {
    Coefficients c;
    c.f = [p](double x, double y) { return p.source(x, y); };
    c.g = [p](Side s, double x, double y) { return p.neumann(s, x, y); };
    c.g2 = [p](double x, double y) { return p.dirichlet(x, y); };
    c.b = [p](double x, double y) { return p.drift(x, y); };
    return c;
}

} // namespace detail

// Type-erased access to the built-in problems by name:
//   mixed_exp | neumann_poly | neumann_exp | convection_exp
inline BuiltinProblem builtin_problem(const std::string& id, double alpha, double beta_x,
                                      double beta_y) {
    if (id == "mixed_exp") {
        const MixedExpProblem p{alpha};
        return {detail::erase_problem(p),
                [p](double x, double y) { return p.exact(x, y); },
                SquareDomain::mixed_right_dirichlet()};
    }
    if (id == "neumann_poly") {
        const PolyNeumannProblem p;
        return {detail::erase_problem(p),
                [p](double x, double y) { return p.exact(x, y); },
                SquareDomain::pure_neumann()};
    }
    if (id == "neumann_exp") {
        const PureNeumannExpProblem p{alpha};
        return {detail::erase_problem(p),
                [p](double x, double y) { return p.exact(x, y); },
                SquareDomain::pure_neumann()};
    }
    if (id == "convection_exp") {
        const ConvectionProblem p{alpha, beta_x, beta_y};
        return {detail::erase_problem(p),
                [p](double x, double y) { return p.exact_raw(x, y); },
                SquareDomain::pure_neumann()};
    }
    throw std::invalid_argument("unknown builtin problem: " + id);
}

} // namespace nmc
