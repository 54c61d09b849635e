// Delocalization kernels for the local-time term of the Feynman-Kac score.
#pragma once

#include <cmath>
#include <numbers>

#include "neumann_mc/geometry.hpp"

namespace nmc {

// 2-D Gaussian kernel
//   K_xi(p,q) = 1/((2 pi)^{d/2} xi^d) * exp(-sum (p_i-q_i)^2 / xi^2),  d = 2.
inline double gaussian_kernel(const Point2& p, const Point2& q, double xi) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double inv = 1.0 / (xi * xi);
    return std::exp(-(dx * dx + dy * dy) * inv) / (2.0 * std::numbers::pi * xi * xi);
}

enum class KernelShape {
    gaussian_as_printed, // exp(-d^2/xi^2) profile
    normal_1d            // exp(-d^2/(2 xi^2)) profile, the standard N(0, xi^2) width
};

// Boundary-localization kernel evaluated at the distance to the boundary.
// Whatever the profile, the weight is normalized to unit mass on [0, inf):
// that normalization is what makes  delta * sum g(pi(X_k)) * k(d_k)  a
// consistent estimator of  int g dV  for the reflected dynamics (the raw 2-D
// normalization above would scale the local time by ~1/(4 sqrt(pi) xi)).
class LocalTimeKernel {
  public:
    LocalTimeKernel() = default;

    LocalTimeKernel(KernelShape shape, double xi) : xi_(xi) {
        if (shape == KernelShape::gaussian_as_printed) {
            // 2/(sqrt(pi) xi) * exp(-(d/xi)^2)
            scale_ = 2.0 / (std::sqrt(std::numbers::pi) * xi);
            inv_two_sigma2_ = 1.0 / (xi * xi);
            cutoff_ = 7.0 * xi;
        } else {
            // 2/(sqrt(2 pi) xi) * exp(-d^2/(2 xi^2))
            scale_ = 2.0 / (std::sqrt(2.0 * std::numbers::pi) * xi);
            inv_two_sigma2_ = 0.5 / (xi * xi);
            cutoff_ = 10.0 * xi;
        }
    }

    // Contributions beyond the cutoff are below 1e-18 relative and skipped.
    double cutoff() const { return cutoff_; }
    double xi() const { return xi_; }

    double operator()(double d) const {
        return scale_ * std::exp(-d * d * inv_two_sigma2_);
    }

  private:
    double xi_ = 0.0;
    double scale_ = 0.0;
    double inv_two_sigma2_ = 0.0;
    double cutoff_ = -1.0;
};

} // namespace nmc
