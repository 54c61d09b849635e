// Dense monomial polynomials and the 1-D Lagrange basis on the Tchebychef
// nodes z_n = cos((2n+1) pi / (2N+2)). Sizes are tiny (N <= 8), so monomial
// coefficients are exact enough for differentiation while evaluation goes
// through the barycentric form.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nmc {

// Polynomial with ascending monomial coefficients.
struct Poly1 {
    std::vector<double> c;

    double eval(double x) const {
        double acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
        return acc;
    }

    Poly1 derivative() const {
        if (c.size() <= 1) return {{0.0}};
        Poly1 d;
        d.c.resize(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            d.c[k - 1] = static_cast<double>(k) * c[k];
        return d;
    }

    // int_{-1}^{1} p(x) dx
    double integral() const {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.size(); k += 2)
            acc += 2.0 * c[k] / static_cast<double>(k + 1);
        return acc;
    }

    // multiply by x
    Poly1 shift_up() const {
        Poly1 r;
        r.c.assign(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) r.c[k + 1] = c[k];
        return r;
    }

    static Poly1 axpy(double a, const Poly1& p, double b, const Poly1& q) {
        Poly1 r;
        r.c.assign(std::max(p.c.size(), q.c.size()), 0.0);
        for (std::size_t k = 0; k < p.c.size(); ++k) r.c[k] += a * p.c[k];
        for (std::size_t k = 0; k < q.c.size(); ++k) r.c[k] += b * q.c[k];
        return r;
    }
};

class Lagrange1D {
  public:
    explicit Lagrange1D(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("Lagrange1D: need degree >= 1");
        nodes_.resize(n + 1);
        for (int k = 0; k <= n; ++k)
            nodes_[k] = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n + 2.0));

        // monomial form by repeated multiplication, then the exact integrals
        polys_.resize(n + 1);
        integrals_.resize(n + 1);
        bary_.resize(n + 1);
        for (int k = 0; k <= n; ++k) {
            Poly1 p{{1.0}};
            double denom = 1.0;
            for (int m = 0; m <= n; ++m) {
                if (m == k) continue;
                // p *= (x - z_m)
                Poly1 q = p.shift_up();
                for (std::size_t a = 0; a < p.c.size(); ++a) q.c[a] -= nodes_[m] * p.c[a];
                p = q;
                denom *= nodes_[k] - nodes_[m];
            }
            for (auto& cc : p.c) cc /= denom;
            polys_[k] = p;
            integrals_[k] = p.integral();
            bary_[k] = 1.0 / denom;
        }
    }

    int degree() const { return n_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const Poly1& poly(int k) const { return polys_[k]; }
    double integral(int k) const { return integrals_[k]; }

    // Barycentric evaluation of all N+1 cardinal polynomials at x.
    void eval_all(double x, std::vector<double>& out) const {
        out.assign(nodes_.size(), 0.0);
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (x == nodes_[k]) { out[k] = 1.0; return; }
        }
        double wsum = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            out[k] = bary_[k] / (x - nodes_[k]);
            wsum += out[k];
        }
        for (auto& v : out) v /= wsum;
    }

    double eval(int k, double x) const {
        std::vector<double> all;
        eval_all(x, all);
        return all[k];
    }

  private:
    int n_;
    std::vector<double> nodes_;
    std::vector<Poly1> polys_;
    std::vector<double> integrals_;
    std::vector<double> bary_;
};

} // namespace nmc
