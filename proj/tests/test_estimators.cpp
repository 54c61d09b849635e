#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "neumann_mc/estimators.hpp"
#include "neumann_mc/problems.hpp"

using namespace nmc;

TEST_CASE("monte carlo of a constant and of a coin") {
    const auto c = monte_carlo([](RngStream&) { return 3.25; }, 1000, 1, 0);
    CHECK(c.mean == 3.25);
    CHECK(c.variance == 0.0);
    CHECK(c.std_error == 0.0);

    const auto coin =
        monte_carlo([](RngStream& rng) { return rng.uniform() < 0.5 ? 1.0 : 0.0; }, 50000, 2, 0);
    CHECK(coin.mean == Catch::Approx(0.5).margin(3.0 * coin.std_error));
    CHECK(coin.variance == Catch::Approx(0.25).epsilon(0.05));

    CHECK_THROWS_AS(monte_carlo([](RngStream&) { return 0.0; }, 1, 3, 0),
                    std::invalid_argument);
}

TEST_CASE("monte carlo is bit-identical across worker counts") {
    auto run = [](RngStream& rng) {
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) acc += rng.uniform() - 0.5;
        return acc;
    };
    const auto s1 = monte_carlo(run, 10000, 99, 1);
    const auto s2 = monte_carlo(run, 10000, 99, 2);
    const auto s5 = monte_carlo(run, 10000, 99, 5);
    CHECK(s1.mean == s2.mean);
    CHECK(s1.variance == s2.variance);
    CHECK(s1.mean == s5.mean);
    CHECK(s1.variance == s5.variance);

    const auto v1 = monte_carlo_vec(
        [&](RngStream& rng, std::span<double> out) {
            out[0] = rng.uniform();
            out[1] = rng.uniform() * 2.0;
        },
        5000, 2, 7, 1);
    const auto v3 = monte_carlo_vec(
        [&](RngStream& rng, std::span<double> out) {
            out[0] = rng.uniform();
            out[1] = rng.uniform() * 2.0;
        },
        5000, 2, 7, 3);
    CHECK(v1[0].mean == v3[0].mean);
    CHECK(v1[1].variance == v3[1].variance);
}

TEST_CASE("variance scan") {
    const std::vector<double> times{1.0, 2.0, 3.0};
    auto factory = [](double) {
        return [](RngStream&) { return 0.0; };
    };
    const auto scan = variance_scan(factory, times, 100, 4, 0);
    REQUIRE(scan.size() == 3);
    for (const auto& [t, s] : scan) CHECK(s.variance == 0.0);

    const std::vector<double> bad{1.0, 1.0};
    CHECK_THROWS_AS(variance_scan(factory, bad, 100, 4, 0), std::invalid_argument);
}

TEST_CASE("least squares slope") {
    const std::vector<std::pair<double, double>> line{{1, 1}, {2, 2}, {3, 3}};
    CHECK(fit_slope(line) == Catch::Approx(1.0));
    const std::vector<std::pair<double, double>> flat{{1, 5}, {2, 5}};
    CHECK(fit_slope(flat) == Catch::Approx(0.0).margin(1e-15));
    const std::vector<std::pair<double, double>> degen{{1, 1}, {1, 2}};
    CHECK_THROWS_AS(fit_slope(degen), std::invalid_argument);

    RngStream rng(6, 0);
    std::vector<std::pair<double, double>> noisy;
    for (int i = 1; i <= 50; ++i)
        noisy.emplace_back(i, 2.0 * i + rng.uniform(-0.1, 0.1));
    CHECK(fit_slope(noisy) == Catch::Approx(2.0).margin(0.01));
}

TEST_CASE("tchebychef points closed forms") {
    const auto p1 = tcheb_points(1);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0] == Catch::Approx(0.0).margin(1e-15));

    const auto p2 = tcheb_points(2);
    CHECK(p2[0] == Catch::Approx(std::sqrt(2.0) / 2.0));
    CHECK(p2[1] == Catch::Approx(-std::sqrt(2.0) / 2.0));

    const auto p3 = tcheb_points(3);
    CHECK(p3[0] == Catch::Approx(std::sqrt(3.0) / 2.0));
    CHECK(p3[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(p3[2] == Catch::Approx(-std::sqrt(3.0) / 2.0));

    CHECK_THROWS_AS(tcheb_points(0), std::invalid_argument);
}

TEST_CASE("bias metrics") {
    auto exact = [](double x, double y) { return x * x - y; };
    const auto pts = tcheb_points(3);

    std::vector<double> grid(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) grid[i * 3 + j] = exact(pts[i], pts[j]) + 0.7;
    auto m = bias_metrics(grid, exact, 3);
    CHECK(m.a_bar == Catch::Approx(0.7));
    CHECK(m.rho == Catch::Approx(0.0).margin(1e-12));

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) grid[i * 3 + j] = exact(pts[i], pts[j]);
    m = bias_metrics(grid, exact, 3);
    CHECK(m.a_bar == Catch::Approx(0.0).margin(1e-15));
    CHECK(m.rho == Catch::Approx(0.0).margin(1e-15));

    // stationarity: the residual grid mean vanishes after subtracting a_bar
    RngStream rng(14, 0);
    for (auto& v : grid) v = rng.uniform(-5.0, 5.0);
    m = bias_metrics(grid, exact, 3);
    double resid = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            resid += grid[i * 3 + j] - exact(pts[i], pts[j]) - m.a_bar;
    CHECK(std::fabs(resid) < 1e-12);
}

TEST_CASE("variance of the homogeneous Neumann score grows linearly in T") {
    const SquareDomain dom;
    const PolyNeumannProblem problem;
    const std::vector<double> times{4.0, 6.0, 8.0, 10.0, 12.0};
    const auto scan = variance_scan(
        [&](double t) {
            EulerConfig ec;
            ec.delta = 0.01;
            ec.t0 = t;
            return [&, ec](RngStream& rng) {
                return run_neumann(Point2{-0.5, -0.5}, problem, dom, ec, rng).score;
            };
        },
        times, 20000, 8, 0);

    // increasing, and bracketed by C1 +- C2 sqrt(T) + C3 T around a least
    // squares fit in the basis {1, sqrt(T), T}
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        pts.emplace_back(scan[i].first, scan[i].second.variance);
        if (i > 0) CHECK(scan[i].second.variance > scan[i - 1].second.variance);
    }
    const double slope = fit_slope(pts);
    CHECK(slope == Catch::Approx(PolyNeumannProblem::variance_slope).margin(0.15));
    // residuals of the plain linear fit stay within a sqrt(T) band
    double c1 = 0.0;
    for (const auto& [t, v] : pts) c1 += v - slope * t;
    c1 /= pts.size();
    for (const auto& [t, v] : pts) {
        const double band = 0.1 * std::sqrt(t);
        CHECK(v >= c1 - band + slope * t);
        CHECK(v <= c1 + band + slope * t);
    }
}

TEST_CASE("uniform invariant sampler") {
    const auto cloud = sample_invariant_uniform(10000, 17);
    REQUIRE(cloud.points.size() == 10000);
    CHECK(cloud.provenance == CloudProvenance::iid_uniform);
    double mx = 0.0;
    int quadrant = 0;
    for (const auto& p : cloud.points) {
        CHECK(std::fabs(p.x) <= 1.0);
        CHECK(std::fabs(p.y) <= 1.0);
        mx += p.x;
        if (p.x > 0 && p.y > 0) ++quadrant;
    }
    // Var(x) = 1/3
    CHECK(mx / 10000 == Catch::Approx(0.0).margin(3.0 / std::sqrt(3.0 * 10000)));
    CHECK(static_cast<double>(quadrant) / 10000 == Catch::Approx(0.25).margin(0.02));
}

TEST_CASE("path invariant sampler") {
    const SquareDomain dom;
    const PolyNeumannProblem driftless;
    const auto cloud = sample_invariant_path(driftless, dom, 0.01, 10000, 19);
    CHECK(cloud.provenance == CloudProvenance::long_path);
    double mx = 0.0;
    for (const auto& p : cloud.points) {
        CHECK(dom.contains(p));
        mx += p.x;
    }
    // uniform invariant law; path correlation widens the tolerance
    CHECK(mx / 10000 == Catch::Approx(0.0).margin(0.05));

    // outward drift in x pushes mass towards the walls: E|x| grows above the
    // uniform value 1/2 (oracle: a long path at matched delta)
    const ConvectionProblem convection{0.3, 0.2, 0.1};
    const auto drifted = sample_invariant_path(convection, dom, 0.01, 1000000, 23);
    double ax = 0.0;
    for (const auto& p : drifted.points) ax += std::fabs(p.x);
    CHECK(ax / 1e6 > 0.5 + 0.005);
}
