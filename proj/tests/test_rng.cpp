#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "neumann_mc/rng.hpp"

using namespace nmc;

TEST_CASE("streams are deterministic and index-separated") {
    RngStream a(42, 0), b(42, 0), c(42, 1);
    bool all_equal = true, any_equal_cross = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_equal_cross = any_equal_cross || (va == c.next_u64());
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_cross);
}

TEST_CASE("uniform and index draws stay in range") {
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.uniform_index(7) < 7);
    }
}

TEST_CASE("gaussian pair has the right moments") {
    RngStream rng(5, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        double z0, z1;
        rng.gaussian_pair(z0, z1);
        s += z0 + z1;
        s2 += z0 * z0 + z1 * z1;
        cross += z0 * z1;
    }
    CHECK(std::fabs(s / (2 * n)) < 0.005);
    CHECK(s2 / (2 * n) == Catch::Approx(1.0).margin(0.01));
    CHECK(std::fabs(cross / n) < 0.01);
}

TEST_CASE("exponential draw has unit mean") {
    RngStream rng(9, 0);
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rng.exponential();
    CHECK(s / n == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("derive_seed separates salts") {
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
}
