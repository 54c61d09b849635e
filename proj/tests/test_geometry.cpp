#include <catch2/catch_amalgamated.hpp>

#include "neumann_mc/geometry.hpp"
#include "neumann_mc/rng.hpp"

using namespace nmc;

TEST_CASE("distance to boundary on the unit square") {
    const SquareDomain dom;
    CHECK(distance_to_boundary({0.0, 0.0}, dom) == Catch::Approx(1.0));
    CHECK(distance_to_boundary({0.8, 0.0}, dom) == Catch::Approx(0.2));
    CHECK(distance_to_boundary({0.3, -0.9}, dom) == Catch::Approx(0.1));

    CHECK_THROWS_AS(distance_to_boundary({1.0, 0.5}, dom), std::domain_error);
    CHECK_THROWS_AS(distance_to_boundary({1.5, 0.0}, dom), std::domain_error);
}

TEST_CASE("projection to the nearest side") {
    const SquareDomain dom;
    auto hit = project_to_boundary({0.8, 0.0}, dom);
    CHECK(hit.side == Side::right);
    CHECK(hit.projection.x == Catch::Approx(1.0));
    CHECK(hit.projection.y == Catch::Approx(0.0));

    hit = project_to_boundary({0.0, 0.95}, dom);
    CHECK(hit.side == Side::top);
    CHECK(hit.projection.x == Catch::Approx(0.0));
    CHECK(hit.projection.y == Catch::Approx(1.0));

    // corner-diagonal tie broken by the fixed side order right > top
    hit = project_to_boundary({0.9, 0.9}, dom);
    CHECK(hit.side == Side::right);
    CHECK(hit.projection.x == Catch::Approx(1.0));
    CHECK(hit.projection.y == Catch::Approx(0.9));
}

TEST_CASE("projection properties on random interior points") {
    const SquareDomain dom;
    RngStream rng(7, 0);
    for (int i = 0; i < 2000; ++i) {
        const Point2 p{rng.uniform(-0.999, 0.999), rng.uniform(-0.999, 0.999)};
        const auto hit = project_to_boundary(p, dom);
        const double dist = std::hypot(p.x - hit.projection.x, p.y - hit.projection.y);
        CHECK(dist == Catch::Approx(distance_to_boundary(p, dom)));
        CHECK(std::max(std::fabs(hit.projection.x), std::fabs(hit.projection.y)) ==
              Catch::Approx(1.0));
    }
}

TEST_CASE("symmetrize mirrors violated sides") {
    const SquareDomain dom;
    auto q = symmetrize({1.1, 0.0}, dom);
    CHECK(q.x == Catch::Approx(0.9));
    CHECK(q.y == Catch::Approx(0.0));

    q = symmetrize({-1.05, 1.02}, dom);
    CHECK(q.x == Catch::Approx(-0.95));
    CHECK(q.y == Catch::Approx(0.98));

    q = symmetrize({0.5, -1.3}, dom);
    CHECK(q.x == Catch::Approx(0.5));
    CHECK(q.y == Catch::Approx(-0.7));

    CHECK_THROWS_AS(symmetrize({3.5, 0.0}, dom), std::runtime_error);
}

TEST_CASE("symmetrize is an involution for single-side violations") {
    const SquareDomain dom;
    RngStream rng(11, 0);
    for (int i = 0; i < 1000; ++i) {
        const Point2 out{1.0 + rng.uniform(0.0, 0.99), rng.uniform(-1.0, 1.0)};
        const Point2 in = symmetrize(out, dom);
        CHECK(dom.contains(in));
        // mirroring the image across the same side returns the original
        const Point2 back{2.0 - in.x, in.y};
        CHECK(back.x == Catch::Approx(out.x));
        CHECK(back.y == Catch::Approx(out.y));
    }
}

TEST_CASE("symmetrize containment for sub-half-width violations") {
    const SquareDomain dom;
    RngStream rng(13, 0);
    for (int i = 0; i < 2000; ++i) {
        Point2 p{rng.uniform(-1.999, 1.999), rng.uniform(-1.999, 1.999)};
        if (dom.contains(p)) continue;
        CHECK(dom.contains(symmetrize(p, dom)));
    }
}

TEST_CASE("mixed domain side bookkeeping") {
    const SquareDomain dom = SquareDomain::mixed_right_dirichlet();
    CHECK(dom.kind(Side::right) == BcKind::dirichlet);
    CHECK(dom.kind(Side::top) == BcKind::neumann);
    CHECK(dom.has_dirichlet());

    const auto hit = nearest_neumann_side({0.9, 0.0}, dom);
    CHECK(hit.side == Side::top); // right side excluded; top wins tie order
    CHECK(hit.distance == Catch::Approx(1.0));

    // boundary points count as inside (closed square)
    CHECK(dom.contains({1.0, 0.3}));
    CHECK_FALSE(dom.contains({1.0 + 1e-12, 0.3}));
}
