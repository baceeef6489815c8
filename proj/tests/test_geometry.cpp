#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kerr/geometry.hpp"

using namespace kerr;

TEST_CASE("vector algebra basics") {
    const Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
    CHECK(dot(a, b) == doctest::Approx(-2 + 1 + 12));
    const Vec3 c = cross(Vec3{1, 0, 0}, Vec3{0, 1, 0});
    CHECK(c.x == 0);
    CHECK(c.y == 0);
    CHECK(c.z == 1);
    CHECK(norm(Vec3{3, 4, 0}) == doctest::Approx(5));
}

TEST_CASE("direction normalizes and validates") {
    const Direction d({0, 0, 2.5});
    CHECK(norm(d.vec()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(Direction({0, 0, 0}), std::invalid_argument);

    CHECK(Direction({1, 1, 0}).transverse_to_e3());
    CHECK_FALSE(Direction({1, 0, 0.5}).transverse_to_e3());
}

TEST_CASE("phase examples") {
    const Direction e1 = Direction::e1();
    CHECK(phase(0, {0, 0, 0}, e1) == 0.0);
    CHECK(phase(1, {1, 0, 0}, e1) == 0.0);
    CHECK(phase(0.5, {2, 0, 0}, e1) == doctest::Approx(1.5));
    // outgoing variant flips the time sign
    CHECK(outgoing_phase(0.5, {2, 0, 0}, e1) == doctest::Approx(2.5));
}

TEST_CASE("phase is constant along incoming characteristics") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 50; ++k) {
        const Direction omega(Vec3{u(rng), u(rng), u(rng) + 3.5});
        const Vec3 y{u(rng), u(rng), u(rng)};
        const double expected = dot(y, omega.vec());
        for (double t : {0.0, 0.7, 2.9}) {
            CHECK(phase(t, y + t * omega.vec(), omega) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("characteristic coordinates") {
    const Direction e1 = Direction::e1();
    const Vec3 p{0.3, -1, 2};
    auto [s0, y0] = to_characteristic(0, p, e1);
    CHECK(s0 == 0.0);
    CHECK(y0.x == p.x);
    CHECK(y0.y == p.y);
    CHECK(y0.z == p.z);

    auto [s1, y1] = to_characteristic(2, {2, 1, 0}, e1);
    CHECK(s1 == 2.0);
    CHECK(y1.x == doctest::Approx(0));
    CHECK(y1.y == doctest::Approx(1));
    CHECK(y1.z == doctest::Approx(0));
}

TEST_CASE("characteristic round trip on random inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 200; ++k) {
        const Direction omega(Vec3{u(rng), u(rng), u(rng) + 6});
        const double t = u(rng);
        const Vec3 x{u(rng), u(rng), u(rng)};
        auto [s, y] = to_characteristic(t, x, omega);
        auto [t2, x2] = from_characteristic(s, y, omega);
        CHECK(t2 == doctest::Approx(t).epsilon(1e-14));
        CHECK(norm(x2 - x) <= 1e-14 * (1 + norm(x)));
    }
}

TEST_CASE("ray parameterizes at unit speed") {
    const Ray ray({1, 2, 3}, Direction({0, 1, 0}), 0.0, 5.0);
    CHECK(norm(ray.at(2.5) - ray.at(1.5)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Ray({0, 0, 0}, Direction::e1(), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("grids validate and index") {
    CHECK_THROWS_AS(Grid1D(0, -1, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0, 1, 1), std::invalid_argument);
    const Grid1D g1(1.0, 0.5, 5);
    CHECK(g1.node(4) == doctest::Approx(3.0));
    CHECK(g1.length() == doctest::Approx(2.0));

    CHECK_THROWS_AS(Grid3D({0, 0, 0}, {1, 0, 1}, {4, 4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Grid3D({0, 0, 0}, {1, 1, 1}, {4, 1, 4}), std::invalid_argument);
    const Grid3D g = Grid3D::cube(2.0, 5);
    CHECK(g.size() == 125);
    CHECK(g.index(1, 2, 3) == (1 * 5 + 2) * 5 + 3);
    const Vec3 n = g.node(4, 0, 2);
    CHECK(n.x == doctest::Approx(2));
    CHECK(n.y == doctest::Approx(-2));
    CHECK(n.z == doctest::Approx(0));
    CHECK(g.is_boundary(0, 2, 2));
    CHECK_FALSE(g.is_boundary(2, 2, 2));
}
