#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kerr/media.hpp"
#include "kerr/smooth.hpp"

using namespace kerr;

namespace {

// independent line-integral oracle: composite Simpson with a fixed fine grid
template <class F>
double simpson_oracle(const F& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

SusceptibilityField centered_gaussian(double a, double s, double R = 4.0, double R0 = 8.0) {
    return SusceptibilityField::analytic({{a, {0, 0, 0}, s}}, R, R0);
}

} // namespace

TEST_CASE("smoothstep window is a plateau with matching derivatives") {
    const PlateauWindow w(1.0, 2.0);
    CHECK(w(0.0) == 1.0);
    CHECK(w(0.5) == 1.0);
    CHECK(w(-0.8) == 1.0);
    CHECK(w(2.0) == 0.0);
    CHECK(w(3.0) == 0.0);
    CHECK(w(1.5) > 0.0);
    CHECK(w(1.5) < 1.0);

    // finite-difference check of the analytic derivatives
    const double eps = 1e-6;
    for (double r : {1.2, 1.5, 1.85, -1.3, -1.7}) {
        const double d1 = (w(r + eps) - w(r - eps)) / (2 * eps);
        const double d2 = (w(r + eps) - 2 * w(r) + w(r - eps)) / (eps * eps);
        CHECK(w.d1(r) == doctest::Approx(d1).epsilon(1e-5));
        CHECK(w.d2(r) == doctest::Approx(d2).epsilon(1e-3));
    }
}

TEST_CASE("eval: zero field, peak value, support condition") {
    const auto zero = SusceptibilityField::zero(4.0);
    CHECK(zero({0.3, -2, 1}) == 0.0);
    CHECK(zero.is_zero());

    const auto g = centered_gaussian(1.0, 0.5);
    CHECK(g({0, 0, 0}) == doctest::Approx(1.0));   // cutoff is 1 near the center
    CHECK(g({5.0, 0, 0}) == 0.0);                  // |x| = R + 1
    CHECK(g({0, 4.0, 0}) == 0.0);                  // on the support sphere
}

TEST_CASE("field validation") {
    CHECK_THROWS_AS(SusceptibilityField::analytic({}, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SusceptibilityField::analytic({{1.0, {0, 0, 0}, -1.0}}, 2.0, 4.0),
                    std::invalid_argument);
}

TEST_CASE("retardation: zero cases") {
    const Ray ray({-6, 0, 0}, Direction::e1(), 0.0, 12.0);
    const auto zero = SusceptibilityField::zero(4.0);
    const RetardationProfile t0 = retardation(zero, 1.0, ray);
    CHECK(t0.tau_infinity() == 0.0);
    CHECK(t0(3.0) == 0.0);

    const auto g = centered_gaussian(1.0, 0.5);
    const RetardationProfile t1 = retardation(g, 0.0, ray);
    CHECK(t1.tau_infinity() == 0.0);
    CHECK(t1(8.0) == 0.0);
}

TEST_CASE("retardation through a centered unit gaussian matches the quadrature oracle") {
    // closed form: Int a exp(-x^2/(2 s^2)) dx = a s sqrt(2 pi); cutoff tails
    // are below 1e-12 for R = 8 s
    const double s = 0.5;
    const auto g = centered_gaussian(1.0, s);
    const Ray ray({-6, 0, 0}, Direction::e1(), 0.0, 12.0);
    const RetardationProfile tau = retardation(g, 1.0, ray);

    const double closed_form = 0.5 * s * std::sqrt(2.0 * M_PI);
    CHECK(closed_form == doctest::Approx(0.6266570686577502).epsilon(1e-12));
    const double oracle =
        0.5 * simpson_oracle([&](double x) { return g(ray.at(x + 6.0)); }, -4.0, 4.0);
    CHECK(tau.tau_infinity() == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(tau.tau_infinity() == doctest::Approx(closed_form).epsilon(1e-8));

    // saturation: constant past the support exit
    CHECK(tau(10.0) == doctest::Approx(tau(11.5)).epsilon(1e-14));
    CHECK(tau(10.0) == doctest::Approx(tau.tau_infinity()));
    // prefactor e0^2/2
    const RetardationProfile tau2 = retardation(g, 2.0, ray);
    CHECK(tau2.tau_infinity() == doctest::Approx(4.0 * tau.tau_infinity()).epsilon(1e-10));
}

TEST_CASE("retardation is non-decreasing for nonnegative chi") {
    const auto field = SusceptibilityField::analytic(
        {{1.0, {0.4, 0.2, 0}, 0.5}, {0.6, {-0.8, -0.2, 0.1}, 0.35}}, 3.0, 8.0);
    const Ray ray({-5, 0.1, 0.05}, Direction::e1(), 0.0, 10.0);
    const RetardationProfile tau = retardation(field, 1.3, ray);
    double prev = -1.0;
    for (int i = 0; i <= 60; ++i) {
        const double t = tau(-5.0 + 15.0 * i / 60.0 + 5.0);
        CHECK(t >= prev - 1e-12);
        prev = t;
    }
}

TEST_CASE("xray transform: zero cases and the gaussian oracle") {
    const auto zero = SusceptibilityField::zero(4.0);
    CHECK(xray_transform(zero, Direction::e1(), {0, 0, 0}) == 0.0);

    const auto g = centered_gaussian(1.0, 0.5);
    // line missing the support ball entirely
    CHECK(xray_transform(g, Direction::e1(), {0, 5.0, 0}) == 0.0);

    const double through_center = xray_transform(g, Direction::e1(), {-6, 0, 0});
    CHECK(through_center == doctest::Approx(0.5 * std::sqrt(2.0 * M_PI)).epsilon(1e-8));

    // consistency with the retardation prefactor: xray = 2 tau_inf / e0^2
    const Ray ray({-6, 0, 0}, Direction::e1(), 0.0, 12.0);
    const double e0 = 1.7;
    const RetardationProfile tau = retardation(g, e0, ray);
    CHECK(through_center == doctest::Approx(2.0 * tau.tau_infinity() / (e0 * e0)).epsilon(1e-9));
}

TEST_CASE("shift covariance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto base = SusceptibilityField::analytic(
        {{0.8, {0.3, -0.2, 0.1}, 0.4}, {-0.5, {-0.4, 0.5, -0.3}, 0.3}}, 3.0, 8.0);
    for (int k = 0; k < 10; ++k) {
        const Vec3 v{u(rng), u(rng), u(rng)};
        const auto shifted = base.translated(v);
        const Vec3 y{-5, u(rng), u(rng)};
        const Direction omega({1, 0.2 * u(rng), 0});
        const double a = xray_transform(base, omega, y);
        const double b = xray_transform(shifted, omega, y + v);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("rotation about e3 moves bump centers") {
    const auto base = SusceptibilityField::analytic({{1.0, {0.5, 0, 0.2}, 0.3}}, 2.0, 6.0);
    const auto rot = base.rotated_about_e3(M_PI / 2);
    CHECK(rot({0, 0.5, 0.2}) == doctest::Approx(base({0.5, 0, 0.2})).epsilon(1e-12));
    CHECK(rot({0.5, 0, 0.2}) < base({0.5, 0, 0.2}));
}

TEST_CASE("gridded field: trilinear eval, zero outside, line integral consistency") {
    const double s = 0.5;
    const auto analytic = centered_gaussian(1.0, s, 2.5, 6.0);
    const Grid3D grid = Grid3D::cube(3.0, 81);
    ScalarField samples(grid.size());
    for (std::size_t i = 0; i < grid.counts[0]; ++i)
        for (std::size_t j = 0; j < grid.counts[1]; ++j)
            for (std::size_t k = 0; k < grid.counts[2]; ++k)
                samples[grid.index(i, j, k)] = analytic(grid.node(i, j, k));
    const auto gridded = SusceptibilityField::gridded(grid, samples, 2.5, 6.0);

    CHECK(gridded({0.21, -0.13, 0.4}) ==
          doctest::Approx(analytic({0.21, -0.13, 0.4})).epsilon(2e-3));
    CHECK(gridded({3.5, 0, 0}) == 0.0);

    const double xa = xray_transform(analytic, Direction::e1(), {-4, 0.1, 0.2});
    const double xg = xray_transform(gridded, Direction::e1(), {-4, 0.1, 0.2});
    CHECK(xg == doctest::Approx(xa).epsilon(5e-3));
}

TEST_CASE("tau_at accumulates up to the point and saturates past the support") {
    const auto g = centered_gaussian(1.0, 0.5);
    const double e0 = 1.2;
    const double full = 0.5 * e0 * e0 * xray_transform(g, Direction::e1(), {-6, 0, 0});
    CHECK(tau_at(g, e0, Direction::e1(), {6.0, 0, 0}) == doctest::Approx(full).epsilon(1e-9));
    CHECK(tau_at(g, e0, Direction::e1(), {-4.5, 0, 0}) == 0.0);
    const double halfway = tau_at(g, e0, Direction::e1(), {0.0, 0, 0});
    CHECK(halfway == doctest::Approx(0.5 * full).epsilon(1e-8));
}
