#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kerr/direct1d.hpp"
#include "kerr/errors.hpp"

using namespace kerr;

namespace {

// bisection oracle for the scalar cubic e + chi e^3 = d
double bisect_cubic(double chi, double d) {
    double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid + chi * mid * mid * mid - d;
        (f < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("chi profiles") {
    const Chi1D g = Chi1D::gaussian(1.0, 10.0, 0.4, 1.9);
    CHECK(g(10.0) == doctest::Approx(1.0));
    CHECK(g(7.0) == 0.0);
    CHECK(g(12.0) == 0.0);
    CHECK(g.integral() ==
          doctest::Approx(0.4 * std::sqrt(2 * M_PI)).epsilon(1e-4));   // cutoff trims the tails

    const Chi1D p = Chi1D::plateau(0.5, 8.0, 12.0, 0.2);
    CHECK(p(10.0) == doctest::Approx(0.5));
    CHECK(p(8.0) == 0.0);
    CHECK(p.integral() == doctest::Approx(0.5 * (4.0 - 0.2)).epsilon(1e-2));
    CHECK_THROWS_AS(Chi1D::plateau(1.0, 8.0, 8.1, 0.2), std::invalid_argument);
}

TEST_CASE("constitutive inversion") {
    SUBCASE("linear medium passes through") {
        const auto e = Wave1DSolver::invert_constitutive({0.3, -0.8}, 0.0, {0, 0});
        CHECK(e[0] == 0.3);
        CHECK(e[1] == -0.8);
    }
    SUBCASE("scalar cubic against the bisection oracle") {
        const double want = bisect_cubic(0.1, 1.0);
        CHECK(want == doctest::Approx(0.92170).epsilon(1e-5));
        const auto e = Wave1DSolver::invert_constitutive({0.0, 1.0}, 0.1, {0.0, 1.0});
        CHECK(e[0] == doctest::Approx(0.0));
        CHECK(e[1] == doctest::Approx(want).epsilon(1e-12));
        // residual at the returned point
        const double rho = e[0] * e[0] + e[1] * e[1];
        CHECK(std::abs(e[1] * (1 + 0.1 * rho) - 1.0) <= 1e-13);
    }
    SUBCASE("odd symmetry: negating D negates E") {
        const auto ep = Wave1DSolver::invert_constitutive({0.4, 0.9}, 0.2, {0.4, 0.9});
        const auto em = Wave1DSolver::invert_constitutive({-0.4, -0.9}, 0.2, {-0.4, -0.9});
        CHECK(ep[0] == doctest::Approx(-em[0]).epsilon(1e-14));
        CHECK(ep[1] == doctest::Approx(-em[1]).epsilon(1e-14));
    }
    SUBCASE("unsolvable defocusing cubic raises") {
        CHECK_THROWS_AS(Wave1DSolver::invert_constitutive({0.0, 0.8}, -1.0, {0.0, 0.8}),
                        NewtonDivergenceError);
    }
}

TEST_CASE("constant background is an exact fixed point of the scheme") {
    const double h = 1.0 / 25.0, dx = h / 10.0;
    const std::size_t n = 2001;
    Grid1D grid(0.0, dx, n);
    std::vector<double> chi(n, 0.0), e2(n, 0.0), e3(n, 1.3);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.node(j);
        if (x > 3 && x < 5) chi[j] = h * std::exp(-(x - 4) * (x - 4));
    }
    Wave1DSolver solver(grid, chi, e2, e3, dx);
    for (int k = 0; k < 200; ++k) solver.step();
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(solver.e2()[j] == 0.0);
        CHECK(solver.e3()[j] == doctest::Approx(1.3).epsilon(1e-15));
    }
    CHECK(solver.constitutive_residual() <= 1e-12);
}

TEST_CASE("free propagation is the exact two-wave translation at dt = dx") {
    const double h = 1.0 / 25.0;
    ExperimentOptions opts;
    opts.length = 20.0;
    opts.dx_over_h = 0.1;
    opts.detector_x = 16.0;
    const BeamSpec beam = make_beam(1.0, 0.4, 0.5, 1.0, h, 3.0, 0.6, 1.5);
    const ExperimentResult res = run_experiment(beam, Chi1D::zero(), 0.0, h, 5.0, opts);

    // compare on x in [5.5, 19]: only the right-mover lives there and sponge
    // influence cannot have arrived
    const double t = 5.0;
    double num = 0, den = 0;
    for (std::size_t j = 0; j < res.grid.n; ++j) {
        const double x = res.grid.node(j);
        if (x < 5.5 || x > 19.0) continue;
        const Vec3 up = beam.u_init({x - t, 0, 0});
        const Vec3 um = beam.u_init({x + t, 0, 0});
        const double want2 = h * (up.y * std::cos((x - t) / h) + um.y * std::cos((x + t) / h));
        const double want3 = h * (up.z * std::cos((x - t) / h) + um.z * std::cos((x + t) / h));
        num += (res.e2[j] - want2) * (res.e2[j] - want2) + (res.e3[j] - want3) * (res.e3[j] - want3);
        den += want2 * want2 + want3 * want3;
    }
    REQUIRE(den > 0);
    CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("linear energy is conserved over ten thousand periodic steps") {
    const double dx = 0.01, L = 2.0;
    const std::size_t n = std::size_t(L / dx) + 1;
    Grid1D grid(0.0, dx, n);
    std::vector<double> chi(n, 0.0), e2(n), e3(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.node(j);
        e2[j] = std::sin(2 * M_PI * x / L) + 0.3 * std::sin(6 * M_PI * x / L);
    }
    Wave1DSolver solver(grid, chi, e2, e3, dx, Boundary1D::Periodic, 0);

    std::vector<double> prev = solver.e2();
    solver.step();
    const double ref = leapfrog_energy(prev, solver.e2(), dx, dx, true);
    double max_drift = 0;
    for (int k = 1; k < 10000; ++k) {
        prev = solver.e2();
        solver.step();
        const double en = leapfrog_energy(prev, solver.e2(), dx, dx, true);
        max_drift = std::max(max_drift, std::abs(en - ref) / ref);
    }
    CHECK(max_drift <= 1e-8);
}

TEST_CASE("phase shifts approach tau and 3 tau") {
    const double h = 1.0 / 40.0;
    const Chi1D chi = Chi1D::gaussian(1.0, 10.0, 0.4, 1.9);
    const double e0 = 1.25;
    const double tau = 0.5 * e0 * e0 * chi.integral();

    ExperimentOptions opts;
    const BeamSpec beam = make_beam(1.0, 1.0, 0.5, 1.0, h, 3.0, 0.6, 1.5);
    const ExperimentResult res = run_experiment(beam, chi, e0, h, 15.0, opts);
    CHECK(res.trace.e2.size() > 100);

    const double t_lo = opts.detector_x - beam.support_max_x1();
    const double t_hi = opts.detector_x - beam.support_min_x1();
    const double d2 = measure_phase_shift(res.trace, beam, 2, t_lo, t_hi);
    const double d3 = measure_phase_shift(res.trace, beam, 3, t_lo, t_hi);
    CHECK(std::abs(d2 - tau) <= 0.15);
    CHECK(std::abs(d3 - 3 * tau) <= 0.3);
}

TEST_CASE("axis relabeling swaps the two transverse components bit for bit") {
    const double h = 1.0 / 25.0, dx = h / 10.0;
    const std::size_t n = 2001;
    Grid1D grid(0.0, dx, n);
    std::vector<double> chi(n, 0.0), a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.node(j);
        if (x > 8 && x < 12) chi[j] = h * std::exp(-2 * (x - 10) * (x - 10));
        const double w = std::exp(-(x - 3) * (x - 3));
        a[j] = 2 * h * 0.8 * w * std::cos(x / h);
        b[j] = 1.1 + 2 * h * 0.5 * w * std::cos(x / h);   // bias rides in this slot
    }
    Wave1DSolver fwd(grid, chi, a, b, dx);
    Wave1DSolver swp(grid, chi, b, a, dx);
    for (int k = 0; k < 400; ++k) {
        fwd.step();
        swp.step();
    }
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(fwd.e2()[j] == swp.e3()[j]);
        CHECK(fwd.e3()[j] == swp.e2()[j]);
    }
}

TEST_CASE("solver guards") {
    Grid1D grid(0.0, 0.01, 101);
    std::vector<double> z(101, 0.0);
    CHECK_THROWS_AS(Wave1DSolver(grid, z, z, z, 0.02), CflError);
    CHECK_THROWS_AS(Wave1DSolver(grid, z, z, std::vector<double>(50, 0.0), 0.01),
                    std::invalid_argument);

    const BeamSpec beam = make_beam(1, 1, 0.5, 1.0, 0.04, 3.0, 0.6, 1.5);
    ExperimentOptions opts;
    opts.detector_x = 9.0;   // inside supp chi
    CHECK_THROWS_AS(run_experiment(beam, Chi1D::gaussian(1, 10, 0.4, 1.9), 1.0, 0.04, 5.0, opts),
                    std::invalid_argument);
    ExperimentOptions late;
    late.record_stride = 64;   // undersamples the carrier
    CHECK_THROWS_AS(run_experiment(beam, Chi1D::zero(), 0.0, 0.04, 1.0, late),
                    std::invalid_argument);
}

TEST_CASE("magnetic field reconstruction") {
    SUBCASE("constant field keeps H0") {
        Grid1D grid(0.0, 0.1, 51);
        std::vector<std::vector<double>> e2(5, std::vector<double>(51, 0.7));
        std::vector<std::vector<double>> e3(5, std::vector<double>(51, -0.2));
        const std::vector<Vec3> H0(51, Vec3{0.1, 0.2, 0.3});
        const auto H = reconstruct_H(grid, e2, e3, 0.05, H0);
        for (const auto& lev : H)
            for (const auto& v : lev) {
                CHECK(v.x == doctest::Approx(0.1));
                CHECK(v.y == doctest::Approx(0.2));
                CHECK(v.z == doctest::Approx(0.3));
            }
    }
    SUBCASE("plane wave against the analytic integral") {
        // E2 = cos(x - t): curl E = (0, 0, -sin(x - t)) and
        // H3(t) = H3(0) + cos(x - t) - cos(x)
        const double dx = 0.002, dt = 0.002;
        const std::size_t n = 2001, levels = 1001;
        Grid1D grid(0.0, dx, n);
        std::vector<std::vector<double>> e2(levels, std::vector<double>(n));
        std::vector<std::vector<double>> e3(levels, std::vector<double>(n, 0.0));
        for (std::size_t l = 0; l < levels; ++l)
            for (std::size_t j = 0; j < n; ++j)
                e2[l][j] = std::cos(grid.node(j) - dt * double(l));
        const auto H = reconstruct_H(grid, e2, e3, dt, std::vector<Vec3>(n, Vec3{}));
        const double T = dt * double(levels - 1);
        double err = 0;
        for (std::size_t j = 50; j + 50 < n; ++j) {
            const double x = grid.node(j);
            const double want = std::cos(x - T) - std::cos(x);
            err = std::max(err, std::abs(H.back()[j].z - want));
        }
        CHECK(err <= 5e-6);

        // Faraday residual: dt H + curl E = 0 to quadrature order
        const std::size_t mid = levels / 2;
        double fres = 0;
        for (std::size_t j = 100; j + 100 < n; ++j) {
            const double dh = (H[mid + 1][j].z - H[mid - 1][j].z) / (2 * dt);
            const double curl3 = (e2[mid][j + 1] - e2[mid][j - 1]) / (2 * dx);
            fres = std::max(fres, std::abs(dh + curl3));
        }
        CHECK(fres <= 5e-6);
    }
}
