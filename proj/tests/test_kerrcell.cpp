#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kerr/kerrcell.hpp"

using namespace kerr;

TEST_CASE("transmission envelope values") {
    CHECK(transmission_envelope(1.0, 1.0, 0.0) == doctest::Approx(0.0));
    CHECK(transmission_envelope(1.0, 1.0, M_PI / 2) == doctest::Approx(0.5));
    CHECK(transmission_envelope(2.0, 0.5, 0.7) ==
          doctest::Approx(4.0 * 0.25 / 4.25 * std::sin(0.7) * std::sin(0.7)));
    CHECK_THROWS_AS(transmission_envelope(0, 0, 1.0), std::invalid_argument);
}

TEST_CASE("envelope symmetries and period") {
    for (double tau : {0.2, 0.9, 2.0}) {
        CHECK(transmission_envelope(0.8, 1.5, tau) ==
              doctest::Approx(transmission_envelope(1.5, 0.8, tau)).epsilon(1e-14));
        CHECK(transmission_envelope(0.8, 1.5, tau) ==
              doctest::Approx(transmission_envelope(0.8, 1.5, M_PI - tau)).epsilon(1e-12));
        CHECK(transmission_envelope(0.8, 1.5, tau) ==
              doctest::Approx(transmission_envelope(0.8, 1.5, tau + M_PI)).epsilon(1e-12));
    }
}

TEST_CASE("fixed beam norm: the best split is the diagonal one") {
    // |(a2, a3)| fixed, tau not a multiple of pi: maximum at a2 = a3
    const double tau = 0.7, r = 1.3;
    double best = -1, best_angle = 0;
    for (int k = 1; k < 90; ++k) {
        const double ang = M_PI / 2 * k / 90.0;
        const double v = transmission_envelope(r * std::cos(ang), r * std::sin(ang), tau);
        if (v > best) {
            best = v;
            best_angle = ang;
        }
    }
    CHECK(best_angle == doctest::Approx(M_PI / 4).epsilon(0.02));
}

TEST_CASE("tau scan finds pi/2") {
    CellSpec cell;
    std::vector<double> grid;
    for (double t = 0; t <= M_PI + 1e-12; t += 1e-3) grid.push_back(t);

    const TauScanResult r = optimal_tau_scan(cell, grid);
    CHECK_FALSE(r.degenerate);
    CHECK(std::abs(r.tau_at_max - M_PI / 2) <= 1e-3);

    CellSpec degenerate = cell;
    degenerate.a2 = 0.0;
    CHECK(optimal_tau_scan(degenerate, grid).degenerate);

    // doubling both amplitudes scales the envelope by 4, argmax unchanged
    CellSpec doubled = cell;
    doubled.a2 *= 2;
    doubled.a3 *= 2;
    const TauScanResult r2 = optimal_tau_scan(doubled, grid);
    CHECK(r2.tau_at_max == doctest::Approx(r.tau_at_max).epsilon(1e-9));
    CHECK(r2.envelope_at_max == doctest::Approx(4.0 * r.envelope_at_max).epsilon(1e-9));

    CHECK_THROWS_AS(optimal_tau_scan(cell, std::vector<double>{0.0, 0.1, 0.2}),
                    std::invalid_argument);
}

TEST_CASE("chi from the first transmission maximum") {
    CHECK(chi_from_first_max(1.0, M_PI) == doctest::Approx(1.0));
    CHECK(chi_from_first_max(2.0, M_PI) == doctest::Approx(0.25));
    CHECK_THROWS_AS(chi_from_first_max(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(chi_from_first_max(1.0, 0.0), std::invalid_argument);

    // round trip: given chi, the bias at the first maximum returns chi
    const double chi = 0.37, d = 4.0;
    const double e0_star = std::sqrt(M_PI / (chi * d));
    CHECK(chi_from_first_max(e0_star, d) == doctest::Approx(chi).epsilon(1e-12));
}

TEST_CASE("simulated cell against the analytic envelope") {
    const double h = 1.0 / 40;
    CellSpec cell;
    cell.a2 = 1.0;
    cell.a3 = 1.0;
    cell.d = 4.0;
    cell.chi = 0.5;
    cell.e0 = 0.9;

    const CellSimResult sim = simulate_cell(cell, h);
    CHECK(sim.tau_predicted > 0.5);
    CHECK(sim.envelope_measured ==
          doctest::Approx(sim.envelope_analytic).epsilon(0.15));

    // measured complex amplitudes carry phases -tau and -3 tau
    CHECK(std::abs(sim.amp2) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::abs(sim.amp3) == doctest::Approx(1.0).epsilon(0.1));
    const double two_tau =
        std::remainder(std::arg(sim.amp2) - std::arg(sim.amp3), 2 * M_PI);
    CHECK(two_tau == doctest::Approx(2 * sim.tau_predicted).epsilon(0.1));

    // ellipse half axes sqrt(2)|cos tau|, sqrt(2)|sin tau|
    const double c = std::sqrt(2.0) * std::abs(std::cos(sim.tau_predicted));
    const double s = std::sqrt(2.0) * std::abs(std::sin(sim.tau_predicted));
    CHECK(sim.ellipse.half_major == doctest::Approx(std::max(c, s)).epsilon(0.1));
    CHECK(sim.ellipse.half_minor == doctest::Approx(std::min(c, s)).epsilon(0.1));
}

TEST_CASE("no susceptibility: crossed polarizers stay dark") {
    const double h = 1.0 / 40;
    CellSpec cell;
    cell.chi = 0.0;
    const CellSimResult sim = simulate_cell(cell, h);
    CHECK(sim.tau_predicted == 0.0);
    CHECK(sim.envelope_measured <= 2.0 * 5.0 * h * 1e-2);   // far below any transmission level
}
