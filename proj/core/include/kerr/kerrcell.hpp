#ifndef KERR_KERRCELL_HPP
#define KERR_KERRCELL_HPP

#include <vector>

#include "kerr/direct1d.hpp"
#include "kerr/inversion.hpp"
#include "kerr/profiles.hpp"

namespace kerr {

/** Kerr cell between crossed polarizers: constant susceptibility chi over
 *  a length-d cell, bias field e0, beam core amplitudes (a2, a3). */
struct CellSpec {
    double a2 = 1.0, a3 = 1.0;
    double d = 4.0;      // polarizer separation
    double e0 = 1.0;     // bias magnitude
    double chi = 1.0;    // susceptibility level inside the cell
};

/** Oscillation-envelope factor of the transmitted energy density behind
 *  the crossed polarizer: (a2^2 a3^2 / (a2^2 + a3^2)) sin^2(tau). The
 *  sin^2(phi/h + 2 tau) carrier is reported separately by the simulation. */
double transmission_envelope(double a2, double a3, double tau);

struct TauScanResult {
    double tau_at_max = 0.0;
    double envelope_at_max = 0.0;
    bool degenerate = false;   // envelope identically zero (a2 or a3 = 0)
};

/** Argmax of the envelope over the tau grid, with local quadratic
 *  refinement. The grid must cover at least [0, pi]. */
TauScanResult optimal_tau_scan(const CellSpec& cell, const std::vector<double>& tau_grid);

/** chi = pi / (e0^2 d) from the bias magnitude at the first transmission
 *  maximum: (1/2) e0^2 chi d = pi/2. */
double chi_from_first_max(double e0_at_first_max, double d);

struct CellSimResult {
    DetectorTrace trace;
    double tau_predicted = 0.0;       // (1/2) e0^2 * integral of the actual plateau
    double envelope_measured = 0.0;   // windowed extraction of the projected trace
    double envelope_analytic = 0.0;   // transmission_envelope at tau_predicted
    Complex amp2{}, amp3{};           // measured complex amplitudes
    Ellipse ellipse;                  // polarization ellipse of (amp2, amp3)
};

/**
 * Direct simulation of the cell: smooth plateau profile (ramp width 10 h)
 * through the 1D solver, projection of the detector trace onto
 * (0, -a3, a2)/sqrt(a2^2 + a3^2), envelope extraction via the windowed
 * oscillatory integrals. tau_predicted uses the actual plateau profile,
 * not d * chi.
 */
CellSimResult simulate_cell(const CellSpec& cell, double h, ExperimentOptions opts = {});

} // namespace kerr

#endif
