#include "kerr/kerrcell.hpp"

#include <algorithm>
#include <cmath>

#include "kerr/errors.hpp"
#include "kerr/quadrature.hpp"

namespace kerr {

double transmission_envelope(double a2, double a3, double tau) {
    if (a2 == 0.0 && a3 == 0.0)
        throw std::invalid_argument("transmission_envelope: (a2, a3) = (0, 0)");
    const double s = std::sin(tau);
    return (a2 * a2 * a3 * a3) / (a2 * a2 + a3 * a3) * s * s;
}

TauScanResult optimal_tau_scan(const CellSpec& cell, const std::vector<double>& tau_grid) {
    if (tau_grid.size() < 3) throw std::invalid_argument("optimal_tau_scan: grid too small");
    const double step = tau_grid[1] - tau_grid[0];
    if (tau_grid.back() - tau_grid.front() < M_PI - step - 1e-12)
        throw std::invalid_argument("optimal_tau_scan: grid must cover [0, pi]");

    TauScanResult res;
    if (cell.a2 == 0.0 || cell.a3 == 0.0) {
        res.degenerate = true;
        return res;
    }
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double v = transmission_envelope(cell.a2, cell.a3, tau_grid[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    res.tau_at_max = tau_grid[best];
    res.envelope_at_max = best_val;
    if (best > 0 && best + 1 < tau_grid.size()) {
        const double fm = transmission_envelope(cell.a2, cell.a3, tau_grid[best - 1]);
        const double fp = transmission_envelope(cell.a2, cell.a3, tau_grid[best + 1]);
        const double denom = fp - 2.0 * best_val + fm;
        if (denom < 0) {
            const double step = tau_grid[best + 1] - tau_grid[best];
            res.tau_at_max += 0.5 * step * (fm - fp) / denom;
            res.envelope_at_max = transmission_envelope(cell.a2, cell.a3, res.tau_at_max);
        }
    }
    return res;
}

double chi_from_first_max(double e0_at_first_max, double d) {
    if (!(e0_at_first_max > 0) || !(d > 0))
        throw std::invalid_argument("chi_from_first_max: need e0 > 0 and d > 0");
    return M_PI / (e0_at_first_max * e0_at_first_max * d);
}

namespace {

struct Lockin {
    double ic = 0.0, is = 0.0;
};

/** Trapezoid of y(t) against cos/sin((R - t)/h) psi(t). */
Lockin lockin(const DetectorTrace& trace, const std::vector<double>& y,
              const WindowFunction& psi) {
    std::vector<double> fc(y.size()), fs(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = trace.sample_time(i);
        const double theta = (trace.position - t) / trace.h;
        const double w = psi(t);
        fc[i] = y[i] * std::cos(theta) * w;
        fs[i] = y[i] * std::sin(theta) * w;
    }
    return {trapezoid(fc, trace.dt), trapezoid(fs, trace.dt)};
}

} // namespace

CellSimResult simulate_cell(const CellSpec& cell, double h, ExperimentOptions opts) {
    if (cell.d <= 0) throw std::invalid_argument("simulate_cell: polarizer separation d <= 0");
    const double ramp = 10.0 * h;
    const double cell_lo = 8.0, cell_hi = 8.0 + cell.d;
    if (cell_hi + 1.0 > opts.detector_x)
        throw std::invalid_argument("simulate_cell: cell does not fit before the detector");

    const Chi1D chi = Chi1D::plateau(cell.chi, cell_lo, cell_hi, ramp);
    const BeamSpec beam = make_beam(cell.a2, cell.a3, 0.5, 1.0, h, 3.0, 0.6, 1.5);

    CellSimResult res;
    res.tau_predicted = 0.5 * cell.e0 * cell.e0 * chi.integral();
    res.envelope_analytic = transmission_envelope(cell.a2, cell.a3, res.tau_predicted);

    const double T = opts.detector_x + beam.longitudinal.outer() - beam.launch + 0.5;
    ExperimentResult run = run_experiment(beam, chi, cell.e0, h, T, opts);
    res.trace = std::move(run.trace);
    const DetectorTrace& tr = res.trace;

    // window over the packet transit at the detector
    const double t_mid = tr.position - beam.launch;
    const double half = beam.longitudinal.outer() + 0.3;
    const WindowFunction psi{t_mid - half, t_mid + half};

    const std::size_t n = tr.e2.size();
    std::vector<double> y2(n), y3(n), proj(n), env(n);
    const double inv_na = 1.0 / std::hypot(cell.a2, cell.a3);
    for (std::size_t i = 0; i < n; ++i) {
        y2[i] = tr.e2[i];
        y3[i] = tr.e3[i] - tr.background;
        proj[i] = (-cell.a3 * y2[i] + cell.a2 * y3[i]) * inv_na;
        const double t = tr.sample_time(i);
        env[i] = tr.amp_scale * beam.longitudinal(tr.position - t - beam.launch) * psi(t);
    }
    const double M = 0.5 * trapezoid(env, tr.dt);
    if (std::abs(M) < 1e-10) throw Error("simulate_cell: extraction window misses the packet");

    const Lockin l2 = lockin(tr, y2, psi);
    const Lockin l3 = lockin(tr, y3, psi);
    const Lockin lp = lockin(tr, proj, psi);

    // amplitudes in the Re(A e^{-i theta}) pairing of the transport frame,
    // so arg(amp2) tracks -tau and arg(amp3) tracks -3 tau
    res.amp2 = Complex(l2.ic, l2.is) / M;
    res.amp3 = Complex(l3.ic, l3.is) / M;
    res.envelope_measured = (lp.ic * lp.ic + lp.is * lp.is) / (4.0 * M * M);
    res.ellipse = polarization_ellipse(res.amp2, res.amp3);
    return res;
}

} // namespace kerr
