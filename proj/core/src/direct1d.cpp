#include "kerr/direct1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kerr/errors.hpp"
#include "kerr/quadrature.hpp"
#include "kerr/smooth.hpp"

namespace kerr {

// ---------------------------------------------------------------------------
// chi profiles

double Chi1D::integral() const {
    if (support_hi <= support_lo) return 0.0;
    return integrate([&](double x) { return (*this)(x); }, support_lo, support_hi, 1e-12);
}

Chi1D Chi1D::zero() {
    Chi1D c;
    c.value = [](double) { return 0.0; };
    c.description = "zero";
    return c;
}

Chi1D Chi1D::gaussian(double amplitude, double center, double sigma, double radius) {
    if (!(sigma > 0) || !(radius > 0)) throw std::invalid_argument("Chi1D::gaussian: bad shape");
    PlateauWindow cutoff(0.9 * radius, radius);
    Chi1D c;
    c.value = [=](double x) {
        const double d = x - center;
        return amplitude * std::exp(-d * d / (2 * sigma * sigma)) * cutoff(d);
    };
    c.support_lo = center - radius;
    c.support_hi = center + radius;
    std::ostringstream os;
    os << "gaussian a=" << amplitude << " c=" << center << " s=" << sigma << " R=" << radius;
    c.description = os.str();
    return c;
}

Chi1D Chi1D::plateau(double level, double lo, double hi, double ramp) {
    if (!(hi > lo) || !(ramp > 0) || ramp * 2 > hi - lo)
        throw std::invalid_argument("Chi1D::plateau: bad shape");
    const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    PlateauWindow win(half - ramp, half);
    Chi1D c;
    c.value = [=](double x) { return level * win(x - center); };
    c.support_lo = lo;
    c.support_hi = hi;
    std::ostringstream os;
    os << "plateau level=" << level << " [" << lo << ", " << hi << "] ramp=" << ramp;
    c.description = os.str();
    return c;
}

// ---------------------------------------------------------------------------
// solver

Wave1DSolver::Wave1DSolver(Grid1D grid, std::vector<double> chi_eff, std::vector<double> e2_init,
                           std::vector<double> e3_init, double dt, Boundary1D boundary,
                           int sponge_cells)
    : grid_(grid), chi_(std::move(chi_eff)), e2_(std::move(e2_init)), e3_(std::move(e3_init)),
      dt_(dt), boundary_(boundary) {
    const std::size_t n = grid_.n;
    if (chi_.size() != n || e2_.size() != n || e3_.size() != n)
        throw std::invalid_argument("Wave1DSolver: field sizes must match the grid");
    if (dt_ > grid_.dx * (1.0 + 1e-12))
        throw CflError("Wave1DSolver: dt > dx violates the stability limit of the "
                       "displacement-form scheme");
    // focusing media slow the wave down, so the unit Courant number is the
    // exact limit; defocusing media speed it up and need the safety margin
    for (double c : chi_)
        if (c < 0.0 && dt_ > 0.9 * grid_.dx) {
            throw CflError("Wave1DSolver: defocusing chi requires dt <= 0.9 dx");
        }

    d2_.resize(n);
    d3_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = e2_[j] * e2_[j] + e3_[j] * e3_[j];
        d2_[j] = e2_[j] * (1.0 + chi_[j] * rho);
        d3_[j] = e3_[j] * (1.0 + chi_[j] * rho);
    }
    d2_prev_ = d2_;
    d3_prev_ = d3_;

    sigma_.assign(n, 0.0);
    if (boundary_ == Boundary1D::Sponge && sponge_cells > 0) {
        const double width = double(sponge_cells) * grid_.dx;
        const double smax = 6.0 / width;
        for (int c = 0; c < sponge_cells && std::size_t(c) < n; ++c) {
            const double xi = double(sponge_cells - c) / double(sponge_cells);
            sigma_[std::size_t(c)] = smax * xi * xi;
            sigma_[n - 1 - std::size_t(c)] = smax * xi * xi;
        }
    }
}

std::array<double, 2> Wave1DSolver::invert_constitutive(const std::array<double, 2>& d,
                                                        double chi,
                                                        const std::array<double, 2>& guess) {
    if (chi == 0.0) return d;
    double e2 = guess[0], e3 = guess[1];
    const double dn = std::max({1.0, std::abs(d[0]), std::abs(d[1])});
    double prev_res = std::numeric_limits<double>::infinity();
    int grow = 0;
    for (int it = 0; it < 8; ++it) {
        const double rho = e2 * e2 + e3 * e3;
        const double f = 1.0 + chi * rho;
        const double r2 = e2 * f - d[0];
        const double r3 = e3 * f - d[1];
        const double res = std::max(std::abs(r2), std::abs(r3));
        if (res <= 1e-13 * dn) return {e2, e3};
        if (res > prev_res && ++grow >= 3)
            throw NewtonDivergenceError("invert_constitutive: Newton residual growing; "
                                        "reduce the amplitude or h");
        prev_res = res;
        // J = f I + 2 chi e (x) e
        const double j11 = f + 2 * chi * e2 * e2;
        const double j12 = 2 * chi * e2 * e3;
        const double j22 = f + 2 * chi * e3 * e3;
        const double det = j11 * j22 - j12 * j12;
        e2 -= (j22 * r2 - j12 * r3) / det;
        e3 -= (j11 * r3 - j12 * r2) / det;
    }
    const double rho = e2 * e2 + e3 * e3;
    const double f = 1.0 + chi * rho;
    if (std::max(std::abs(e2 * f - d[0]), std::abs(e3 * f - d[1])) > 1e-12 * dn)
        throw NewtonDivergenceError("invert_constitutive: no convergence in 8 iterations");
    return {e2, e3};
}

void Wave1DSolver::apply_constitutive(std::size_t j) {
    if (chi_[j] == 0.0) {
        e2_[j] = d2_[j];
        e3_[j] = d3_[j];
        return;
    }
    const auto e = invert_constitutive({d2_[j], d3_[j]}, chi_[j], {e2_[j], e3_[j]});
    e2_[j] = e[0];
    e3_[j] = e[1];
}

void Wave1DSolver::step() {
    const std::size_t n = grid_.n;
    const double r2 = (dt_ * dt_) / (grid_.dx * grid_.dx);
    const bool periodic = boundary_ == Boundary1D::Periodic;

    std::vector<double> nd2(n), nd3(n);
    auto lap = [&](const std::vector<double>& e, std::size_t j) {
        const std::size_t jm = j == 0 ? (periodic ? n - 2 : 0) : j - 1;
        const std::size_t jp = j == n - 1 ? (periodic ? 1 : n - 1) : j + 1;
        return e[jp] - 2.0 * e[j] + e[jm];
    };

    if (first_) {
        // symmetric start for dt E(0) = 0: D(dt) = D(0) + dt^2/2 dxx E(0)
        for (std::size_t j = 0; j < n; ++j) {
            nd2[j] = d2_[j] + 0.5 * r2 * lap(e2_, j);
            nd3[j] = d3_[j] + 0.5 * r2 * lap(e3_, j);
        }
        first_ = false;
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            const double sdt = 0.5 * sigma_[j] * dt_;
            nd2[j] = (2.0 * d2_[j] - (1.0 - sdt) * d2_prev_[j] + r2 * lap(e2_, j)) / (1.0 + sdt);
            nd3[j] = (2.0 * d3_[j] - (1.0 - sdt) * d3_prev_[j] + r2 * lap(e3_, j)) / (1.0 + sdt);
        }
    }
    if (!periodic) {
        // faces pinned to their initial (stationary background) values
        nd2[0] = d2_[0];
        nd2[n - 1] = d2_[n - 1];
        nd3[0] = d3_[0];
        nd3[n - 1] = d3_[n - 1];
    }

    d2_prev_.swap(d2_);
    d3_prev_.swap(d3_);
    d2_ = std::move(nd2);
    d3_ = std::move(nd3);
    for (std::size_t j = 0; j < n; ++j) apply_constitutive(j);

    t_ += dt_;
    ++n_;
    if ((n_ & 255) == 0) {
        if (!std::isfinite(e2_[n / 2]) || !std::isfinite(e3_[n / 2]))
            throw Error("Wave1DSolver: NaN detected at t = " + std::to_string(t_));
    }
}

double Wave1DSolver::constitutive_residual() const {
    double m = 0.0;
    for (std::size_t j = 0; j < grid_.n; ++j) {
        const double rho = e2_[j] * e2_[j] + e3_[j] * e3_[j];
        const double f = 1.0 + chi_[j] * rho;
        m = std::max({m, std::abs(e2_[j] * f - d2_[j]), std::abs(e3_[j] * f - d3_[j])});
    }
    return m;
}

// ---------------------------------------------------------------------------
// experiment driver

ExperimentResult run_experiment(const BeamSpec& beam, const Chi1D& chi, double e0, double h,
                                double T, const ExperimentOptions& opts) {
    const double dx = opts.dx_over_h * h;
    const std::size_t n = std::size_t(std::llround(opts.length / dx)) + 1;
    Grid1D grid(0.0, dx, n);
    const double dt = opts.cfl * dx;

    // beam must start outside the medium, detector past it
    if (chi.support_hi > chi.support_lo) {
        if (beam.support_max_x1() > chi.support_lo || beam.support_min_x1() < 0)
            throw std::invalid_argument("run_experiment: beam support must sit before supp(chi)");
        if (opts.detector_x < chi.support_hi)
            throw std::invalid_argument("run_experiment: detector must sit past supp(chi)");
    }

    // solver-level fields: bias e0 in e3, weak beam, chi_eff = h * chi
    std::vector<double> chi_eff(n), e2(n), e3(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.node(j);
        chi_eff[j] = h * chi(x);
        const Vec3 u = beam.u_init({x, 0, 0});
        const double carrier = 2.0 * h * std::cos(x / h);
        e2[j] = u.y * carrier;
        e3[j] = e0 + u.z * carrier;
    }

    Wave1DSolver solver(grid, std::move(chi_eff), std::move(e2), std::move(e3), dt,
                        opts.boundary, opts.sponge_cells);

    const std::size_t jd = std::size_t(std::llround((opts.detector_x - grid.origin) / dx));
    if (jd >= n) throw std::invalid_argument("run_experiment: detector outside the domain");

    ExperimentResult res;
    res.grid = grid;
    res.trace.position = grid.node(jd);
    res.trace.t0 = 0.0;
    res.trace.dt = dt * double(opts.record_stride);
    res.trace.h = h;
    res.trace.e0 = e0;
    res.trace.background = e0;
    res.trace.amp_scale = h;
    res.trace.beam_a2 = beam.a2;
    res.trace.beam_a3 = beam.a3;
    res.trace.beam_launch = beam.launch;
    res.trace.beam_window_inner = beam.longitudinal.inner();
    res.trace.beam_window_outer = beam.longitudinal.outer();
    res.trace.grid_dx = dx;
    res.trace.grid_length = grid.length();
    res.trace.chi_description = chi.description;
    if (res.trace.dt > 2.0 * M_PI * h / 20.0)
        throw std::invalid_argument("run_experiment: record stride undersamples the carrier "
                                    "(need >= 20 samples per period)");

    const std::size_t steps = std::size_t(std::llround(T / dt));
    res.trace.e2.reserve(steps / opts.record_stride + 2);
    res.trace.e3.reserve(steps / opts.record_stride + 2);

    auto record = [&](std::size_t k) {
        if (k % opts.record_stride != 0) return;
        res.trace.e2.push_back(solver.e2()[jd]);
        res.trace.e3.push_back(solver.e3()[jd]);
        if (opts.record_history) {
            res.history_times.push_back(solver.t());
            res.history_e2.push_back(solver.e2());
            res.history_e3.push_back(solver.e3());
        }
    };

    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        solver.step();
        record(k);
    }
    res.e2 = solver.e2();
    res.e3 = solver.e3();
    res.steps = steps;
    return res;
}

// ---------------------------------------------------------------------------
// phase measurement

namespace {

double phase_objective(const DetectorTrace& trace, const BeamSpec& beam, int component,
                       std::size_t i_lo, std::size_t i_hi, double delta) {
    const double xd = trace.position;
    const double a = component == 2 ? trace.beam_a2 : trace.beam_a3;
    double J = 0.0;
    for (std::size_t i = i_lo; i < i_hi; ++i) {
        const double t = trace.sample_time(i);
        const double y = component == 2 ? trace.e2[i] : trace.e3[i] - trace.background;
        const double env = trace.amp_scale * a * beam.longitudinal(xd - t - beam.launch);
        const double model = env * std::cos((xd - t) / trace.h + delta);
        J += (y - model) * (y - model);
    }
    return J;
}

} // namespace

double measure_phase_shift(const DetectorTrace& trace, const BeamSpec& beam, int component,
                           double t_lo, double t_hi) {
    if (component != 2 && component != 3)
        throw std::invalid_argument("measure_phase_shift: component must be 2 or 3");
    if (trace.e2.size() < 8) throw std::invalid_argument("measure_phase_shift: trace too short");
    const std::size_t i_lo =
        std::size_t(std::clamp((t_lo - trace.t0) / trace.dt, 0.0, double(trace.e2.size() - 1)));
    const std::size_t i_hi =
        std::size_t(std::clamp((t_hi - trace.t0) / trace.dt, 0.0, double(trace.e2.size())));
    if (i_hi <= i_lo + 8)
        throw std::invalid_argument("measure_phase_shift: window too short");

    auto J = [&](double d) { return phase_objective(trace, beam, component, i_lo, i_hi, d); };

    // coarse scan over the full circle
    const int nscan = 128;
    double best = 0.0, best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nscan; ++i) {
        const double d = -M_PI + 2.0 * M_PI * double(i) / nscan;
        const double v = J(d);
        if (v < best_val) {
            best_val = v;
            best = d;
        }
    }
    // golden section inside the bracketing scan cells
    double a = best - 2.0 * M_PI / nscan, b = best + 2.0 * M_PI / nscan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = J(x1), f2 = J(x2);
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = J(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = J(x2);
        }
    }
    double d0 = 0.5 * (a + b);
    // quadratic refinement
    const double eps = 1e-5;
    const double jm = J(d0 - eps), j0 = J(d0), jp = J(d0 + eps);
    const double denom = jp - 2.0 * j0 + jm;
    if (denom > 0) {
        const double shift = 0.5 * eps * (jm - jp) / denom;
        if (std::abs(shift) < 2 * eps) d0 += shift;
    }
    return d0;
}

// ---------------------------------------------------------------------------
// magnetic field and energy bookkeeping

std::vector<std::vector<Vec3>> reconstruct_H(const Grid1D& grid,
                                             const std::vector<std::vector<double>>& e2_levels,
                                             const std::vector<std::vector<double>>& e3_levels,
                                             double dt, const std::vector<Vec3>& H0) {
    if (e2_levels.size() != e3_levels.size() || e2_levels.empty())
        throw std::invalid_argument("reconstruct_H: mismatched histories");
    const std::size_t n = grid.n;
    if (H0.size() != n) throw std::invalid_argument("reconstruct_H: H0 size mismatch");

    auto curl = [&](const std::vector<double>& e2, const std::vector<double>& e3,
                    std::size_t j) -> Vec3 {
        const std::size_t jm = j == 0 ? 0 : j - 1;
        const std::size_t jp = j == n - 1 ? n - 1 : j + 1;
        const double scale = (jp == jm) ? 1.0 : 1.0 / (double(jp - jm) * grid.dx);
        const double d1e2 = (e2[jp] - e2[jm]) * scale;
        const double d1e3 = (e3[jp] - e3[jm]) * scale;
        return {0.0, -d1e3, d1e2};
    };

    std::vector<std::vector<Vec3>> H(e2_levels.size(), std::vector<Vec3>(n));
    H[0] = H0;
    for (std::size_t lev = 1; lev < e2_levels.size(); ++lev) {
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 c_prev = curl(e2_levels[lev - 1], e3_levels[lev - 1], j);
            const Vec3 c_curr = curl(e2_levels[lev], e3_levels[lev], j);
            H[lev][j] = H[lev - 1][j] - 0.5 * dt * (c_prev + c_curr);
        }
    }
    return H;
}

double leapfrog_energy(const std::vector<double>& u_prev, const std::vector<double>& u_curr,
                       double dx, double dt, bool periodic) {
    const std::size_t n = u_prev.size();
    double kinetic = 0.0, elastic = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = (u_curr[j] - u_prev[j]) / dt;
        kinetic += v * v;
    }
    const std::size_t last = periodic ? n - 1 : n - 1;
    for (std::size_t j = 0; j + 1 <= last; ++j) {
        const std::size_t jp = j + 1 == n ? 0 : j + 1;
        elastic += (u_curr[jp] - u_curr[j]) * (u_prev[jp] - u_prev[j]) / (dx * dx);
    }
    return 0.5 * dx * (kinetic + elastic);
}

} // namespace kerr
