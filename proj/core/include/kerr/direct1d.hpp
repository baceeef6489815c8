#ifndef KERR_DIRECT1D_HPP
#define KERR_DIRECT1D_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kerr/geometry.hpp"
#include "kerr/profiles.hpp"

namespace kerr {

/** 1D susceptibility profile chi(x1) with compact support [lo, hi]. */
struct Chi1D {
    std::function<double(double)> value;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::string description;

    double operator()(double x) const { return x <= support_lo || x >= support_hi ? 0.0 : value(x); }
    double integral() const;
    static Chi1D zero();
    /** Gaussian bump times a smooth cutoff vanishing at center +- radius. */
    static Chi1D gaussian(double amplitude, double center, double sigma, double radius);
    /** Constant plateau with smooth ramps of the given width. */
    static Chi1D plateau(double level, double lo, double hi, double ramp);
};

enum class Boundary1D { Sponge, Periodic };

/** Detector samples of the transverse field components at one grid node. */
struct DetectorTrace {
    double position = 0.0;        // detector offset x1
    double t0 = 0.0;
    double dt = 0.0;              // uniform sample spacing
    std::vector<double> e2, e3;   // e3 includes the constant background
    // metadata
    double h = 0.0;
    double e0 = 0.0;              // strong-field magnitude, geometric-optics units
    double background = 0.0;      // solver-level bias actually present in e3
    double amp_scale = 0.0;       // leading beam amplitude factor at the detector
    double beam_a2 = 0.0, beam_a3 = 0.0;
    double beam_launch = 0.0;
    double beam_window_inner = 0.5, beam_window_outer = 1.5;
    double grid_dx = 0.0, grid_length = 0.0;
    std::string chi_description;

    double sample_time(std::size_t i) const { return t0 + dt * double(i); }
};

/**
 * Leapfrog solver for the transverse 1D reduction
 *
 *     dtt D = dxx E,   D = E + chi_eff(x) |E|^2 E,   E = (0, E2, E3),
 *
 * advancing the displacement and recovering E nodewise by Newton. The
 * transverse reduction satisfies the divergence constraint identically,
 * so a constant bias in E3 is an exact stationary state. At dt = dx the
 * vacuum part of the scheme is the exact translation operator, which is
 * what makes phase measurements meaningful down to O(h).
 */
class Wave1DSolver {
  public:
    Wave1DSolver(Grid1D grid, std::vector<double> chi_eff, std::vector<double> e2_init,
                 std::vector<double> e3_init, double dt,
                 Boundary1D boundary = Boundary1D::Sponge, int sponge_cells = 10);

    void step();
    double t() const { return t_; }
    std::size_t steps_taken() const { return n_; }
    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& e2() const { return e2_; }
    const std::vector<double>& e3() const { return e3_; }
    const std::vector<double>& chi_eff() const { return chi_; }
    double dt() const { return dt_; }

    /** Max |E + chi|E|^2 E - D| over nodes at the current level. */
    double constitutive_residual() const;

    /** Solve e + chi |e|^2 e = d for the two transverse components, Newton
     *  from the supplied guess; residual <= 1e-13, at most 8 iterations. */
    static std::array<double, 2> invert_constitutive(const std::array<double, 2>& d, double chi,
                                                     const std::array<double, 2>& guess);

  private:
    Grid1D grid_;
    std::vector<double> chi_;
    std::vector<double> e2_, e3_, d2_, d3_, d2_prev_, d3_prev_;
    std::vector<double> sigma_;   // sponge damping
    double dt_ = 0.0, t_ = 0.0;
    std::size_t n_ = 0;
    bool first_ = true;
    Boundary1D boundary_;

    void apply_constitutive(std::size_t j);
};

struct ExperimentOptions {
    double length = 20.0;
    double dx_over_h = 0.1;
    double cfl = 1.0;             // dt = cfl * dx; 1 is the exact-translation step
    double detector_x = 16.0;
    Boundary1D boundary = Boundary1D::Sponge;
    int sponge_cells = 10;
    std::size_t record_stride = 1;
    bool record_history = false;  // keep full (e2, e3) snapshots per recorded step
};

struct ExperimentResult {
    DetectorTrace trace;
    Grid1D grid;
    std::vector<double> e2, e3;   // final fields
    std::vector<double> history_times;
    std::vector<std::vector<double>> history_e2, history_e3;
    std::size_t steps = 0;
};

/**
 * Run a beam through the medium and record the detector trace. Initial
 * data, with the bias field and the h-scaled susceptibility absorbed by
 * the rescaling freedom of the model,
 *
 *     E(0, x) = e0 e3 + 2 h U_init(x) cos(x/h),   dt E(0, .) = 0,
 *     chi_eff = h chi,
 *
 * so the measured phase shifts converge to tau = e0^2/2 * Int chi and
 * 3 tau as h -> 0.
 */
ExperimentResult run_experiment(const BeamSpec& beam, const Chi1D& chi, double e0, double h,
                                double T, const ExperimentOptions& opts = {});

/** Least-squares carrier phase of a trace component against the translated
 *  envelope model amp * w(x_d - t) cos((x_d - t)/h + delta): coarse scan,
 *  golden section, then quadratic refinement. component: 2 or 3 (3 has the
 *  background subtracted first). */
double measure_phase_shift(const DetectorTrace& trace, const BeamSpec& beam, int component,
                           double t_lo, double t_hi);

/** H(t) = H0 - Int_0^t curl E, trapezoid in time; in this reduction
 *  curl E = (0, -d1 E3, d1 E2). Returns one 3-component field per input
 *  level. */
std::vector<std::vector<Vec3>> reconstruct_H(const Grid1D& grid,
                                             const std::vector<std::vector<double>>& e2_levels,
                                             const std::vector<std::vector<double>>& e3_levels,
                                             double dt, const std::vector<Vec3>& H0);

/** Conserved discrete energy of the linear leapfrog scheme (chi = 0),
 *  evaluated from two consecutive levels of one component. */
double leapfrog_energy(const std::vector<double>& u_prev, const std::vector<double>& u_curr,
                       double dx, double dt, bool periodic);

} // namespace kerr

#endif
