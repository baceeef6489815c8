#ifndef KERR_RUNNER_HPP
#define KERR_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "kerr/config.hpp"
#include "kerr/direct1d.hpp"
#include "kerr/media.hpp"
#include "kerr/profiles.hpp"

namespace kerr {

struct RunOutput {
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> artifacts;
    std::filesystem::path manifest;
};

/** Dispatch one experiment. Supported subcommands: stationary, forward,
 *  fdtd, sinogram, kerrcell, convergence. extract and reconstruct take
 *  explicit file arguments (below) instead of a config. */
RunOutput run(const std::string& subcommand, const ExperimentConfig& cfg);

RunOutput run_extract(const std::filesystem::path& trace_path, double window_lo, double window_hi,
                      const std::filesystem::path& output_dir);
RunOutput run_reconstruct(const std::filesystem::path& sinogram_path,
                          const std::filesystem::path& out_field, std::size_t n_pixels = 0);

// Config fragments shared by subcommands and tests.
SusceptibilityField chi_from_config(const ExperimentConfig& cfg);
Chi1D chi1d_from_config(const ExperimentConfig& cfg);
BeamSpec beam_from_config(const ExperimentConfig& cfg, double h);
ExperimentOptions fdtd_options_from_config(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// phase-law study (shared by the convergence subcommand and the acceptance
// suite)

struct BeamShape {
    double a2 = 1.0, a3 = 1.0;
    double core_radius = 0.5, outer_radius = 1.0;
    double launch = 3.0, window_inner = 0.6, window_outer = 1.5;

    BeamSpec realize(double h) const {
        return make_beam(a2, a3, core_radius, outer_radius, h, launch, window_inner, window_outer);
    }
};

struct PhaseLawPoint {
    double h = 0.0;
    double delta2 = 0.0, delta3 = 0.0;   // measured shifts
    double err2 = 0.0, err3 = 0.0;       // |delta - m tau|
};

struct PhaseLawStudy {
    double tau_inf = 0.0;
    std::vector<PhaseLawPoint> points;
    double fitted_C = 0.0;     // max over points and components of err / h
    double order2 = 0.0;       // endpoint empirical orders
    double order3 = 0.0;
};

/** Measure the single- and triple-retardation phase shifts across an
 *  h-sweep of direct solver runs and compare with the quadrature
 *  prediction tau = e0^2/2 Int chi. */
PhaseLawStudy phase_law_study(const Chi1D& chi, double e0, const std::vector<double>& h_sweep,
                              const BeamShape& shape, ExperimentOptions opts = {},
                              double T = 0.0);

} // namespace kerr

#endif
