#include "kerr/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "kerr/errors.hpp"
#include "kerr/inversion.hpp"
#include "kerr/io.hpp"
#include "kerr/kerrcell.hpp"
#include "kerr/stationary.hpp"
#include "kerr/threading.hpp"

namespace kerr {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config fragments

SusceptibilityField chi_from_config(const ExperimentConfig& cfg) {
    const double R = cfg.get_double("chi", "support_radius", 2.0);
    const double R0 = cfg.get_double("chi", "domain_radius", 3.0 * R);
    if (cfg.has("chi", "grid")) {
        auto [grid, samples] = read_grid_field(cfg.get_string("chi", "grid"));
        return SusceptibilityField::gridded(grid, std::move(samples), R, R0);
    }
    std::vector<GaussianBump> bumps;
    if (cfg.has("chi", "bumps")) {
        // rows "a cx cy cz s" separated by ';'
        std::istringstream rows(cfg.get_string("chi", "bumps"));
        std::string row;
        while (std::getline(rows, row, ';')) {
            std::istringstream ss(row);
            GaussianBump b;
            if (!(ss >> b.amplitude >> b.center.x >> b.center.y >> b.center.z >> b.width))
                throw ConfigError(cfg.source() + ": [chi] bumps: expected rows 'a cx cy cz s'");
            bumps.push_back(b);
        }
    } else if (cfg.has("chi", "random_bumps")) {
        const long n = cfg.get_int("chi", "random_bumps");
        const unsigned long seed = (unsigned long)cfg.get_int("experiment", "seed", 1);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> amp(0.5, 1.0), pos(-0.4 * R, 0.4 * R),
            width(0.15 * R, 0.3 * R);
        for (long i = 0; i < n; ++i)
            bumps.push_back({amp(rng), {pos(rng), pos(rng), pos(rng)}, width(rng)});
    }
    if (bumps.empty()) return SusceptibilityField::zero(R0);
    return SusceptibilityField::analytic(std::move(bumps), R, R0);
}

Chi1D chi1d_from_config(const ExperimentConfig& cfg) {
    const std::string kind = cfg.get_string("chi1d", "kind", "zero");
    if (kind == "zero") return Chi1D::zero();
    if (kind == "gaussian")
        return Chi1D::gaussian(cfg.get_double("chi1d", "amplitude", 1.0),
                               cfg.get_double("chi1d", "center", 10.0),
                               cfg.get_double("chi1d", "sigma", 0.4),
                               cfg.get_double("chi1d", "radius", 1.9));
    if (kind == "plateau")
        return Chi1D::plateau(cfg.get_double("chi1d", "level", 1.0),
                              cfg.get_double("chi1d", "lo", 8.0),
                              cfg.get_double("chi1d", "hi", 12.0),
                              cfg.get_double("chi1d", "ramp", 0.2));
    throw ConfigError(cfg.source() + ": [chi1d] kind must be zero|gaussian|plateau");
}

BeamSpec beam_from_config(const ExperimentConfig& cfg, double h) {
    return make_beam(cfg.get_double("beam", "a2", 1.0), cfg.get_double("beam", "a3", 1.0),
                     cfg.get_double("beam", "core_radius", 0.5),
                     cfg.get_double("beam", "outer_radius", 1.0), h,
                     cfg.get_double("beam", "launch", 3.0),
                     cfg.get_double("beam", "window_inner", 0.6),
                     cfg.get_double("beam", "window_outer", 1.5));
}

ExperimentOptions fdtd_options_from_config(const ExperimentConfig& cfg) {
    ExperimentOptions opts;
    opts.length = cfg.get_double("fdtd", "length", opts.length);
    opts.dx_over_h = cfg.get_double("fdtd", "dx_over_h", opts.dx_over_h);
    opts.cfl = cfg.get_double("fdtd", "cfl", opts.cfl);
    opts.detector_x = cfg.get_double("fdtd", "detector_x", opts.detector_x);
    opts.sponge_cells = int(cfg.get_int("fdtd", "sponge_cells", opts.sponge_cells));
    opts.record_stride = std::size_t(cfg.get_int("fdtd", "record_stride", 1));
    const std::string boundary = cfg.get_string("fdtd", "boundary", "sponge");
    if (boundary == "sponge")
        opts.boundary = Boundary1D::Sponge;
    else if (boundary == "periodic")
        opts.boundary = Boundary1D::Periodic;
    else
        throw ConfigError(cfg.source() + ": [fdtd] boundary must be sponge|periodic");
    return opts;
}

namespace {

fs::path output_dir_of(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("OUTPUT_DIR")) return env;
    return cfg.get_string("experiment", "output_dir", "out");
}

double single_h(const ExperimentConfig& cfg) {
    const double h = cfg.get_double("experiment", "h", 0.01);
    if (!(h > 0 && h < 1)) throw ConfigError(cfg.source() + ": [experiment] h must be in (0, 1)");
    return h;
}

std::vector<double> h_sweep_of(const ExperimentConfig& cfg) {
    if (cfg.has("experiment", "h_sweep")) {
        auto v = cfg.get_doubles("experiment", "h_sweep");
        for (double h : v)
            if (!(h > 0 && h < 1))
                throw ConfigError(cfg.source() + ": [experiment] h_sweep entries must be in (0, 1)");
        return v;
    }
    return {single_h(cfg)};
}

double sup_norm_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// -------------------------------------------------------------------------
// subcommands

RunOutput do_stationary(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    const double R0 = cfg.get_double("stationary", "R0", 2.0);
    const std::size_t n = std::size_t(cfg.get_int("stationary", "n", 64));
    const double fscale = cfg.get_double("stationary", "f_scale", 1.0);
    const double tol = cfg.get_double("stationary", "tol", 1e-12);
    const int max_iter = int(cfg.get_int("stationary", "max_iter", 50));

    const SusceptibilityField chi = chi_from_config(cfg);
    DirichletProblem problem;
    problem.grid = Grid3D::cube(R0, n);
    problem.boundary = [fscale](const Vec3& x) { return fscale * x.z; };
    problem.chi = &chi;

    const auto expansion = expansion_terms(problem, 1);
    write_grid_field(dir / "psi0.f64", problem.grid, expansion[0], "psi0");
    write_grid_field(dir / "psi1.f64", problem.grid, expansion[1], "psi1");
    manifest.add(dir / "psi0.f64");
    manifest.add(dir / "psi0.f64.json");
    manifest.add(dir / "psi1.f64");
    manifest.add(dir / "psi1.f64.json");

    std::vector<std::vector<double>> log_rows, expansion_rows;
    double prev_norm = 0.0;
    std::vector<double> sweep{0.04, 0.02, 0.01};
    if (cfg.has("experiment", "h_sweep") || cfg.has("experiment", "h")) sweep = h_sweep_of(cfg);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        problem.h = sweep[i];
        const StrongFieldSolution sol = fixed_point_solve(problem, max_iter, tol);
        const std::string tag = "psi_h" + std::to_string(i);
        write_grid_field(dir / (tag + ".f64"), problem.grid, sol.psi, tag);
        manifest.add(dir / (tag + ".f64"));
        manifest.add(dir / (tag + ".f64.json"));
        for (int axis = 0; axis < 3; ++axis) {
            ScalarField comp(sol.E.size());
            for (std::size_t id = 0; id < comp.size(); ++id) comp[id] = sol.E[id][axis];
            const std::string etag = "E" + std::to_string(axis + 1) + "_h" + std::to_string(i);
            write_grid_field(dir / (etag + ".f64"), problem.grid, comp, etag);
            manifest.add(dir / (etag + ".f64"));
            manifest.add(dir / (etag + ".f64.json"));
        }

        const double ratio2 = sol.difference_norms.size() >= 2
                                  ? sol.difference_norms[1] / sol.difference_norms[0]
                                  : 0.0;
        log_rows.push_back({problem.h, double(sol.iterations), sol.fixed_point_residual,
                            sol.residual_norm, ratio2});

        ScalarField model(sol.psi.size());
        for (std::size_t id = 0; id < model.size(); ++id)
            model[id] = expansion[0][id] + problem.h * expansion[1][id];
        const double norm = sup_norm_diff(sol.psi, model);
        expansion_rows.push_back({problem.h, norm, i > 0 ? prev_norm / norm : 0.0});
        prev_norm = norm;
    }
    write_csv(dir / "convergence_log.csv",
              {"h", "iterations", "fixed_point_residual", "pde_residual", "ratio2"}, log_rows);
    manifest.add(dir / "convergence_log.csv");
    write_csv(dir / "expansion_check.csv", {"h", "sup_norm", "reduction_factor"}, expansion_rows);
    manifest.add(dir / "expansion_check.csv");

    RunOutput out{dir, manifest.files(), manifest.write("stationary")};
    return out;
}

RunOutput do_forward(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    const double h = single_h(cfg);
    const SusceptibilityField chi = chi_from_config(cfg);
    const BeamSpec beam = beam_from_config(cfg, h);
    const double e0 = cfg.get_double("forward", "e0", 1.0);
    const double R = cfg.get_double("forward", "detector_plane", chi.support_radius());
    const double z = cfg.get_double("forward", "slice_z", 0.0);
    const auto offsets = cfg.get_doubles("forward", "offsets", {0.0});

    const double t_lo = R - beam.launch - beam.longitudinal.outer() - 0.5;
    const double t_hi = R - beam.launch + beam.longitudinal.outer() + 0.5;
    const double dt = 2.0 * M_PI * h / 40.0;

    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const DetectorTrace trace = synth_trace(beam, chi, e0, R, offsets[i], z, t_lo, t_hi, dt);
        const fs::path path = dir / ("trace_" + std::to_string(i) + ".csv");
        write_trace(path, trace);
        manifest.add(path);
        manifest.add(fs::path(path.string() + ".json"));
    }
    std::vector<std::pair<std::string, std::string>> notes;
    if (chi.is_zero()) notes.emplace_back("zero_retardation", "true");
    RunOutput out{dir, manifest.files(), manifest.write("forward", notes)};
    return out;
}

RunOutput do_fdtd(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    const double h = single_h(cfg);
    const Chi1D chi = chi1d_from_config(cfg);
    const BeamSpec beam = beam_from_config(cfg, h);
    const ExperimentOptions opts = fdtd_options_from_config(cfg);
    const double e0 = cfg.get_double("fdtd", "e0", 1.0);
    const double T = cfg.get_double("fdtd", "T", 15.0);

    const ExperimentResult res = run_experiment(beam, chi, e0, h, T, opts);
    write_trace(dir / "trace.csv", res.trace);
    manifest.add(dir / "trace.csv");
    manifest.add(dir / "trace.csv.json");

    const double t_lo = opts.detector_x - beam.support_max_x1();
    const double t_hi = opts.detector_x - beam.support_min_x1();
    std::vector<std::pair<std::string, std::string>> notes;
    if (chi.support_hi > chi.support_lo && e0 > 0) {
        const double d2 = measure_phase_shift(res.trace, beam, 2, t_lo, t_hi);
        const double d3 = measure_phase_shift(res.trace, beam, 3, t_lo, t_hi);
        notes.emplace_back("delta2", format_g17(d2));
        notes.emplace_back("delta3", format_g17(d3));
        notes.emplace_back("tau_predicted", format_g17(0.5 * e0 * e0 * chi.integral()));
    }
    RunOutput out{dir, manifest.files(), manifest.write("fdtd", notes)};
    return out;
}

RunOutput do_sinogram(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    const double h = single_h(cfg);
    const SusceptibilityField chi = chi_from_config(cfg);
    const BeamSpec beam = beam_from_config(cfg, h);

    ForwardModelSpec spec;
    spec.n_angles = std::size_t(cfg.get_int("sinogram", "n_angles", 180));
    spec.n_offsets = std::size_t(cfg.get_int("sinogram", "n_offsets", 256));
    spec.slices_z = cfg.get_doubles("sinogram", "slices_z", {0.0});
    spec.e0 = cfg.get_double("sinogram", "e0", 1.0);
    spec.h = h;
    spec.detector_plane = cfg.get_double("sinogram", "detector_plane", 0.0);

    const Sinogram sino = forward_sinogram(chi, beam, spec);
    write_sinogram(dir / "sinogram.f64", sino);
    manifest.add(dir / "sinogram.f64");
    manifest.add(dir / "sinogram.f64.json");
    RunOutput out{dir, manifest.files(), manifest.write("sinogram")};
    return out;
}

RunOutput do_kerrcell(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    CellSpec cell;
    cell.a2 = cfg.get_double("kerrcell", "a2", 1.0);
    cell.a3 = cfg.get_double("kerrcell", "a3", 1.0);
    cell.d = cfg.get_double("kerrcell", "d", 4.0);
    cell.e0 = cfg.get_double("kerrcell", "e0", 1.0);
    cell.chi = cfg.get_double("kerrcell", "chi", 0.4);
    const double h = single_h(cfg);

    // scan tables for plotting
    std::vector<std::vector<double>> tau_rows, e0_rows;
    const double dtau = cfg.get_double("kerrcell", "tau_step", 1e-3);
    for (double tau = 0.0; tau <= M_PI + 1e-12; tau += dtau)
        tau_rows.push_back({tau, transmission_envelope(cell.a2, cell.a3, tau)});
    const double e0_max = cfg.get_double("kerrcell", "e0_max", 2.0);
    const Chi1D plateau = Chi1D::plateau(cell.chi, 8.0, 8.0 + cell.d, 10.0 * h);
    const double chi_integral = plateau.integral();
    for (double e0 = 0.0; e0 <= e0_max + 1e-12; e0 += e0_max / 400.0) {
        const double tau = 0.5 * e0 * e0 * chi_integral;
        e0_rows.push_back({e0, transmission_envelope(cell.a2, cell.a3, tau)});
    }
    write_csv(dir / "envelope_vs_tau.csv", {"tau", "envelope"}, tau_rows);
    write_csv(dir / "envelope_vs_e0.csv", {"e0", "envelope"}, e0_rows);
    manifest.add(dir / "envelope_vs_tau.csv");
    manifest.add(dir / "envelope_vs_e0.csv");

    const CellSimResult sim = simulate_cell(cell, h);
    std::vector<std::pair<std::string, std::string>> notes{
        {"tau_predicted", format_g17(sim.tau_predicted)},
        {"envelope_measured", format_g17(sim.envelope_measured)},
        {"envelope_analytic", format_g17(sim.envelope_analytic)},
        {"ellipse_half_major", format_g17(sim.ellipse.half_major)},
        {"ellipse_half_minor", format_g17(sim.ellipse.half_minor)},
    };
    write_trace(dir / "cell_trace.csv", sim.trace);
    manifest.add(dir / "cell_trace.csv");
    manifest.add(dir / "cell_trace.csv.json");
    RunOutput out{dir, manifest.files(), manifest.write("kerrcell", notes)};
    return out;
}

RunOutput do_convergence(const ExperimentConfig& cfg) {
    const fs::path dir = output_dir_of(cfg);
    Manifest manifest(dir);

    const Chi1D chi = chi1d_from_config(cfg);
    const double e0 = cfg.get_double("convergence", "e0", 1.25);
    auto sweep = h_sweep_of(cfg);

    BeamShape shape;
    shape.a2 = cfg.get_double("beam", "a2", 1.0);
    shape.a3 = cfg.get_double("beam", "a3", 1.0);
    shape.core_radius = cfg.get_double("beam", "core_radius", 0.5);
    shape.outer_radius = cfg.get_double("beam", "outer_radius", 1.0);
    shape.launch = cfg.get_double("beam", "launch", 3.0);
    shape.window_inner = cfg.get_double("beam", "window_inner", 0.6);
    shape.window_outer = cfg.get_double("beam", "window_outer", 1.5);

    ExperimentOptions opts;
    if (cfg.has("fdtd", "length")) opts = fdtd_options_from_config(cfg);

    const PhaseLawStudy study = phase_law_study(chi, e0, sweep, shape, opts);

    std::vector<std::vector<double>> rows;
    for (const auto& p : study.points)
        rows.push_back({p.h, p.delta2, p.delta3, p.err2, p.err3, p.err2 / p.h, p.err3 / p.h});
    write_csv(dir / "phase_law.csv", {"h", "delta2", "delta3", "err2", "err3", "C2", "C3"}, rows);
    manifest.add(dir / "phase_law.csv");

    std::vector<std::pair<std::string, std::string>> notes{
        {"tau_infinity", format_g17(study.tau_inf)},
        {"fitted_C", format_g17(study.fitted_C)},
        {"order2", format_g17(study.order2)},
        {"order3", format_g17(study.order3)},
    };
    RunOutput out{dir, manifest.files(), manifest.write("convergence", notes)};
    return out;
}

} // namespace

PhaseLawStudy phase_law_study(const Chi1D& chi, double e0, const std::vector<double>& h_sweep,
                              const BeamShape& shape, ExperimentOptions opts, double T) {
    if (h_sweep.empty()) throw std::invalid_argument("phase_law_study: empty h sweep");
    PhaseLawStudy study;
    study.tau_inf = 0.5 * e0 * e0 * chi.integral();
    if (T <= 0.0) T = opts.detector_x + shape.window_outer - shape.launch + 0.5;

    for (double h : h_sweep) {
        const BeamSpec beam = shape.realize(h);
        const ExperimentResult res = run_experiment(beam, chi, e0, h, T, opts);
        const double t_lo = opts.detector_x - beam.support_max_x1();
        const double t_hi = opts.detector_x - beam.support_min_x1();
        PhaseLawPoint p;
        p.h = h;
        p.delta2 = measure_phase_shift(res.trace, beam, 2, t_lo, t_hi);
        p.delta3 = measure_phase_shift(res.trace, beam, 3, t_lo, t_hi);
        p.err2 = std::abs(p.delta2 - study.tau_inf);
        p.err3 = std::abs(p.delta3 - 3.0 * study.tau_inf);
        study.fitted_C = std::max({study.fitted_C, p.err2 / h, p.err3 / h});
        study.points.push_back(p);
    }
    if (study.points.size() >= 2) {
        const auto& first = study.points.front();
        const auto& last = study.points.back();
        const double halvings = std::log2(first.h / last.h);
        if (halvings > 0) {
            study.order2 = std::log2(first.err2 / last.err2) / halvings;
            study.order3 = std::log2(first.err3 / last.err3) / halvings;
        }
    }
    return study;
}

RunOutput run(const std::string& subcommand, const ExperimentConfig& cfg) {
    const std::string declared = cfg.get_string("experiment", "type", subcommand);
    if (declared != subcommand)
        throw ConfigError(cfg.source() + ": [experiment] type = " + declared +
                          " does not match subcommand " + subcommand);
    if (cfg.has("experiment", "threads"))
        set_max_threads(unsigned(cfg.get_int("experiment", "threads")));

    if (subcommand == "stationary") return do_stationary(cfg);
    if (subcommand == "forward") return do_forward(cfg);
    if (subcommand == "fdtd") return do_fdtd(cfg);
    if (subcommand == "sinogram") return do_sinogram(cfg);
    if (subcommand == "kerrcell") return do_kerrcell(cfg);
    if (subcommand == "convergence") return do_convergence(cfg);
    throw ConfigError("unknown subcommand: " + subcommand);
}

RunOutput run_extract(const std::filesystem::path& trace_path, double window_lo, double window_hi,
                      const std::filesystem::path& output_dir) {
    Manifest manifest(output_dir);
    const DetectorTrace trace = read_trace(trace_path);
    // the sidecar carries the beam geometry needed for the envelope
    BeamSpec beam = make_beam(trace.beam_a2 != 0 ? trace.beam_a2 : 1.0,
                              trace.beam_a3 != 0 ? trace.beam_a3 : 1.0, 0.5, 1.0, trace.h,
                              trace.beam_launch, trace.beam_window_inner,
                              trace.beam_window_outer);
    beam.a2 = trace.beam_a2;
    beam.a3 = trace.beam_a3;
    const WindowFunction window{window_lo, window_hi};
    const ExtractResult r = extract_cos_sin_tau(trace, beam, window);

    write_csv(output_dir / "extract.csv", {"cos_tau", "sin_tau", "normalization"},
              {{r.cos_tau, r.sin_tau, r.normalization}});
    manifest.add(output_dir / "extract.csv");
    RunOutput out{output_dir, manifest.files(), manifest.write("extract")};
    return out;
}

RunOutput run_reconstruct(const std::filesystem::path& sinogram_path,
                          const std::filesystem::path& out_field, std::size_t n_pixels) {
    const Sinogram sino = read_sinogram(sinogram_path);
    const SusceptibilityField rec = fbp_reconstruct(sino, n_pixels);
    const fs::path dir = out_field.parent_path().empty() ? "." : out_field.parent_path();
    Manifest manifest(dir);
    write_grid_field(out_field, rec.grid(), rec.samples(), "chi3_reconstruction");
    manifest.add(out_field);
    manifest.add(fs::path(out_field.string() + ".json"));
    RunOutput out{dir, manifest.files(), manifest.write("reconstruct")};
    return out;
}

} // namespace kerr
