#include "kerr/inversion.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <deque>

#include "kerr/errors.hpp"
#include "kerr/quadrature.hpp"
#include "kerr/threading.hpp"

namespace kerr {

// ---------------------------------------------------------------------------
// extraction

ExtractResult extract_cos_sin_tau(const DetectorTrace& trace, const BeamSpec& beam,
                                  const WindowFunction& window) {
    const std::size_t n = trace.e2.size();
    if (n < 16) throw std::invalid_argument("extract_cos_sin_tau: trace too short");
    if (trace.dt > 2.0 * M_PI * trace.h / 20.0)
        throw std::invalid_argument("extract_cos_sin_tau: trace undersamples the carrier");

    const double R = trace.position;
    std::vector<double> fc(n), fs(n), fn(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = trace.sample_time(i);
        const double psi = window(t);
        const double theta = (R - t) / trace.h;
        fc[i] = trace.e2[i] * std::cos(theta) * psi;
        fs[i] = trace.e2[i] * std::sin(theta) * psi;
        fn[i] = trace.amp_scale * trace.beam_a2 *
                beam.longitudinal(R - t - trace.beam_launch) * psi;
    }
    const double Ic = trapezoid(fc, trace.dt);
    const double Is = trapezoid(fs, trace.dt);
    const double N = 0.5 * trapezoid(fn, trace.dt);
    if (std::abs(N) < 1e-8)
        throw Error("extract_cos_sin_tau: window misses envelope (normalization below 1e-8)");
    return {Ic / N, -Is / N, N};
}

ExtractResult extract_with_window_family(const DetectorTrace& trace, const BeamSpec& beam,
                                         const std::vector<WindowFunction>& windows) {
    double wsum = 0.0, c = 0.0, s = 0.0;
    for (const auto& win : windows) {
        try {
            const ExtractResult r = extract_cos_sin_tau(trace, beam, win);
            const double w = std::abs(r.normalization);
            c += w * r.cos_tau;
            s += w * r.sin_tau;
            wsum += w;
        } catch (const Error&) {
            // degenerate window, try the next one
        }
    }
    if (wsum == 0.0)
        throw Error("extract_with_window_family: every window misses the envelope");
    return {c / wsum, s / wsum, wsum};
}

// ---------------------------------------------------------------------------
// unwrapping

Array2D unwrap_tau(const Array2D& cos_tau, const Array2D& sin_tau) {
    if (cos_tau.n1 != sin_tau.n1 || cos_tau.n2 != sin_tau.n2 || cos_tau.n1 == 0)
        throw std::invalid_argument("unwrap_tau: field shapes differ");
    const std::size_t n1 = cos_tau.n1, n2 = cos_tau.n2;

    Array2D wrapped(n1, n2), tau(n1, n2);
    for (std::size_t i = 0; i < n1 * n2; ++i)
        wrapped.values[i] = std::atan2(sin_tau.values[i], cos_tau.values[i]);

    std::vector<char> seen(n1 * n2, 0);
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    // corner rays miss the support, so the seed carries no wrap
    tau.at(0, 0) = wrapped.at(0, 0);
    seen[0] = 1;
    queue.emplace_back(0, 0);
    const double two_pi = 2.0 * M_PI;

    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        const double base = tau.at(i, j);
        const std::ptrdiff_t di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const std::ptrdiff_t ni = std::ptrdiff_t(i) + di[k];
            const std::ptrdiff_t nj = std::ptrdiff_t(j) + dj[k];
            if (ni < 0 || nj < 0 || ni >= std::ptrdiff_t(n1) || nj >= std::ptrdiff_t(n2)) continue;
            const std::size_t id = std::size_t(ni) * n2 + std::size_t(nj);
            if (seen[id]) continue;
            const double w = wrapped.values[id];
            const double k2pi = std::round((base - w) / two_pi);
            tau.values[id] = w + two_pi * k2pi;
            seen[id] = 1;
            queue.emplace_back(std::size_t(ni), std::size_t(nj));
        }
    }

    // a jump >= pi between any neighbor pair means the fill ran across an
    // aliased ridge somewhere: the field is under-resolved
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            if (i + 1 < n1 && std::abs(tau.at(i, j) - tau.at(i + 1, j)) >= M_PI)
                throw Error("unwrap_tau: neighbor jump >= pi; insufficient detector resolution");
            if (j + 1 < n2 && std::abs(tau.at(i, j) - tau.at(i, j + 1)) >= M_PI)
                throw Error("unwrap_tau: neighbor jump >= pi; insufficient detector resolution");
        }
    return tau;
}

// ---------------------------------------------------------------------------
// sinogram assembly

Sinogram assemble_sinogram(const std::vector<Array2D>& tau_per_angle, double e0,
                           double offset_min, double offset_max, double z_min, double z_max) {
    if (e0 <= 0.0) throw Error("assemble_sinogram: e0 = 0 carries no retardation signal");
    if (tau_per_angle.empty()) throw std::invalid_argument("assemble_sinogram: no angles");
    const std::size_t n_offsets = tau_per_angle.front().n1;
    const std::size_t n_slices = tau_per_angle.front().n2;
    Sinogram sino(n_slices, tau_per_angle.size(), n_offsets);
    sino.offset_min = offset_min;
    sino.offset_max = offset_max;
    sino.z_min = z_min;
    sino.z_max = z_max;
    sino.e0 = e0;
    const double scale = 2.0 / (e0 * e0);
    for (std::size_t a = 0; a < tau_per_angle.size(); ++a) {
        const Array2D& tau = tau_per_angle[a];
        if (tau.n1 != n_offsets || tau.n2 != n_slices)
            throw std::invalid_argument("assemble_sinogram: inconsistent tau field shapes");
        for (std::size_t o = 0; o < n_offsets; ++o)
            for (std::size_t s = 0; s < n_slices; ++s)
                sino.at(s, a, o) = scale * tau.at(o, s);
    }
    return sino;
}

// ---------------------------------------------------------------------------
// filtered backprojection

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/** Ramp-filter every projection row in place: |nu| with raised-cosine
 *  apodization, via zero-padded FFT. rows: n_rows x n_samples. */
// TODO: hoist the FFTW plans out of the per-slice loop for many-slice runs
void ramp_filter_rows(std::vector<double>& rows, std::size_t n_rows, std::size_t n_samples,
                      double dp) {
    const std::size_t nfft = next_pow2(2 * n_samples);
    const std::size_t nfreq = nfft / 2 + 1;
    double* in = fftw_alloc_real(nfft);
    fftw_complex* freq = fftw_alloc_complex(nfreq);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(int(nfft), in, freq, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(int(nfft), freq, in, FFTW_ESTIMATE);

    std::vector<double> filter(nfreq);
    for (std::size_t k = 0; k < nfreq; ++k) {
        const double nu = double(k) / (double(nfft) * dp);
        const double apod = 0.5 * (1.0 + std::cos(M_PI * double(k) / double(nfft / 2)));
        filter[k] = nu * apod / double(nfft);
    }

    for (std::size_t r = 0; r < n_rows; ++r) {
        double* row = rows.data() + r * n_samples;
        std::fill(in, in + nfft, 0.0);
        std::copy(row, row + n_samples, in);
        fftw_execute(fwd);
        for (std::size_t k = 0; k < nfreq; ++k) {
            freq[k][0] *= filter[k];
            freq[k][1] *= filter[k];
        }
        fftw_execute(bwd);
        std::copy(in, in + n_samples, row);
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(freq);
    fftw_free(in);
}

} // namespace

SusceptibilityField fbp_reconstruct(const Sinogram& sino, std::size_t n_pixels) {
    if (sino.n_angles < 8) throw Error("fbp_reconstruct: insufficient angular coverage (< 8)");
    if (sino.n_offsets < 2) throw std::invalid_argument("fbp_reconstruct: too few offsets");
    if (n_pixels == 0) n_pixels = sino.n_offsets;
    if (n_pixels < 2) throw std::invalid_argument("fbp_reconstruct: too few pixels");

    const double dp = (sino.offset_max - sino.offset_min) / double(sino.n_offsets - 1);
    const double dtheta = M_PI / double(sino.n_angles);

    const double dxy = (sino.offset_max - sino.offset_min) / double(n_pixels - 1);
    const double dz = sino.n_slices > 1 ? (sino.z_max - sino.z_min) / double(sino.n_slices - 1)
                                        : std::max(dxy, 1e-3);
    Grid3D grid({sino.offset_min, sino.offset_min, sino.z_min}, {dxy, dxy, dz},
                {n_pixels, n_pixels, std::max<std::size_t>(sino.n_slices, 2)});
    ScalarField out(grid.size(), 0.0);

    std::vector<double> cos_t(sino.n_angles), sin_t(sino.n_angles);
    for (std::size_t a = 0; a < sino.n_angles; ++a) {
        cos_t[a] = std::cos(sino.angle(a));
        sin_t[a] = std::sin(sino.angle(a));
    }

    for (std::size_t s = 0; s < sino.n_slices; ++s) {
        std::vector<double> rows(sino.n_angles * sino.n_offsets);
        for (std::size_t a = 0; a < sino.n_angles; ++a)
            for (std::size_t o = 0; o < sino.n_offsets; ++o)
                rows[a * sino.n_offsets + o] = sino.at(s, a, o);
        ramp_filter_rows(rows, sino.n_angles, sino.n_offsets, dp);

        // pixel rows are independent; deterministic static partition
        parallel_for(n_pixels, [&](std::size_t i) {
            const double x = sino.offset_min + dxy * double(i);
            for (std::size_t j = 0; j < n_pixels; ++j) {
                const double y = sino.offset_min + dxy * double(j);
                double acc = 0.0;
                for (std::size_t a = 0; a < sino.n_angles; ++a) {
                    // offset coordinate along omega_perp = (-sin, cos)
                    const double p = -x * sin_t[a] + y * cos_t[a];
                    const double fo = (p - sino.offset_min) / dp;
                    if (fo < 0.0 || fo > double(sino.n_offsets - 1)) continue;
                    std::size_t o0 = std::size_t(fo);
                    if (o0 >= sino.n_offsets - 1) o0 = sino.n_offsets - 2;
                    const double w = fo - double(o0);
                    acc += (1.0 - w) * rows[a * sino.n_offsets + o0] +
                           w * rows[a * sino.n_offsets + o0 + 1];
                }
                out[grid.index(i, j, s)] = acc * dtheta;
            }
        });
    }
    // degenerate slice axis: duplicate the single slice so the grid stays valid
    if (sino.n_slices == 1)
        for (std::size_t i = 0; i < n_pixels; ++i)
            for (std::size_t j = 0; j < n_pixels; ++j)
                out[grid.index(i, j, 1)] = out[grid.index(i, j, 0)];

    return SusceptibilityField::gridded(grid, std::move(out), sino.offset_max,
                                        2.0 * sino.offset_max);
}

// ---------------------------------------------------------------------------
// geometric-optics forward model

DetectorTrace synth_trace(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                          double detector_plane, double offset_p, double slice_z, double t0,
                          double t1, double dt) {
    const Vec3 x{detector_plane, offset_p, slice_z};
    const double tau = tau_at(field, e0, Direction::e1(), x);
    const double h = beam.h;
    const double amp = h * std::sqrt(h);

    DetectorTrace trace;
    trace.position = detector_plane;
    trace.t0 = t0;
    trace.dt = dt;
    trace.h = h;
    trace.e0 = e0;
    trace.background = std::sqrt(h) * e0;
    trace.amp_scale = amp;
    trace.beam_a2 = beam.a2;
    trace.beam_a3 = beam.a3;
    trace.beam_launch = beam.launch;
    trace.beam_window_inner = beam.longitudinal.inner();
    trace.beam_window_outer = beam.longitudinal.outer();
    trace.chi_description = "analytic geometric-optics forward";

    const std::size_t n = std::size_t((t1 - t0) / dt) + 1;
    trace.e2.resize(n);
    trace.e3.resize(n);
    const Vec3 u_trans = beam.u_init({0.0, offset_p, slice_z});   // window applied separately
    (void)u_trans;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + dt * double(i);
        const Vec3 u = beam.u_init({detector_plane - t, offset_p, slice_z});
        const double phi = (detector_plane - t) / h;
        trace.e2[i] = amp * u.y * std::cos(phi + tau);
        trace.e3[i] = trace.background + amp * u.z * std::cos(phi + 3.0 * tau);
    }
    return trace;
}

Sinogram forward_sinogram(const SusceptibilityField& phantom, const BeamSpec& beam,
                          const ForwardModelSpec& spec) {
    const double R = spec.detector_plane > 0 ? spec.detector_plane : phantom.support_radius();
    const double offset_max = phantom.support_radius();
    const double offset_min = -offset_max;
    const std::size_t no = spec.n_offsets, ns = spec.slices_z.size();

    // the extraction normalization assumes the flat beam core covers every
    // detector pixel
    double zmax = 0.0;
    for (double z : spec.slices_z) zmax = std::max(zmax, std::abs(z));
    if (beam.core_radius() < std::hypot(offset_max, zmax))
        throw std::invalid_argument("forward_sinogram: beam core must cover the detector plane");
    if (beam.support_max_x1() > -phantom.support_radius())
        throw std::invalid_argument("forward_sinogram: beam must launch before the support ball");

    // detector records the packet transit; window centered on it
    const double t_arrive_lo = R - beam.launch - beam.longitudinal.outer();
    const double t_arrive_hi = R - beam.launch + beam.longitudinal.outer();
    const double pad = 0.25 * (t_arrive_hi - t_arrive_lo);
    const WindowFunction window{t_arrive_lo - pad, t_arrive_hi + pad};
    const double dt = 2.0 * M_PI * spec.h / 40.0;

    // angles are independent rays through independent rotations of the
    // phantom; each worker owns its own sinogram rows
    std::vector<Array2D> tau_per_angle(spec.n_angles);
    parallel_for(spec.n_angles, [&](std::size_t a) {
        const double theta = M_PI * double(a) / double(spec.n_angles);
        // canonical-frame run over the phantom rotated by -theta
        const SusceptibilityField rotated = phantom.rotated_about_e3(-theta);
        Array2D cos_f(no, ns), sin_f(no, ns);
        for (std::size_t o = 0; o < no; ++o) {
            const double p = offset_min + (offset_max - offset_min) * double(o) / double(no - 1);
            for (std::size_t s = 0; s < ns; ++s) {
                const DetectorTrace trace =
                    synth_trace(beam, rotated, spec.e0, R, p, spec.slices_z[s],
                                window.t_lo - 2.0 * dt, window.t_hi + 2.0 * dt, dt);
                const ExtractResult ex = extract_cos_sin_tau(trace, beam, window);
                cos_f.at(o, s) = ex.cos_tau;
                sin_f.at(o, s) = ex.sin_tau;
            }
        }
        tau_per_angle[a] = unwrap_tau(cos_f, sin_f);
    });
    const double z_min = spec.slices_z.front(), z_max = spec.slices_z.back();
    return assemble_sinogram(tau_per_angle, spec.e0, offset_min, offset_max, z_min, z_max);
}

} // namespace kerr
