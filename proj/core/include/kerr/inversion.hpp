#ifndef KERR_INVERSION_HPP
#define KERR_INVERSION_HPP

#include <cstddef>
#include <vector>

#include "kerr/direct1d.hpp"
#include "kerr/media.hpp"
#include "kerr/profiles.hpp"

namespace kerr {

/** Smooth nonnegative time window psi on (t_lo, t_hi): the polynomial bump
 *  (1 - u^2)^4 rescaled to the support. */
struct WindowFunction {
    double t_lo = 0.0, t_hi = 1.0;

    double operator()(double t) const {
        if (t <= t_lo || t >= t_hi) return 0.0;
        const double u = (2.0 * t - t_lo - t_hi) / (t_hi - t_lo);
        const double w = 1.0 - u * u;
        return w * w * w * w;
    }
    static WindowFunction poly_bump(double t_lo, double t_hi) { return {t_lo, t_hi}; }
};

struct ExtractResult {
    double cos_tau = 1.0;
    double sin_tau = 0.0;
    double normalization = 0.0;   // (1/2) Int env(t) psi(t) dt
};

/**
 * Windowed oscillatory integrals of the E2 trace against the carrier at
 * the detector plane x1 = R:
 *
 *   I_c = Int trace2(t) cos((R - t)/h) psi(t) dt,   I_s likewise with sin,
 *
 * both by trapezoid over the trace samples. Dividing by the envelope
 * normalization N = (1/2) Int U2(R - t) psi(t) dt gives cos(tau) and
 * (with the sign fixed by the cos(phi/h + tau) expansion) -I_s/N = sin(tau)
 * up to O(h). Throws when |N| < 1e-8 ("window misses envelope").
 */
ExtractResult extract_cos_sin_tau(const DetectorTrace& trace, const BeamSpec& beam,
                                  const WindowFunction& window);

/** Partition-of-unity fallback: evaluates every window with nonvanishing
 *  normalization and blends the estimates weighted by |N|. */
ExtractResult extract_with_window_family(const DetectorTrace& trace, const BeamSpec& beam,
                                         const std::vector<WindowFunction>& windows);

/** Dense row-major 2D array used for detector-plane fields. */
struct Array2D {
    std::size_t n1 = 0, n2 = 0;
    std::vector<double> values;

    Array2D() = default;
    Array2D(std::size_t a, std::size_t b, double fill = 0.0) : n1(a), n2(b), values(a * b, fill) {}
    double& at(std::size_t i, std::size_t j) { return values[i * n2 + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * n2 + j]; }
};

/**
 * Angle unwrapping over the detector plane. Starts from the corner seed
 * (rays that miss the support, tau = 0 there), BFS flood fill adding 2 pi
 * increments so neighbor jumps stay below pi. Throws when a jump >= pi
 * survives ("insufficient detector resolution").
 */
Array2D unwrap_tau(const Array2D& cos_tau, const Array2D& sin_tau);

struct Sinogram {
    std::size_t n_slices = 0, n_angles = 0, n_offsets = 0;
    double offset_min = 0.0, offset_max = 0.0;
    double z_min = 0.0, z_max = 0.0;
    double e0 = 0.0;
    std::vector<double> data;   // [slice][angle][offset]

    Sinogram() = default;
    Sinogram(std::size_t ns, std::size_t na, std::size_t no)
        : n_slices(ns), n_angles(na), n_offsets(no), data(ns * na * no, 0.0) {}
    double& at(std::size_t s, std::size_t a, std::size_t o) {
        return data[(s * n_angles + a) * n_offsets + o];
    }
    double at(std::size_t s, std::size_t a, std::size_t o) const {
        return data[(s * n_angles + a) * n_offsets + o];
    }
    double angle(std::size_t a) const { return M_PI * double(a) / double(n_angles); }
    double offset(std::size_t o) const {
        return offset_min + (offset_max - offset_min) * double(o) / double(n_offsets - 1);
    }
    double slice_z(std::size_t s) const {
        return n_slices == 1 ? z_min
                             : z_min + (z_max - z_min) * double(s) / double(n_slices - 1);
    }
};

/** Line-integral data g = 2 tau / e0^2 from per-angle tau fields indexed
 *  (offset, slice). Throws when e0 = 0 (no retardation signal). */
Sinogram assemble_sinogram(const std::vector<Array2D>& tau_per_angle, double e0,
                           double offset_min, double offset_max, double z_min, double z_max);

/**
 * Slice-by-slice 2D filtered backprojection: ramp filter |nu| with
 * raised-cosine apodization in the frequency domain of each projection,
 * then backprojection with linear interpolation. Output is a gridded
 * field with n_pixels^2 nodes per slice covering the offset square.
 * Throws when fewer than 8 angles are supplied.
 */
SusceptibilityField fbp_reconstruct(const Sinogram& sinogram, std::size_t n_pixels = 0);

/** Closed-form geometric-optics trace at the detector point (R, p, z) in
 *  the canonical frame: the retardation is evaluated once, the carrier and
 *  envelope are exact. */
DetectorTrace synth_trace(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                          double detector_plane, double offset_p, double slice_z, double t0,
                          double t1, double dt);

struct ForwardModelSpec {
    std::size_t n_angles = 180;
    std::size_t n_offsets = 256;
    std::vector<double> slices_z{0.0};
    double e0 = 1.0;
    double h = 0.02;
    double detector_plane = 0.0;   // defaults to the support radius when 0
};

/** Full synthetic forward model: geometric-optics traces over angles,
 *  offsets and slices, windowed extraction, unwrapping, and sinogram
 *  assembly. */
Sinogram forward_sinogram(const SusceptibilityField& phantom, const BeamSpec& beam,
                          const ForwardModelSpec& spec);

} // namespace kerr

#endif
