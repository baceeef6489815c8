#ifndef KERR_PROFILES_HPP
#define KERR_PROFILES_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "kerr/geometry.hpp"
#include "kerr/media.hpp"
#include "kerr/smooth.hpp"

namespace kerr {

using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;

/**
 * Beam initial data in the canonical frame (propagation along e1, bias
 * field along e3). The transverse envelope comes from the stream-function
 * potential rho(x2, x3) = (-a2 x3 + a3 x2) m(r), so
 *
 *     U_init = (0, -d3 rho, d2 rho) * w(x1)
 *
 * is divergence free and orthogonal to e1 by construction, and equals
 * (0, a2, a3) inside the core r <= core_radius. The longitudinal window w
 * keeps the support compact and away from the susceptibility region.
 */
struct BeamSpec {
    double a2 = 1.0, a3 = 1.0;
    PlateauWindow transverse;     // m(r): 1 on core, 0 beyond outer radius
    PlateauWindow longitudinal;   // w(|x1 - launch|)
    double launch = 0.0;          // center of the longitudinal window
    double h = 0.01;

    Vec3 u_init(const Vec3& x) const;
    /** d/dx1 and d^2/dx1^2 of u_init (only the window depends on x1). */
    Vec3 u_init_d1(const Vec3& x) const;
    Vec3 u_init_d2(const Vec3& x) const;

    double core_radius() const { return transverse.inner(); }
    double support_min_x1() const { return launch - longitudinal.outer(); }
    double support_max_x1() const { return launch + longitudinal.outer(); }

  private:
    Vec3 transverse_part(double x2, double x3) const;
};

BeamSpec make_beam(double a2, double a3, double core_radius, double outer_radius, double h,
                   double launch = 0.0, double window_inner = 0.5, double window_outer = 1.5);

/** The two counter-propagating halves of the linear splitting:
 *  a_in(t,x) = U_init(x - t w)/2 and a_out(t,x) = U_init(x + t w)/2. */
struct SplitBeam {
    const BeamSpec* beam;
    Direction omega;
    Vec3 a_in(double t, const Vec3& x) const { return 0.5 * beam->u_init(x - t * omega.vec()); }
    Vec3 a_out(double t, const Vec3& x) const { return 0.5 * beam->u_init(x + t * omega.vec()); }
};

SplitBeam split_initial(const BeamSpec& beam, const Direction& omega = Direction::e1());

/** Free two-wave superposition (the leading beam with no bias field and no
 *  nonlinearity): U_init(x-tw) cos(phi_in/h) + U_init(x+tw) cos(phi_out/h). */
Vec3 dalembert_leading_field(const BeamSpec& beam, const Direction& omega, double t,
                             const Vec3& x);

/**
 * Leading complex amplitude on one characteristic line. The transport
 * system is diagonal with purely imaginary generator, so each component
 * only rotates:
 *
 *     A_j(s) = A_j(0) exp(-i m_j tau(s)),  (m_1, m_2, m_3) = (1, 1, 3)
 *
 * in the frame (omega, e3 x omega, e3). Moduli are conserved and A stays
 * orthogonal to omega.
 */
class RayProfileU0 {
  public:
    RayProfileU0(const Vec3& initial, RetardationProfile retardation);

    /** Cartesian complex amplitude at arclength s. */
    CVec3 amplitude(double s) const;
    /** Components in the transport frame: (perp, e3) with perp = e3 x omega. */
    std::pair<Complex, Complex> amplitude_frame(double s) const;

    /** Amplitude before any retardation has accumulated (real U_init). */
    CVec3 initial() const;
    const RetardationProfile& retardation() const { return tau_; }
    const Ray& ray() const { return tau_.ray(); }
    /** The zero harmonic of the leading profile vanishes identically. */
    static constexpr bool zero_mode_vanishes = true;

  private:
    Vec3 operp_;              // e3 x omega
    double init_perp_ = 0.0;  // U_init . operp
    double init_e3_ = 0.0;    // U_init . e3
    RetardationProfile tau_;
};

/** Transport the beam's initial amplitude along the ray through the
 *  susceptibility field. Requires omega.e3 = 0 (bias field along e3). */
RayProfileU0 propagate_U0(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                          const Ray& ray);

/** Physical leading field at (t, x):
 *  h^(1/2) e0 e3 + h^(3/2)(0, U2 cos(phi/h + tau), U3 cos(phi/h + 3 tau))
 *  with U = U_init(x - t w) and tau the retardation accumulated up to x. */
Vec3 evaluate_leading_field(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                            const Direction& omega, double t, const Vec3& x);

struct Ellipse {
    double half_major = 0.0;
    double half_minor = 0.0;
    double orientation = 0.0;   // angle of the major axis, in (-pi/2, pi/2]
};

/** Ellipse traced by theta -> (Re(A2 e^{i theta}), Re(A3 e^{i theta})). */
Ellipse polarization_ellipse(Complex A2, Complex A3);

/** One Fourier mode of a higher-order profile on a ray. */
struct ModeSolution {
    int order = 0;      // profile order k+1
    int ell = 0;        // mode index, 0 < |ell| <= k+2
    double s0 = 0.0, ds = 0.0;
    std::vector<CVec3> values;
};

struct ModeSource {
    int ell = 0;
    double s0 = 0.0, ds = 0.0;
    std::vector<CVec3> samples;
};

/**
 * Quadrature solution of the non-zero-mode profile equations at order k:
 *
 *   U^(l)(s) = (i / 2l) Int_0^s diag(e^{i l Dtau}, e^{i l Dtau}, e^{3 i l Dtau}) f^(l)(sigma) dsigma,
 *
 * Dtau = tau(s) - tau(sigma), with zero data at the first sample. Composite
 * Simpson at the source sampling. Requests for l = 0 are refused; the zero
 * harmonic satisfies a wave equation instead (solve_zero_harmonic).
 */
std::vector<ModeSolution> solve_nonzero_modes(int k, const std::vector<ModeSource>& sources,
                                              const RetardationProfile& retardation);

/** Zero-harmonic profile C_k on a space-time grid. */
struct ZeroHarmonic {
    int order = 0;
    Grid3D grid;
    double dt = 0.0;
    VectorField final;                    // C at the last time level
    std::vector<VectorField> history;     // all levels when requested
    std::vector<double> sup_norm;         // max |C| per step
    double divergence_residual = 0.0;     // max |d2/dt2 div C - div F|
};

/** Space-time sampling of a source on grid nodes, one VectorField per
 *  time level t_n = n dt. */
struct SpaceTimeField {
    Grid3D grid;
    double dt = 0.0;
    std::vector<VectorField> levels;
};

/**
 * Theta-average source of the first nonvanishing zero harmonic (order two):
 * the quadratic interaction of the leading profile with the bias field,
 *
 *  -chi ( 2|dt U0|^2 E0 + 2(U0 . dtt U0) E0 + 2(E0 . dtt U0) U0
 *         + 4(E0 . dt U0) dt U0 + 2(E0 . U0) dtt U0 )^{0},
 *
 * computed exactly on the finite Fourier series of U0. Identically zero
 * when e0 = 0 or chi = 0. Orders zero and one have no source at all.
 */
Vec3 c2_source_at(const BeamSpec& beam, const SusceptibilityField& field, double e0, double t,
                  const Vec3& x);

SpaceTimeField sample_c2_source(const BeamSpec& beam, const SusceptibilityField& field, double e0,
                                const Grid3D& grid, double dt, std::size_t n_steps);

/** Zero source of orders k = 0, 1 (identically zero fields, kept for the
 *  bookkeeping of the solve). */
SpaceTimeField sample_ck_source_low_order(int k, const Grid3D& grid, double dt,
                                          std::size_t n_steps);

/**
 * Leapfrog solve of  dtt C - Lap C = F - grad I2,  I2 = double time
 * integral of div F, with zero initial data. The divergence reduction and
 * the componentwise Laplacian are built from the same centered first
 * difference, which makes the discrete identity  dtt div C = div F  hold
 * to roundoff; its residual is recorded. Throws CflError when
 * dt > 0.9 dx / sqrt(3).
 */
ZeroHarmonic solve_zero_harmonic(const SpaceTimeField& source, int order = 2,
                                 bool keep_history = false);

} // namespace kerr

#endif
