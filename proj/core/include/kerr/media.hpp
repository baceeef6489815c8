#ifndef KERR_MEDIA_HPP
#define KERR_MEDIA_HPP

#include <memory>
#include <optional>
#include <vector>

#include "kerr/geometry.hpp"
#include "kerr/smooth.hpp"

namespace kerr {

struct GaussianBump {
    double amplitude = 1.0;
    Vec3 center{};
    double width = 1.0;   // Gaussian sigma
};

/**
 * The cubic susceptibility coefficient chi(x), compactly supported in the
 * ball |x| < support_radius. Two representations:
 *
 *   - analytic: a sum of Gaussian bumps multiplied by a smooth radial
 *     cutoff that is identically 1 for |x| <= 0.9 R and 0 for |x| >= R,
 *     so the support condition holds exactly;
 *   - gridded: trilinear interpolation of node samples, zero outside the
 *     grid (phantoms keep their support strictly inside).
 *
 * Amplitudes are order one; physical unit juggling is left to the caller.
 */
class SusceptibilityField {
  public:
    static SusceptibilityField analytic(std::vector<GaussianBump> bumps,
                                        double support_radius, double domain_radius);
    static SusceptibilityField gridded(Grid3D grid, ScalarField samples,
                                       double support_radius, double domain_radius);
    static SusceptibilityField zero(double domain_radius = 1.0);

    double operator()(const Vec3& x) const;

    bool is_zero() const { return !grid_ && bumps_.empty(); }
    bool is_gridded() const { return bool(grid_); }
    double support_radius() const { return support_radius_; }
    double domain_radius() const { return domain_radius_; }
    /** Center of the support ball; the origin except for translated fields. */
    const Vec3& support_center() const { return support_center_; }
    const std::vector<GaussianBump>& bumps() const { return bumps_; }
    const Grid3D& grid() const;
    const ScalarField& samples() const;

    /** Shift the whole field by v (bump centers translate). Analytic only. */
    SusceptibilityField translated(const Vec3& v) const;

    /** Rotate the field by alpha about e3 (bump centers rotate, the radial
     *  cutoff is invariant). Analytic only. */
    SusceptibilityField rotated_about_e3(double alpha) const;

  private:
    SusceptibilityField() = default;

    std::vector<GaussianBump> bumps_;
    PlateauWindow cutoff_;
    std::optional<Grid3D> grid_;
    ScalarField samples_;
    Vec3 support_center_{};
    double support_radius_ = 1.0;
    double domain_radius_ = 2.0;
};

/**
 * Accumulated phase retardation along one ray,
 *
 *     tau(s) = (1/2) e0^2 * integral of chi over the ray up to s,
 *
 * with the lower limit clipped to the ray's entry into the support ball.
 * Evaluation runs adaptive quadrature per call (abs tol 1e-10); tau is
 * constant once the ray has left the support.
 */
class RetardationProfile {
  public:
    RetardationProfile(const SusceptibilityField& field, double e0_magnitude, Ray ray);

    double operator()(double s) const { return tau(s); }
    double tau(double s) const;
    double tau_infinity() const { return tau_infinity_; }
    const Ray& ray() const { return ray_; }
    double e0() const { return e0_; }

    /** Parameter interval [enter, exit] of the support chord, empty when
     *  the ray misses the support ball. */
    std::optional<std::pair<double, double>> support_chord() const { return chord_; }

  private:
    const SusceptibilityField* field_;
    double e0_;
    Ray ray_;
    std::optional<std::pair<double, double>> chord_;
    double tau_infinity_ = 0.0;
};

/** tau evaluated over the whole line through the support: returns the
 *  profile with the chord precomputed. */
RetardationProfile retardation(const SusceptibilityField& field, double e0_magnitude,
                               const Ray& ray);

/** Full line integral of chi over {y + s*omega}. */
double xray_transform(const SusceptibilityField& field, const Direction& omega, const Vec3& y);

/** Retardation accumulated from the ray entry up to the point x, for the
 *  line through x with direction omega. Equals tau_infinity once x is past
 *  the support. */
double tau_at(const SusceptibilityField& field, double e0_magnitude,
              const Direction& omega, const Vec3& x);

/** Parameter interval where the line y + s*omega meets |x| <= radius. */
std::optional<std::pair<double, double>> ball_chord(const Vec3& y, const Direction& omega,
                                                    double radius);

} // namespace kerr

#endif
