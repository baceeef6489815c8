#ifndef KERR_SMOOTH_HPP
#define KERR_SMOOTH_HPP

#include <cmath>

namespace kerr {

// C-infinity transition built from f(t) = exp(-1/t). All pieces vanish with
// all derivatives at the junctions, so fields assembled from these windows
// have genuinely compact support.

namespace detail {
inline double expm(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
inline double expm_d1(double t) { return t > 0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
inline double expm_d2(double t) {
    return t > 0 ? std::exp(-1.0 / t) * (1.0 / (t * t * t * t) - 2.0 / (t * t * t)) : 0.0;
}
} // namespace detail

/** Smooth descending step: 1 for u <= 0, 0 for u >= 1. */
inline double smoothstep_down(double u) {
    if (u <= 0) return 1.0;
    if (u >= 1) return 0.0;
    const double g = detail::expm(1 - u), q = detail::expm(u);
    return g / (g + q);
}

inline double smoothstep_down_d1(double u) {
    if (u <= 0 || u >= 1) return 0.0;
    const double g = detail::expm(1 - u), q = detail::expm(u);
    const double gp = -detail::expm_d1(1 - u), qp = detail::expm_d1(u);
    const double den = g + q;
    return (gp * q - g * qp) / (den * den);
}

inline double smoothstep_down_d2(double u) {
    if (u <= 0 || u >= 1) return 0.0;
    const double g = detail::expm(1 - u), q = detail::expm(u);
    const double gp = -detail::expm_d1(1 - u), qp = detail::expm_d1(u);
    const double gpp = detail::expm_d2(1 - u), qpp = detail::expm_d2(u);
    const double den = g + q;
    const double num = gp * q - g * qp;
    const double nump = gpp * q - g * qpp;
    return (nump * den - 2.0 * num * (gp + qp)) / (den * den * den);
}

/** Radial plateau window: 1 for |r| <= r_inner, 0 for |r| >= r_outer,
 *  smoothly decreasing in between. Symmetric in r. */
class PlateauWindow {
  public:
    PlateauWindow() = default;
    PlateauWindow(double r_inner, double r_outer) : ri_(r_inner), ro_(r_outer) {
        if (!(0 <= r_inner && r_inner < r_outer))
            throw std::invalid_argument("PlateauWindow: need 0 <= r_inner < r_outer");
    }
    double inner() const { return ri_; }
    double outer() const { return ro_; }

    double operator()(double r) const { return smoothstep_down(arg(r)); }
    double d1(double r) const {
        const double sgn = r < 0 ? -1.0 : 1.0;
        return smoothstep_down_d1(arg(r)) * sgn / (ro_ - ri_);
    }
    double d2(double r) const {
        return smoothstep_down_d2(arg(r)) / ((ro_ - ri_) * (ro_ - ri_));
    }

  private:
    double arg(double r) const { return (std::abs(r) - ri_) / (ro_ - ri_); }
    double ri_ = 0.0, ro_ = 1.0;
};

} // namespace kerr

#endif
