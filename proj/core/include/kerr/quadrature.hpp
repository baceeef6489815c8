#ifndef KERR_QUADRATURE_HPP
#define KERR_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace kerr {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/** Adaptive Simpson quadrature of f over [a, b] with absolute tolerance
 *  abs_tol. Starts from two panels so a symmetric node pattern cannot fool
 *  the initial estimate; bisection bottoms out at max_depth. */
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    return detail::adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, max_depth) +
           detail::adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, max_depth);
}

/** Trapezoid rule on uniformly spaced samples. */
inline double trapezoid(const std::vector<double>& values, double dx) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * dx;
}

} // namespace kerr

#endif
