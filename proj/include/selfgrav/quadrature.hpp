#pragma once

#include <cmath>
#include <functional>

#include "selfgrav/errors.hpp"

namespace selfgrav {

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
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

/// Adaptive Simpson quadrature of f over [a,b].
/// tol is an absolute tolerance on the result; endpoint cusps of power type
/// (1-s)^k are handled by the recursive subdivision.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 52) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive quadrature with a relative target: two passes, the first estimates
/// the magnitude, the second refines with an absolute tolerance scaled to it.
template <class F>
double integrate_rel(F&& f, double a, double b, double rel_tol = 1e-10) {
    const double coarse = integrate(f, a, b, 1e-8);
    const double scale = std::max(std::abs(coarse), 1e-300);
    return integrate(f, a, b, rel_tol * scale);
}

} // namespace selfgrav
