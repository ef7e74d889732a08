#ifndef NORMSOL_ROOTFIND_HPP
#define NORMSOL_ROOTFIND_HPP

#include "normsol/errors.hpp"

#include <cmath>
#include <functional>

namespace normsol {

// Bracketed bisection/secant hybrid. Requires f(a) f(b) <= 0; refines to
// |b-a| <= xtol*(1+|a|+|b|) or |f| <= ftol.
inline double find_root(const std::function<double(double)>& f, double a, double b,
                        double fa, double fb, double xtol = 1e-14, double ftol = 0.0,
                        int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw numerical_error("find_root: endpoints do not bracket");
    double x = a, fx = fa;
    for (int it = 0; it < max_iter; ++it) {
        // Secant proposal, fall back to midpoint when outside or degenerate.
        double m = 0.5 * (a + b);
        double xs = (fb != fa) ? (a - fa * (b - a) / (fb - fa)) : m;
        if (!(xs > std::min(a, b) && xs < std::max(a, b))) xs = m;
        // Alternate to keep worst-case bisection convergence.
        x = (it % 2 == 0) ? xs : m;
        fx = f(x);
        if (fx == 0.0 || std::fabs(fx) <= ftol) return x;
        if (fa * fx < 0.0) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        if (std::fabs(b - a) <= xtol * (1.0 + std::fabs(a) + std::fabs(b)))
            return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
}

inline double find_root(const std::function<double(double)>& f, double a, double b,
                        double xtol = 1e-14, double ftol = 0.0, int max_iter = 200) {
    return find_root(f, a, b, f(a), f(b), xtol, ftol, max_iter);
}

} // namespace normsol

#endif
