#ifndef NORMSOL_QUAD_HPP
#define NORMSOL_QUAD_HPP

#include <functional>
#include <vector>

namespace normsol {

// Composite Gauss-Legendre quadrature for closed-form radial integrands.
// Panels are placed geometrically so profiles with widely separated scales
// (bubble cores, cut-off ramps) stay resolved.

// 16-point Gauss-Legendre on [a, b].
double gauss16(const std::function<double(double)>& f, double a, double b);

// Integrate f over [a, b] with n geometric panels (a > 0) or with one linear
// panel prepended when a == 0.
double integrate_log_panels(const std::function<double(double)>& f, double a, double b,
                            int panels);

// Integrate f over [0, b]: linear panels on [0, b0], geometric on [b0, b].
double integrate_radial(const std::function<double(double)>& f, double b0, double b,
                        int lin_panels, int log_panels);

} // namespace normsol

#endif
