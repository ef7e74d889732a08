#include "normsol/quad.hpp"
#include "normsol/errors.hpp"

#include <cmath>

namespace normsol {

namespace {
// Abscissas/weights for 16-point Gauss-Legendre on [-1, 1].
const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                        0.9445750230732326, 0.9894009349916499};
const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                        0.0622535239386479, 0.0271524594117541};
} // namespace

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += gl_w[i] * (f(c - h * gl_x[i]) + f(c + h * gl_x[i]));
    return s * h;
}

double integrate_log_panels(const std::function<double(double)>& f, double a, double b,
                            int panels) {
    if (!(b > a) || !(a > 0.0) || panels < 1)
        throw parameter_error("integrate_log_panels: need 0 < a < b");
    const double la = std::log(a), lb = std::log(b);
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double x0 = std::exp(la + (lb - la) * k / panels);
        const double x1 = std::exp(la + (lb - la) * (k + 1) / panels);
        s += gauss16(f, x0, x1);
    }
    return s;
}

double integrate_radial(const std::function<double(double)>& f, double b0, double b,
                        int lin_panels, int log_panels) {
    if (!(b > b0) || !(b0 > 0.0))
        throw parameter_error("integrate_radial: need 0 < b0 < b");
    double s = 0.0;
    for (int k = 0; k < lin_panels; ++k)
        s += gauss16(f, b0 * k / lin_panels, b0 * (k + 1) / lin_panels);
    return s + integrate_log_panels(f, b0, b, log_panels);
}

} // namespace normsol
