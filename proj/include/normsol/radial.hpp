#ifndef NORMSOL_RADIAL_HPP
#define NORMSOL_RADIAL_HPP

#include "normsol/params.hpp"

#include <memory>
#include <vector>

namespace normsol {

// Radial discretization of W^{1,p}(R^N): nodes r_0 = 0 < r_1 < ... < r_M = R_max
// with geometric spacing concentrating resolution at the origin, composite
// midpoint quadrature with the cell weights \int_{r_i}^{r_{i+1}} s^{N-1} ds
// integrated in closed form.
struct RadialGrid {
    int N = 0;
    double R_max = 0.0;
    double kappa = 0.0;
    std::vector<double> r;           // M+1 nodes
    std::vector<double> cell_weight; // M weights (r_{i+1}^N - r_i^N)/N
    double surface_const = 0.0;      // omega_{N-1} = 2 pi^{N/2} / Gamma(N/2)

    int cells() const { return static_cast<int>(cell_weight.size()); }
    int nodes() const { return static_cast<int>(r.size()); }

    // r_i = R_max (e^{kappa i/M} - 1)/(e^kappa - 1); M >= 64 required.
    static std::shared_ptr<const RadialGrid> geometric(int N, int M, double R_max,
                                                       double kappa = 4.0);

    // Largest |s| for which fiber_rescale keeps the profile resolved.
    double s_cap() const;
};

// Nodal values on a shared grid; u(R_max) = 0 is the compact-support
// truncation of decaying profiles.
struct RadialFunction {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> values;

    RadialFunction() = default;
    explicit RadialFunction(std::shared_ptr<const RadialGrid> g)
        : grid(std::move(g)), values(grid->nodes(), 0.0) {}
    RadialFunction(std::shared_ptr<const RadialGrid> g, std::vector<double> v)
        : grid(std::move(g)), values(std::move(v)) {}
};

// ||u||_r^r = omega_{N-1} \int |u|^r s^{N-1} ds, composite midpoint rule.
double lr_norm(const RadialFunction& u, double r_exp);

// ||grad u||_p^p via forward differences on cell midpoints. This is the exact
// discrete Dirichlet energy differentiated by the solvers.
double grad_lp_norm(const RadialFunction& u, double p);

// v = (a/||u||_p) u with ||v||_p^p = a^p.
RadialFunction mass_normalize(const RadialFunction& u, double p, double a);

// s * u = e^{Ns/p} u(e^s .) resampled by monotone cubic interpolation, then
// re-normalized to the original L^p mass exactly.
RadialFunction fiber_rescale(const RadialFunction& u, double s, const Params& prm);

struct NormTriple {
    double A = 0.0; // ||grad u||_p^p
    double B = 0.0; // ||u||_q^q
    double C = 0.0; // ||u||_{p*}^{p*}
};

NormTriple norm_triple(const RadialFunction& u, const Params& prm);

// Fraction of the L^p mass carried by the last decade [R_max/10, R_max];
// > 1e-6 indicates an under-resolved tail.
double tail_mass_fraction(const RadialFunction& u, double p);

// Monotone piecewise-cubic (Fritsch-Carlson) interpolant on an arbitrary
// strictly increasing abscissa set; evaluates to 0 beyond the last node.
class PchipInterpolant {
  public:
    PchipInterpolant(const std::vector<double>& x, const std::vector<double>& y);
    double operator()(double xq) const;

  private:
    std::vector<double> x_, y_, m_;
};

} // namespace normsol

#endif
