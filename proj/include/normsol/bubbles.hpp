#ifndef NORMSOL_BUBBLES_HPP
#define NORMSOL_BUBBLES_HPP

#include "normsol/params.hpp"
#include "normsol/radial.hpp"
#include "normsol/regression.hpp"

#include <vector>

namespace normsol {

// d_{N,p} normalizing U_{eps} = d eps^{(N-p)/(p(p-1))}(eps^{p'} + r^{p'})^{(p-N)/p}
// so that -Delta_p U = U^{p*-1}; determined by minimizing the discrete ODE
// residual over the scalar d.
struct BubbleFit {
    double d_const = 0.0;
    double residual = 0.0; // sup residual relative to the max nonlinear term
};

BubbleFit bubble_d_const(int N, double p);

// Residual of the fitted profile at a given (d, eps) pair; used by the scale
// covariance checks.
double bubble_ode_residual(int N, double p, double d_const, double eps);

double bubble_value(int N, double p, double d_const, double eps, double r);

// Cut-off test function u_eps = phi U_eps with phi = 1 on B_1, 0 outside B_2
// (cubic smoothstep ramp), sampled on a grid.
RadialFunction cutoff_bubble_profile(std::shared_ptr<const RadialGrid> grid, int N,
                                     double p, double d_const, double eps);

struct AppendixRow {
    double eps = 0.0;
    double grad_p = 0.0;               // ||grad u_eps||_p^p
    double crit = 0.0;                 // ||u_eps||_{p*}^{p*}
    std::vector<double> r_norms;       // ||u_eps||_r^r for the requested r list
};

struct AppendixTable {
    std::vector<double> r_list;
    std::vector<AppendixRow> rows;
    double eps_floor = 0.0; // smallest usable eps for the quadrature resolution
    bool eps_floor_hit = false;
};

// High-resolution quadrature of the cut-off bubble norms for each eps.
// Rows are independent; threads > 1 evaluates them concurrently (the output
// order and values are identical either way).
AppendixTable appendix_norms(int N, double p, const std::vector<double>& eps_list,
                             const std::vector<double>& r_list, int threads = 1);

enum class RNormCase { ScaleDominated, Logarithmic, TailDominated };

struct RNormLaw {
    RNormCase kind;
    double exponent;    // predicted power of eps (log case: the power beside |log eps|)
    double boundary_r;  // N(p-1)/(N-p)
};

// Three-case law for ||u_eps||_r^r as eps -> 0.
RNormLaw classify_r_norm_law(int N, double p, double r);

struct AppendixRegression {
    LinearFit grad_correction;   // slope of log|S^{N/p} - grad| vs log eps
    double grad_target;          // (N-p)/(p-1)
    std::vector<LinearFit> r_fits;
    std::vector<RNormLaw> r_laws;
    std::vector<double> log_ratio_spread; // for log-case rows: max/min ratio - 1
    bool law_mismatch = false;
};

AppendixRegression appendix_regression(int N, double p, const AppendixTable& table,
                                       double S_Np);

// n mass-normalized profiles (1+r^2)^k on disjoint annuli around radii 2kR.
// The cut-off ramps leave a gap of R/8 at each annulus edge so the discrete
// supports are cell-disjoint and the l^p mass additivity is exact.
std::vector<RadialFunction> gengeqn_family(int n, double R, const Params& prm,
                                           std::shared_ptr<const RadialGrid> grid);

} // namespace normsol

#endif
