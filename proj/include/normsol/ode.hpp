#ifndef NORMSOL_ODE_HPP
#define NORMSOL_ODE_HPP

#include "normsol/params.hpp"
#include "normsol/radial.hpp"

#include <string>
#include <vector>

namespace normsol {

// Converged radial ground state phi_0 of  -Delta_p u + u^{p-1} = u^{q-1},
// obtained by shooting on u(0) = beta.
struct GroundStateProfile {
    RadialFunction profile;
    double beta_star = 0.0; // converged shooting height u(0)
    NormTriple norms;       // A, B, C on the sampling grid
    double mass_p = 0.0;    // ||phi0||_p^p
    double residual = 0.0;  // sup-norm ODE residual relative to the max nonlinear term
    bool converged = false;
    std::string message;
};

struct ShootOptions {
    double r_end = 40.0;     // integrate on (0, r_end]
    double ode_tol = 1e-11;  // adaptive RK tolerance
    double beta_max = 64.0;  // bracket search ceiling for u(0)
    int max_bisect = 200;
    double decay_floor = 1e-10;
};

// Integrates (r^{N-1} |u'|^{p-2} u')' = r^{N-1} (u^{p-1} - u^{q-1}) from the
// origin (series bootstrap for the singular radial term) and bisects beta
// between overshoot (u crosses 0) and undershoot (u' turns positive while
// u > 0) until the profile decays monotonically. The result is sampled onto
// `grid` by cubic Hermite interpolation of the dense integrator output.
GroundStateProfile shoot_ground_state(int N, double p, double q,
                                      std::shared_ptr<const RadialGrid> grid,
                                      const ShootOptions& opt = {});

enum class ScalingLimit { MuToZeroPlus, MuToAlphaBar, MuToInfinity };

struct LimitRescale {
    RadialFunction rescaled; // on phi0's grid, directly comparable to phi0
    double sigma0 = 0.0;
};

// Applies the limit-profile change of variables for the matching regime.
// MuToZeroPlus / MuToInfinity use the closed-form
//   sigma0 = (a^p/||phi0||_p^p)^{p(q-p)/(p^2 - N(q-p))};
// MuToAlphaBar (mass-critical, where that exponent degenerates) takes sigma0
// from the multiplier limit sigma0 = -lambda s_mu^p supplied by the caller.
LimitRescale rescale_to_limit_profile(const RadialFunction& u, const Params& prm,
                                      ScalingLimit scaling,
                                      const GroundStateProfile& phi0,
                                      double alpha_bar = 0.0, double lambda = 0.0);

} // namespace normsol

#endif
