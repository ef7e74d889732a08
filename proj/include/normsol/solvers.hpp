#ifndef NORMSOL_SOLVERS_HPP
#define NORMSOL_SOLVERS_HPP

#include "normsol/functionals.hpp"
#include "normsol/params.hpp"
#include "normsol/radial.hpp"
#include "normsol/thresholds.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace normsol {

enum class ManifoldSign { Plus, Minus };

struct SolverOptions {
    int max_iter = 50000;
    double tol_grad = 1e-8;     // projected-gradient norm <= tol_grad * max(1, A)
    double tol_pohozaev = 1e-3; // |P_mu|/A at convergence
    bool newton_polish = true;
    std::uint64_t seed = 1;
    int history_stride = 25;
    int verbose = 0;
};

struct SolverResult {
    RadialFunction profile;
    NormTriple triple;
    double lambda = 0.0;
    double level = 0.0;
    double pohozaev_residual = 0.0; // |P_mu|/A
    double grad_residual = 0.0;     // stationarity residual at exit
    ManifoldSign manifold_sign = ManifoldSign::Plus;
    int iterations = 0;
    bool converged = false;
    bool positivity_restart = false;
    std::string message;
    std::vector<double> grad_history;
};

// Local minimizer u^+ on A_{R0} (subcritical coupling below alpha): projected
// preconditioned descent on the mass sphere with backtracking, iterates pulled
// back inside A_{R0} by fiber rescaling toward s_u, bordered-Newton refinement
// of the stationarity system at the end.
SolverResult solve_local_min(const Params& prm, const ThresholdSet& thr,
                             std::shared_ptr<const RadialGrid> grid,
                             const SolverOptions& opt = {},
                             const RadialFunction* init = nullptr);

// Mountain-pass state u^-: minimizes E over the Pohozaev manifold by
// alternating fiber projection to the fiber maximum t_v and projected descent
// steps on the sphere, with the same Newton refinement.
SolverResult solve_mountain_pass(const Params& prm, const ThresholdSet& thr,
                                 std::shared_ptr<const RadialGrid> grid,
                                 const SolverOptions& opt = {},
                                 const RadialFunction* init = nullptr);

struct CertificateReport {
    double pohozaev_residual = 0.0;
    double lambda = 0.0;
    double lambda_identity_residual = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    bool nonnegative = false;
    bool radially_nonincreasing = false;
    FiberClass fiber_class = FiberClass::NoCritical;
    double fiber_point_at_solution = 0.0; // s_u for Plus results, t_u for Minus
    bool fiber_point_small = false;
    bool psi2_sign_matches = false;
    bool lambda_sign_ok = false; // mu > 0 requires lambda < 0; mu < 0 forces lambda > 0
    double grad_norm_p = 0.0;
    bool grad_exceeds_sobolev = false; // only meaningful when mu < 0 and S supplied
    bool pohozaev_ok = false;
    bool lambda_identity_ok = false;
    bool all_passed = false;
};

CertificateReport certify(const SolverResult& result, const Params& prm,
                          double S = std::numeric_limits<double>::quiet_NaN());

} // namespace normsol

#endif
