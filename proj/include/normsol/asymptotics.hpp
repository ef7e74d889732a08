#ifndef NORMSOL_ASYMPTOTICS_HPP
#define NORMSOL_ASYMPTOTICS_HPP

#include "normsol/ode.hpp"
#include "normsol/params.hpp"
#include "normsol/regression.hpp"
#include "normsol/solvers.hpp"
#include "normsol/thresholds.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace normsol {

struct SweepRecord {
    double mu = 0.0;
    double lambda = 0.0;
    double grad_norm_p = 0.0; // A
    double level = 0.0;       // m estimate
    double q_norm = 0.0;      // B
    bool converged = false;
};

struct SlopeCheck {
    LinearFit fit;
    double target = 0.0;
    bool within_10pct = false;
    bool r2_ok = false; // R^2 >= 0.98 after the retry policy
};

struct ExponentReport {
    std::vector<SweepRecord> records; // sorted by mu
    SlopeCheck lambda_slope;          // log(-lambda) vs log(abscissa)
    SlopeCheck grad_slope;            // log A
    SlopeCheck qnorm_slope;           // log B
    // Monotone trend of the level along the sweep (direction depends on the sweep).
    bool level_trend_ok = false;
    // Sup-norm gap to phi0 of the rescaled profile at each point (when tracked).
    std::vector<double> profile_gaps;
    bool profile_gap_decreasing = false;
    std::string note;
};

struct SweepOptions {
    int grid_M = 512;
    double grid_kappa = 5.0;
    double base_R_max = 50.0;
    bool adapt_grid = true;   // scale R_max with the expected profile width
    bool warm_start = true;
    bool track_limit_profile = false;
    SolverOptions solver;
};

// mu -> 0^+ in the subcritical regime: solves u^+ per mu, regresses
// log(-lambda), log A, log B against log mu; targets p/(p - q gq) and
// q gq/(p - q gq).
ExponentReport sweep_mu_to_zero(const Params& tmpl, const std::vector<double>& mu_grid,
                                const ThresholdSet& thr, const GroundStateProfile* phi0,
                                const SweepOptions& opt = {});

// mu -> alpha_bar^- in the mass-critical regime: abscissa alpha_bar - mu,
// targets (N-p)/p; also checks m^- -> 0.
ExponentReport sweep_mu_to_alpha_bar(const Params& tmpl,
                                     const std::vector<double>& mu_grid,
                                     const ThresholdSet& thr,
                                     const GroundStateProfile* phi0,
                                     const SweepOptions& opt = {});

// mu -> +infinity in the supercritical regime: targets -p/(q gq - p) and
// -q gq/(q gq - p); m^- non-increasing.
ExponentReport sweep_mu_to_infinity(const Params& tmpl,
                                    const std::vector<double>& mu_grid,
                                    const ThresholdSet& thr,
                                    const GroundStateProfile* phi0,
                                    const SweepOptions& opt = {});

struct NonexistenceReport {
    int triples_checked = 0;
    int triples_violating = 0; // should stay 0
    double min_grad_excess = 0.0;   // min over samples of A - S^{N/p}
    double min_energy_excess = 0.0; // min over samples of E - S^{N/p}/N
    int flow_runs = 0;
    int flow_stationary_hits = 0; // certified critical points found (expected 0)
    std::string note;
};

// mu < 0: (i) property check on synthetic Sobolev-consistent Pohozaev triples
// (A > S^{N/p}, E > S^{N/p}/N); (ii) gradient-flow searches from random seeds
// reporting that no certified critical point is located. Empirical, not a proof.
NonexistenceReport nonexistence_scan(const Params& tmpl,
                                     const std::vector<double>& mu_negative_grid,
                                     double S, int triples_per_mu = 1000,
                                     int flow_seeds = 50, std::uint64_t seed = 1);

// Unboundedness probe for sup ||grad u||_p^p / ||u||_q^q over the mass sphere:
// slowly-decaying profiles (1+r^2)^{-a} truncated at growing radii. Returns
// the largest ratio found and whether each requested bound was exceeded.
struct RatioProbe {
    double best_ratio = 0.0;
    std::vector<double> bounds;
    std::vector<bool> exceeded;
};

RatioProbe probe_grad_q_ratio_unbounded(const Params& prm,
                                        const std::vector<double>& bounds);

} // namespace normsol

#endif
