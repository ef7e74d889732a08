#ifndef NORMSOL_THRESHOLDS_HPP
#define NORMSOL_THRESHOLDS_HPP

#include "normsol/params.hpp"

#include <optional>
#include <string>
#include <utility>

namespace normsol {

struct GroundStateProfile; // ode.hpp

// Sharp constants for one instance. Fields that do not apply to the regime
// are NaN (C', C'', alpha, R0, R1, t_bar are subcritical-only; alpha_bar is
// mass-critical-only).
struct ThresholdSet {
    double S = 0.0;        // optimal Sobolev constant
    double C_gn = 0.0;     // Gagliardo-Nirenberg constant C_{N,p,q}
    double C_prime = 0.0;  // C'
    double C_dprime = 0.0; // C''
    double alpha = 0.0;    // min(C', C'')
    double alpha_bar = 0.0;
    double R0 = 0.0, R1 = 0.0; // zeros of h
    double t_bar = 0.0;        // maximizer of the auxiliary phi in h's analysis
};

// S = ||grad U_1||_p^p / ||U_1||_{p*}^p from the explicit extremal profile by
// high-resolution radial quadrature with analytic power-law tail correction.
double sobolev_constant(int N, double p);

// Norms of the (un-cut) extremal U_eps with the normalization d_{N,p} applied:
// first = ||grad U_eps||_p^p, second = ||U_eps||_{p*}^{p*}.
std::pair<double, double> bubble_sharp_norms(int N, double p, double d_const,
                                             double eps = 1.0);

// GN constant from the converged ground state phi0:
// C_gn^q = ||phi0||_q^q / (||grad phi0||_p^{q gq} ||phi0||_p^{q(1-gq)}).
double gn_constant(const Params& prm, const GroundStateProfile& phi0);
double gn_constant_from_norms(const Params& prm, double A, double B, double mass_p);

// All threshold constants for the instance. Also verifies the structural
// comparison alpha <= beta_rhs behind the P^0 = emptyset argument.
ThresholdSet threshold_constants(const Params& prm, double S, double C_gn);

// mu-admissibility per regime: subcritical mu a^{q(1-gq)} < alpha,
// mass-critical mu a^{p^2/N} < q/(p C_gn^q), supercritical mu > 0.
Regime classify_regime(const Params& prm, const ThresholdSet& thr);

// Right-hand side of the contradiction bound whose comparison with alpha
// underpins P^0 emptiness.
double beta_contradiction_rhs(const Params& prm, double S, double C_gn);

// h(t) = t^p/p - (mu/q) C^q a^{q(1-gq)} t^{q gq} - t^{p*}/(p* S^{p*/p}).
double h_function(double t, const Params& prm, const ThresholdSet& thr);
std::pair<double, double> h_zeros(const Params& prm, const ThresholdSet& thr);

// C^1 cutoff: 1 on [0, R0], 0 on [R1, inf), cubic smoothstep between.
double tau_cutoff(double t, double R0, double R1);

double htilde_function(double t, const Params& prm, const ThresholdSet& thr);

// On-disk memo for (S, C_gn), keyed by parameters and resolution tag.
// Human-readable JSON, single-writer/multi-reader guarded.
class ThresholdCache {
  public:
    explicit ThresholdCache(std::string path);
    std::optional<double> lookup_S(int N, double p) const;
    std::optional<double> lookup_Cgn(int N, double p, double q,
                                     const std::string& res_tag) const;
    void store_S(int N, double p, double S);
    void store_Cgn(int N, double p, double q, const std::string& res_tag, double C_gn);

  private:
    std::string path_;
};

} // namespace normsol

#endif
