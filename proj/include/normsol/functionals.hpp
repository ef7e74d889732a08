#ifndef NORMSOL_FUNCTIONALS_HPP
#define NORMSOL_FUNCTIONALS_HPP

#include "normsol/params.hpp"
#include "normsol/radial.hpp"

#include <optional>

namespace normsol {

struct ThresholdSet; // thresholds.hpp

// E_mu(u) = A/p - mu B/q - C/p*.
double energy(const NormTriple& t, const Params& prm);
double energy(const RadialFunction& u, const Params& prm);

// P_mu(u) = A - mu gamma_q B - C. Same arithmetic path as psi(...,0).d1.
double pohozaev(const NormTriple& t, const Params& prm);
double pohozaev(const RadialFunction& u, const Params& prm);

struct PsiEval {
    double value; // Psi(s)   = (A/p) e^{ps} - (mu B/q) e^{q gq s} - (C/p*) e^{p* s}
    double d1;    // Psi'(s)  =  A e^{ps} - mu gq B e^{q gq s} - C e^{p* s}
    double d2;    // Psi''(s) = pA e^{ps} - mu q gq^2 B e^{q gq s} - p* C e^{p* s}
};

PsiEval psi(const NormTriple& t, double s, const Params& prm);

enum class FiberClass { TwoCritical, OneCritical, NoCritical };

const char* fiber_class_name(FiberClass c);

// Critical points and zeros of the fiber map s -> Psi(s).
// TwoCritical (subcritical coupling): s_u < c_u < t_u < d_u with
// Psi''(s_u) > 0 > Psi''(t_u). OneCritical: only t_u, a strict maximum.
struct FiberPoints {
    FiberClass cls = FiberClass::NoCritical;
    std::optional<double> s_u, t_u, c_u, d_u;
};

FiberPoints fiber_points(const NormTriple& t, const Params& prm);

struct LagrangeEval {
    double lambda;            // (A - mu B - C)/a^p
    double identity_residual; // |lambda a^p - mu (gq - 1) B| / (|lambda| a^p + eps)
};

LagrangeEval lagrange_multiplier(const NormTriple& t, const Params& prm);
LagrangeEval lagrange_multiplier(const RadialFunction& u, const Params& prm);

// Exact algebraic gradient of the discrete E_mu with respect to nodal values
// (last node pinned to 0). For p < 2 the flux is regularized as
// (g^2 + delta^2)^{(p-2)/2} g with delta = 1e-8 a / R_max.
RadialFunction discrete_energy_gradient(const RadialFunction& u, const Params& prm);

double regularization_delta(const Params& prm, const RadialGrid& g);

// Discrete energy consistent with discrete_energy_gradient (identical to
// energy() whenever p >= 2).
double discrete_energy(const RadialFunction& u, const Params& prm);

// E_tau(u) = A/p - mu B/q - tau(||grad u||_p) C/p*.
double truncated_energy(const RadialFunction& u, const Params& prm,
                        const ThresholdSet& thr);

} // namespace normsol

#endif
