#ifndef NORMSOL_PARAMS_HPP
#define NORMSOL_PARAMS_HPP

#include <string>

namespace normsol {

struct Exponents {
    double gamma_q; // N(q-p)/(pq)
    double p_star;  // Np/(N-p)
};

// Valid for 1 < p < N and p <= q <= p*. The endpoints q = p (gamma_q = 0) and
// q = p* (gamma_q = 1) are admitted here so the algebraic identities can be
// exercised; Params itself enforces the strict range.
Exponents derive_exponents(int N, double p, double q);

enum class RegimeKind { Subcritical, MassCritical, Supercritical };

const char* regime_name(RegimeKind k);

// One problem instance (N, p, q, a, mu) with derived exponents.
// mu < 0 is accepted at construction (needed for the nonexistence checks);
// existence solvers reject it.
struct Params {
    int N;
    double p;
    double q;
    double a;
    double mu;
    double gamma_q;
    double p_star;

    Params(int N_, double p_, double q_, double a_, double mu_);

    double q_gamma_q() const { return q * gamma_q; }
    // q at which q*gamma_q = p.
    double mass_critical_q() const { return p + p * p / N; }

    Params with_mu(double new_mu) const { return Params(N, p, q, a, new_mu); }
    Params with_a(double new_a) const { return Params(N, p, q, new_a, mu); }
};

// Pure function of (N,p,q); MassCritical detected with relative tolerance
// 1e-9 on q - (p + p^2/N) so values near the critical line do not fall into
// the wrong solver branch.
RegimeKind classify_regime_kind(const Params& prm);

struct Regime {
    RegimeKind kind;
    bool mu_bound_ok;
};

} // namespace normsol

#endif
