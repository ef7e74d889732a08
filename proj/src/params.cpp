#include "normsol/params.hpp"
#include "normsol/errors.hpp"

#include <cmath>
#include <sstream>

namespace normsol {

Exponents derive_exponents(int N, double p, double q) {
    if (N < 2) throw parameter_error("derive_exponents: N >= 2 violated");
    if (!(p > 1.0)) throw parameter_error("derive_exponents: p > 1 violated");
    if (!(p < N)) throw parameter_error("derive_exponents: p < N violated");
    const double p_star = static_cast<double>(N) * p / (N - p);
    if (!(q >= p)) throw parameter_error("derive_exponents: q >= p violated");
    if (!(q <= p_star)) throw parameter_error("derive_exponents: q <= p* violated");
    const double gamma_q = static_cast<double>(N) * (q - p) / (p * q);
    return {gamma_q, p_star};
}

const char* regime_name(RegimeKind k) {
    switch (k) {
        case RegimeKind::Subcritical: return "subcritical";
        case RegimeKind::MassCritical: return "mass-critical";
        case RegimeKind::Supercritical: return "supercritical";
    }
    return "?";
}

Params::Params(int N_, double p_, double q_, double a_, double mu_)
    : N(N_), p(p_), q(q_), a(a_), mu(mu_) {
    if (N < 2) throw parameter_error("Params: N >= 2 violated");
    if (!(p > 1.0)) throw parameter_error("Params: p > 1 violated");
    if (!(p < N)) throw parameter_error("Params: p < N violated");
    const double ps = static_cast<double>(N) * p / (N - p);
    if (!(q > p)) throw parameter_error("Params: q > p violated (q <= p unsupported)");
    if (!(q < ps)) throw parameter_error("Params: q < p* violated");
    if (!(a > 0.0)) throw parameter_error("Params: a > 0 violated");
    if (!std::isfinite(mu)) throw parameter_error("Params: mu must be finite");
    const Exponents e = derive_exponents(N, p, q);
    gamma_q = e.gamma_q;
    p_star = e.p_star;
}

RegimeKind classify_regime_kind(const Params& prm) {
    const double qc = prm.mass_critical_q();
    const double d = prm.q - qc;
    if (std::fabs(d) <= 1e-9 * qc) return RegimeKind::MassCritical;
    return d < 0 ? RegimeKind::Subcritical : RegimeKind::Supercritical;
}

} // namespace normsol
