#include "normsol/functionals.hpp"
#include "normsol/errors.hpp"
#include "normsol/rootfind.hpp"
#include "normsol/thresholds.hpp"

#include <cmath>

namespace normsol {

double energy(const NormTriple& t, const Params& prm) {
    return t.A / prm.p - prm.mu * t.B / prm.q - t.C / prm.p_star;
}

double energy(const RadialFunction& u, const Params& prm) {
    return energy(norm_triple(u, prm), prm);
}

PsiEval psi(const NormTriple& t, double s, const Params& prm) {
    const double gq = prm.gamma_q;
    const double ep = std::exp(prm.p * s);
    const double eq = std::exp(prm.q * gq * s);
    const double es = std::exp(prm.p_star * s);
    PsiEval out;
    out.value = (t.A / prm.p) * ep - (prm.mu * t.B / prm.q) * eq - (t.C / prm.p_star) * es;
    out.d1 = t.A * ep - prm.mu * gq * t.B * eq - t.C * es;
    out.d2 = prm.p * t.A * ep - prm.mu * prm.q * gq * gq * t.B * eq - prm.p_star * t.C * es;
    return out;
}

double pohozaev(const NormTriple& t, const Params& prm) {
    return psi(t, 0.0, prm).d1;
}

double pohozaev(const RadialFunction& u, const Params& prm) {
    return pohozaev(norm_triple(u, prm), prm);
}

const char* fiber_class_name(FiberClass c) {
    switch (c) {
        case FiberClass::TwoCritical: return "two-critical";
        case FiberClass::OneCritical: return "one-critical";
        case FiberClass::NoCritical: return "no-critical";
    }
    return "?";
}

namespace {

// Newton refinement of a critical point inside a confirmed bracket.
double polish_critical(const NormTriple& t, const Params& prm, double lo, double hi,
                       double s0) {
    double s = s0;
    const double tol = 1e-12 * t.A;
    for (int it = 0; it < 60; ++it) {
        const PsiEval e = psi(t, s, prm);
        if (std::fabs(e.d1) <= tol) return s;
        double step = (e.d2 != 0.0) ? -e.d1 / e.d2 : 0.0;
        double sn = s + step;
        if (!(sn > lo && sn < hi) || step == 0.0) sn = 0.5 * (lo + hi);
        const PsiEval en = psi(t, sn, prm);
        // Maintain the bracket on d1.
        const PsiEval elo = psi(t, lo, prm);
        if (elo.d1 * en.d1 <= 0.0) hi = sn; else lo = sn;
        s = sn;
        if (hi - lo < 1e-15 * (1.0 + std::fabs(lo) + std::fabs(hi))) return s;
    }
    return s;
}

} // namespace

FiberPoints fiber_points(const NormTriple& t, const Params& prm) {
    if (!(t.A > 0.0)) throw parameter_error("fiber_points: A > 0 violated");
    const double gq = prm.gamma_q;
    const double qgq = prm.q_gamma_q();
    const double ps = prm.p_star;
    FiberPoints out;

    const RegimeKind kind = classify_regime_kind(prm);
    const double muB = prm.mu * gq * t.B;

    // Psi'(s) = e^{ps} (A - mu gq B e^{(q gq - p)s} - C e^{(p*-p)s}).
    auto d1 = [&](double s) { return psi(t, s, prm).d1; };

    const bool single_root_shape =
        (prm.mu <= 0.0) || (t.B == 0.0) || (kind == RegimeKind::Supercritical);

    if (single_root_shape) {
        // A - mu gq B e^{(q gq - p)s} - C e^{(p*-p)s} is strictly decreasing:
        // exactly one critical point, a strict maximum.
        if (t.C <= 0.0 && muB <= 0.0) return out; // Psi' > 0 everywhere
        double lo = 0.0, hi = 0.0;
        while (d1(lo) <= 0.0) { lo -= 1.0; if (lo < -600.0) return out; }
        while (d1(hi) >= 0.0) { hi += 1.0; if (hi > 600.0) return out; }
        double tu = find_root(d1, lo, hi, 1e-15);
        tu = polish_critical(t, prm, lo, hi, tu);
        out.cls = FiberClass::OneCritical;
        out.t_u = tu;
        // Single zero beyond t_u when Psi(t_u) > 0.
        if (psi(t, tu, prm).value > 0.0) {
            double z = tu + 1.0;
            while (psi(t, z, prm).value >= 0.0 && z < 600.0) z += 1.0;
            if (z < 600.0)
                out.d_u = find_root([&](double s) { return psi(t, s, prm).value; }, tu, z, 1e-14);
        }
        return out;
    }

    if (kind == RegimeKind::MassCritical) {
        const double head = t.A - muB;
        if (head <= 0.0 || t.C <= 0.0) return out; // NoCritical
        const double tu = std::log(head / t.C) / (ps - prm.p);
        out.cls = FiberClass::OneCritical;
        out.t_u = tu;
        // Psi(s) = (head/p) e^{ps} - (C/p*) e^{p* s}; zero at e^{(p*-p)z} = p* head/(p C).
        out.d_u = std::log(ps * head / (prm.p * t.C)) / (ps - prm.p);
        return out;
    }

    // Subcritical, mu > 0, B > 0: rho(s) = A e^{(p-qgq)s} - C e^{(p*-qgq)s} - mu gq B
    // rises to a single interior maximum then falls; two roots or none.
    if (t.C <= 0.0) {
        // Degenerate C = 0: rho increasing, single root, local minimum s_u only.
        double lo = 0.0, hi = 0.0;
        auto rho0 = [&](double s) {
            return t.A * std::exp((prm.p - qgq) * s) - muB;
        };
        while (rho0(lo) >= 0.0) lo -= 1.0;
        while (rho0(hi) <= 0.0) hi += 1.0;
        out.cls = FiberClass::OneCritical;
        out.s_u = find_root(rho0, lo, hi, 1e-15);
        return out;
    }
    const double sm = std::log(t.A * (prm.p - qgq) / (t.C * (ps - qgq))) / (ps - prm.p);
    auto rho = [&](double s) {
        return t.A * std::exp((prm.p - qgq) * s) - t.C * std::exp((ps - qgq) * s) - muB;
    };
    if (rho(sm) <= 0.0) return out; // NoCritical (large mu)

    double lo = sm - 1.0;
    while (rho(lo) >= 0.0) { lo -= 1.0; if (lo < -600.0) break; }
    double su = find_root(rho, lo, sm, 1e-15);
    su = polish_critical(t, prm, lo, sm, su);
    double hi = sm + 1.0;
    while (rho(hi) >= 0.0) { hi += 1.0; if (hi > 600.0) break; }
    double tu = find_root(rho, sm, hi, 1e-15);
    tu = polish_critical(t, prm, sm, hi, tu);

    out.cls = FiberClass::TwoCritical;
    out.s_u = su;
    out.t_u = tu;
    // Zeros: Psi(s_u) < 0 < Psi(t_u) and Psi -> -inf at +inf.
    auto val = [&](double s) { return psi(t, s, prm).value; };
    if (val(su) < 0.0 && val(tu) > 0.0) {
        out.c_u = find_root(val, su, tu, 1e-14);
        double z = tu + 1.0;
        while (val(z) >= 0.0 && z < 600.0) z += 1.0;
        if (z < 600.0) out.d_u = find_root(val, tu, z, 1e-14);
    }
    return out;
}

LagrangeEval lagrange_multiplier(const NormTriple& t, const Params& prm) {
    const double ap = std::pow(prm.a, prm.p);
    const double lambda = (t.A - prm.mu * t.B - t.C) / ap;
    const double eps_den = 1e-14;
    const double resid = std::fabs(lambda * ap - prm.mu * (prm.gamma_q - 1.0) * t.B) /
                         (std::fabs(lambda) * ap + eps_den);
    return {lambda, resid};
}

LagrangeEval lagrange_multiplier(const RadialFunction& u, const Params& prm) {
    return lagrange_multiplier(norm_triple(u, prm), prm);
}

double regularization_delta(const Params& prm, const RadialGrid& g) {
    return prm.p < 2.0 ? 1e-8 * (prm.a / g.R_max) : 0.0;
}

namespace {

// |x|^{e-2} x with the convention 0 at x = 0 (e > 1).
inline double sgn_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return (x > 0.0 ? 1.0 : -1.0) * std::pow(std::fabs(x), e - 1.0);
}

} // namespace

double discrete_energy(const RadialFunction& u, const Params& prm) {
    const RadialGrid& g = *u.grid;
    const double delta = regularization_delta(prm, g);
    if (delta == 0.0) return energy(u, prm);
    const double d2 = delta * delta;
    double A = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double gr = (u.values[i + 1] - u.values[i]) / (g.r[i + 1] - g.r[i]);
        A += (std::pow(gr * gr + d2, 0.5 * prm.p) - std::pow(d2, 0.5 * prm.p)) *
             g.cell_weight[i];
    }
    A *= g.surface_const;
    return A / prm.p - prm.mu * lr_norm(u, prm.q) / prm.q -
           lr_norm(u, prm.p_star) / prm.p_star;
}

RadialFunction discrete_energy_gradient(const RadialFunction& u, const Params& prm) {
    const RadialGrid& g = *u.grid;
    const double omega = g.surface_const;
    const double delta = regularization_delta(prm, g);
    const double d2 = delta * delta;
    RadialFunction grad(u.grid);
    for (int i = 0; i < g.cells(); ++i) {
        const double h = g.r[i + 1] - g.r[i];
        const double w = g.cell_weight[i];
        const double gr = (u.values[i + 1] - u.values[i]) / h;
        // d(A/p)/du: flux density times +-1/h.
        double flux;
        if (delta == 0.0) flux = sgn_pow(gr, prm.p);
        else flux = std::pow(gr * gr + d2, 0.5 * (prm.p - 2.0)) * gr;
        const double ga = omega * w * flux / h;
        grad.values[i] -= ga;
        grad.values[i + 1] += ga;
        // Midpoint terms: -(mu/q) d(B)/du - (1/p*) d(C)/du at u_mid.
        const double um = 0.5 * (u.values[i] + u.values[i + 1]);
        const double gm =
            omega * w * 0.5 * (-prm.mu * sgn_pow(um, prm.q) - sgn_pow(um, prm.p_star));
        grad.values[i] += gm;
        grad.values[i + 1] += gm;
    }
    grad.values.back() = 0.0; // pinned Dirichlet node
    return grad;
}

double truncated_energy(const RadialFunction& u, const Params& prm,
                        const ThresholdSet& thr) {
    if (!(thr.R0 > 0.0) || !(thr.R1 > thr.R0))
        throw dependency_error("truncated_energy: thresholds R0 < R1 unavailable");
    const NormTriple t = norm_triple(u, prm);
    const double gn = std::pow(t.A, 1.0 / prm.p);
    return t.A / prm.p - prm.mu * t.B / prm.q -
           tau_cutoff(gn, thr.R0, thr.R1) * t.C / prm.p_star;
}

} // namespace normsol
