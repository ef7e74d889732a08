#include "normsol/thresholds.hpp"
#include "normsol/errors.hpp"
#include "normsol/ode.hpp"
#include "normsol/quad.hpp"
#include "normsol/radial.hpp"
#include "normsol/rootfind.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

namespace normsol {

namespace {

double omega_surface(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

// Tail of int_R^inf r^m (eps^{p'} + r^{p'})^{-b} dr by expanding in (eps/r)^{p'}:
// sum_k binom(-b,k) eps^{p'k} R^{m+1-p'(b+k)} / (p'(b+k) - m - 1).
// Requires p' b > m + 1 with margin.
double tail_integral(double m, double b, double pprime, double eps, double R) {
    const double lead = pprime * b - m - 1.0;
    if (lead < 0.05 * (m + 1.0))
        throw numerical_error("tail correction: insufficient decay margin");
    const double R_lead = std::pow(R, -lead);
    const double z = std::pow(eps / R, pprime);
    double sum = 0.0, c = 1.0, zk = 1.0;
    for (int k = 0; k < 64; ++k) {
        const double term = c * zk * R_lead / (lead + pprime * k);
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        c *= -(b + k) / (k + 1.0); // binomial (-b choose k+1) recursion
        zk *= z;
    }
    return sum;
}

struct BubbleIntegrals {
    double A; // ||grad U||_p^p  (unit d)
    double C; // ||U||_{p*}^{p*} (unit d)
};

// Norms of the unit-amplitude extremal (eps^{p'} + r^{p'})^{-(N-p)/p} scaled by
// eps^{(N-p)/(p(p-1))}, computed on [0, R] by panel quadrature plus the
// analytic power-law tail.
BubbleIntegrals bubble_integrals_unit(int N, double p, double eps) {
    const double pprime = p / (p - 1.0);
    const double a0 = (N - p) / (p - 1.0);
    const double epow = std::pow(eps, (N - p) / (p * (p - 1.0)));
    const double ep = std::pow(eps, pprime);
    const double R = 1e3 * std::max(1.0, eps);
    auto base = [&](double r) { return ep + std::pow(r, pprime); };
    auto fA = [&](double r) {
        // |U'|^p r^{N-1} = a0^p eps^{...p} r^{p'} base^{-N} r^{N-1} after the
        // exponent algebra (-(N-p)/p - 1) p = -N.
        return std::pow(a0, p) * std::pow(r, pprime + N - 1.0) * std::pow(base(r), -static_cast<double>(N));
    };
    auto fC = [&](double r) {
        return std::pow(r, N - 1.0) * std::pow(base(r), -static_cast<double>(N));
    };
    const double core = 0.5 * std::max(1.0, eps);
    double IA = integrate_radial(fA, core, R, 40, 120);
    double IC = integrate_radial(fC, core, R, 40, 120);
    // Analytic tails: integrands r^m (ep + r^{p'})^{-N}.
    IA += std::pow(a0, p) * tail_integral(pprime + N - 1.0, N, pprime, eps, R);
    IC += tail_integral(N - 1.0, N, pprime, eps, R);
    const double om = omega_surface(N);
    BubbleIntegrals out;
    out.A = om * std::pow(epow, p) * IA;
    out.C = om * std::pow(epow, p * static_cast<double>(N) / (N - p)) * IC;
    return out;
}

} // namespace

double sobolev_constant(int N, double p) {
    if (!(p > 1.0) || !(p < N)) throw parameter_error("sobolev_constant: 1 < p < N violated");
    const BubbleIntegrals bi = bubble_integrals_unit(N, p, 1.0);
    const double p_star = static_cast<double>(N) * p / (N - p);
    return bi.A / std::pow(bi.C, p / p_star);
}

std::pair<double, double> bubble_sharp_norms(int N, double p, double d_const, double eps) {
    const BubbleIntegrals bi = bubble_integrals_unit(N, p, eps);
    const double p_star = static_cast<double>(N) * p / (N - p);
    return {std::pow(d_const, p) * bi.A, std::pow(d_const, p_star) * bi.C};
}

double gn_constant_from_norms(const Params& prm, double A, double B, double mass_p) {
    if (!(A > 0.0) || !(B > 0.0) || !(mass_p > 0.0))
        throw dependency_error("gn_constant: degenerate ground-state norms");
    const double qgq = prm.q_gamma_q();
    const double quotient =
        B / (std::pow(A, qgq / prm.p) * std::pow(mass_p, prm.q * (1.0 - prm.gamma_q) / prm.p));
    return std::pow(quotient, 1.0 / prm.q);
}

double gn_constant(const Params& prm, const GroundStateProfile& phi0) {
    if (!phi0.converged) throw dependency_error("gn_constant: ground state not converged");
    return gn_constant_from_norms(prm, phi0.norms.A, phi0.norms.B, phi0.mass_p);
}

double beta_contradiction_rhs(const Params& prm, double S, double C_gn) {
    // Lower bound on mu a^{q(1-gq)} forced by a nonempty P^0: combining the
    // Sobolev bound ||grad u|| >= (S^{p*/p}(p-qgq)/(p*-qgq))^{1/(p*-p)} with the
    // GN bound ||grad u||^{p-qgq} <= mu gq (p*-qgq) C^q a^{q(1-gq)}/(p*-p).
    // The ratio against C' is (p*/p)^{(p-qgq)/(p*-p)} (qgq/p), so
    // C' <= rhs is exactly the monotonicity inequality
    // (qgq/p)^{p*-p} (p*/p)^{p-qgq} <= 1.
    const double p = prm.p, ps = prm.p_star, qgq = prm.q_gamma_q(), gq = prm.gamma_q;
    const double Cq = std::pow(C_gn, prm.q);
    return std::pow(std::pow(S, ps / p) * (p - qgq) / (ps - qgq), (p - qgq) / (ps - p)) *
           (ps - p) / (Cq * gq * (ps - qgq));
}

ThresholdSet threshold_constants(const Params& prm, double S, double C_gn) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ThresholdSet thr;
    thr.S = S;
    thr.C_gn = C_gn;
    thr.C_prime = thr.C_dprime = thr.alpha = thr.alpha_bar = nan;
    thr.R0 = thr.R1 = thr.t_bar = nan;

    const double p = prm.p, q = prm.q, ps = prm.p_star;
    const double gq = prm.gamma_q, qgq = prm.q_gamma_q();
    const double Cq = std::pow(C_gn, q);
    const RegimeKind kind = classify_regime_kind(prm);

    if (kind == RegimeKind::Subcritical) {
        thr.C_prime =
            std::pow(ps * std::pow(S, ps / p) * (p - qgq) / (p * (ps - qgq)),
                     (p - qgq) / (ps - p)) *
            q * (ps - p) / (p * Cq * (ps - qgq));
        thr.C_dprime = p * ps / (prm.N * gq * Cq * (ps - p)) *
                       std::pow(qgq * std::pow(S, prm.N / p) / (p - qgq), (p - qgq) / p);
        thr.alpha = std::min(thr.C_prime, thr.C_dprime);
        thr.t_bar =
            std::pow(ps * std::pow(S, ps / p) * (p - qgq) / (p * (ps - qgq)), 1.0 / (ps - p));
        const double rhs = beta_contradiction_rhs(prm, S, C_gn);
        if (!(thr.alpha <= rhs * (1.0 + 1e-12)))
            throw numerical_error("threshold_constants: alpha <= beta-contradiction bound failed");
        const double bound = prm.mu * std::pow(prm.a, q * (1.0 - gq));
        if (prm.mu <= 0.0 || bound < thr.C_prime) {
            const auto z = h_zeros(prm, thr);
            thr.R0 = z.first;
            thr.R1 = z.second;
        }
    } else if (kind == RegimeKind::MassCritical) {
        // Sharp coupling bound mu a^{p^2/N} < q/(p C^q); equivalently the
        // mass (||phi0||_p^p / a^p)^{p/N} of the rescaled ground state.
        thr.alpha_bar = q / (p * std::pow(prm.a, p * p / prm.N) * Cq);
    }
    return thr;
}

Regime classify_regime(const Params& prm, const ThresholdSet& thr) {
    const RegimeKind kind = classify_regime_kind(prm);
    bool ok = prm.mu > 0.0;
    if (kind == RegimeKind::Subcritical)
        ok = ok && prm.mu * std::pow(prm.a, prm.q * (1.0 - prm.gamma_q)) < thr.alpha;
    else if (kind == RegimeKind::MassCritical)
        ok = ok && prm.mu < thr.alpha_bar;
    return {kind, ok};
}

namespace {

// phi(t) = t^{p-qgq}/p - t^{ps-qgq}/(p* S^{ps/p}); h(t) = t^{qgq} (phi(t) - K).
// The p* in the second denominator comes straight from h's critical term and
// is what makes t_bar and phi(t_bar) match their closed forms.
double phi_aux(double t, const Params& prm, double S) {
    const double p = prm.p, ps = prm.p_star, qgq = prm.q_gamma_q();
    return std::pow(t, p - qgq) / p - std::pow(t, ps - qgq) / (ps * std::pow(S, ps / p));
}

double K_coupling(const Params& prm, double C_gn) {
    return prm.mu / prm.q * std::pow(C_gn, prm.q) *
           std::pow(prm.a, prm.q * (1.0 - prm.gamma_q));
}

} // namespace

double h_function(double t, const Params& prm, const ThresholdSet& thr) {
    const double p = prm.p, ps = prm.p_star, qgq = prm.q_gamma_q();
    return std::pow(t, p) / p - K_coupling(prm, thr.C_gn) * std::pow(t, qgq) -
           std::pow(t, ps) / (ps * std::pow(thr.S, ps / p));
}

std::pair<double, double> h_zeros(const Params& prm, const ThresholdSet& thr) {
    if (classify_regime_kind(prm) != RegimeKind::Subcritical)
        throw parameter_error("h_zeros: subcritical regime required");
    const double p = prm.p, ps = prm.p_star;
    const double S = thr.S;
    const double K = K_coupling(prm, thr.C_gn);
    const double t_bar =
        std::pow(ps * std::pow(S, ps / p) * (p - prm.q_gamma_q()) / (p * (ps - prm.q_gamma_q())),
                 1.0 / (ps - p));

    if (prm.mu == 0.0)
        return {0.0, std::pow(ps * std::pow(S, ps / p) / p, 1.0 / (ps - p))};

    auto g = [&](double t) { return phi_aux(t, prm, S) - K; };

    if (prm.mu < 0.0) {
        // Single zero beyond t_bar; h > 0 on (0, R1).
        double hi = 2.0 * t_bar;
        while (g(hi) >= 0.0) hi *= 2.0;
        return {0.0, find_root(g, t_bar, hi, 1e-14)};
    }

    if (!(g(t_bar) > 0.0))
        throw threshold_violation("h_zeros: mu a^{q(1-gamma_q)} >= C' (h has no positive part)");
    double lo = 0.5 * t_bar;
    while (g(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw numerical_error("h_zeros: failed to bracket R0");
    }
    const double R0 = find_root(g, lo, t_bar, 1e-14);
    double hi = 2.0 * t_bar;
    while (g(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw numerical_error("h_zeros: failed to bracket R1");
    }
    const double R1 = find_root(g, t_bar, hi, 1e-14);
    return {R0, R1};
}

double tau_cutoff(double t, double R0, double R1) {
    if (t <= R0) return 1.0;
    if (t >= R1) return 0.0;
    const double x = (t - R0) / (R1 - R0);
    return 1.0 - x * x * (3.0 - 2.0 * x);
}

double htilde_function(double t, const Params& prm, const ThresholdSet& thr) {
    if (!(thr.R0 >= 0.0) || !(thr.R1 > 0.0))
        throw dependency_error("htilde_function: thresholds unavailable");
    const double p = prm.p, ps = prm.p_star, qgq = prm.q_gamma_q();
    return std::pow(t, p) / p - K_coupling(prm, thr.C_gn) * std::pow(t, qgq) -
           tau_cutoff(t, thr.R0, thr.R1) * std::pow(t, ps) / (ps * std::pow(thr.S, ps / p));
}

// ---------------------------------------------------------------------------
// On-disk cache

namespace {
std::mutex cache_mutex;

nlohmann::json load_cache_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return nlohmann::json{{"version", 1}};
    nlohmann::json j;
    try {
        in >> j;
    } catch (...) {
        return nlohmann::json{{"version", 1}};
    }
    if (!j.is_object() || j.value("version", 0) != 1) return nlohmann::json{{"version", 1}};
    return j;
}

void save_cache_file(const std::string& path, const nlohmann::json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump(1) << "\n";
    }
    std::rename(tmp.c_str(), path.c_str());
}
} // namespace

ThresholdCache::ThresholdCache(std::string path) : path_(std::move(path)) {}

std::optional<double> ThresholdCache::lookup_S(int N, double p) const {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const nlohmann::json j = load_cache_file(path_);
    if (!j.contains("sobolev")) return std::nullopt;
    for (const auto& e : j["sobolev"])
        if (e.value("N", -1) == N && e.value("p", 0.0) == p) return e.value("S", 0.0);
    return std::nullopt;
}

std::optional<double> ThresholdCache::lookup_Cgn(int N, double p, double q,
                                                 const std::string& res_tag) const {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const nlohmann::json j = load_cache_file(path_);
    if (!j.contains("gn")) return std::nullopt;
    for (const auto& e : j["gn"])
        if (e.value("N", -1) == N && e.value("p", 0.0) == p && e.value("q", 0.0) == q &&
            e.value("res", std::string()) == res_tag)
            return e.value("C_gn", 0.0);
    return std::nullopt;
}

void ThresholdCache::store_S(int N, double p, double S) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    nlohmann::json j = load_cache_file(path_);
    auto& arr = j["sobolev"];
    for (auto& e : arr)
        if (e.value("N", -1) == N && e.value("p", 0.0) == p) {
            e["S"] = S;
            save_cache_file(path_, j);
            return;
        }
    arr.push_back({{"N", N}, {"p", p}, {"S", S}});
    save_cache_file(path_, j);
}

void ThresholdCache::store_Cgn(int N, double p, double q, const std::string& res_tag,
                               double C_gn) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    nlohmann::json j = load_cache_file(path_);
    auto& arr = j["gn"];
    for (auto& e : arr)
        if (e.value("N", -1) == N && e.value("p", 0.0) == p && e.value("q", 0.0) == q &&
            e.value("res", std::string()) == res_tag) {
            e["C_gn"] = C_gn;
            save_cache_file(path_, j);
            return;
        }
    arr.push_back({{"N", N}, {"p", p}, {"q", q}, {"res", res_tag}, {"C_gn", C_gn}});
    save_cache_file(path_, j);
}

} // namespace normsol
