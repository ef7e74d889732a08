#include "normsol/bubbles.hpp"
#include "normsol/errors.hpp"
#include "normsol/quad.hpp"
#include "normsol/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace normsol {

namespace {

struct BubbleForm {
    int N;
    double p, d, eps;
    double pprime, a0, gamma, p_star;

    BubbleForm(int N_, double p_, double d_, double eps_)
        : N(N_), p(p_), d(d_), eps(eps_) {
        pprime = p / (p - 1.0);
        a0 = (N - p) / (p - 1.0);
        gamma = (N - p) / (p * (p - 1.0));
        p_star = static_cast<double>(N) * p / (N - p);
    }
    double base(double r) const { return std::pow(eps, pprime) + std::pow(r, pprime); }
    double value(double r) const {
        return d * std::pow(eps, gamma) * std::pow(base(r), -(N - p) / p);
    }
    double deriv(double r) const {
        if (r == 0.0) return 0.0;
        return -d * std::pow(eps, gamma) * a0 * std::pow(r, 1.0 / (p - 1.0)) *
               std::pow(base(r), -(N - p) / p - 1.0);
    }
};

double omega_surface(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

// Samples T_j = -Delta_p(U with d = 1) and V_j = (U with d = 1)^{p*-1} so the
// residual at amplitude d is |d^{p-1} T - d^{p*-1} V|. The p-Laplacian is
// evaluated by a five-point log-space derivative of the closed-form flux.
struct ResidualSamples {
    std::vector<double> T, V;
    double Vmax = 0.0;
};

ResidualSamples residual_samples(int N, double p, double eps) {
    const BubbleForm f(N, p, 1.0, eps);
    const int n = 1601;
    const double y0 = std::log(1e-3 * eps), y1 = std::log(1e3 * std::max(eps, 1.0));
    const double h = (y1 - y0) / (n - 1);
    std::vector<double> F(n), r(n);
    for (int j = 0; j < n; ++j) {
        r[j] = std::exp(y0 + j * h);
        // F = r^{N-1} |U'|^{p-2} U' in closed form.
        const double g = f.deriv(r[j]);
        F[j] = std::pow(r[j], N - 1.0) * (g >= 0.0 ? 1.0 : -1.0) *
               std::pow(std::fabs(g), p - 1.0);
    }
    ResidualSamples out;
    for (int j = 2; j + 2 < n; ++j) {
        const double dFdy = (F[j - 2] - 8.0 * F[j - 1] + 8.0 * F[j + 1] - F[j + 2]) / (12.0 * h);
        const double lap = dFdy / std::pow(r[j], static_cast<double>(N)); // (1/r^{N-1}) dF/dr
        out.T.push_back(-lap);
        const double v = std::pow(f.value(r[j]), f.p_star - 1.0);
        out.V.push_back(v);
        out.Vmax = std::max(out.Vmax, v);
    }
    return out;
}

double residual_at(const ResidualSamples& s, double p, double p_star, double d) {
    const double cT = std::pow(d, p - 1.0);
    const double cV = std::pow(d, p_star - 1.0);
    double worst = 0.0;
    for (std::size_t j = 0; j < s.T.size(); ++j)
        worst = std::max(worst, std::fabs(cT * s.T[j] - cV * s.V[j]));
    return worst / (cV * s.Vmax);
}

double smoothstep01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

} // namespace

BubbleFit bubble_d_const(int N, double p) {
    if (!(p > 1.0) || !(p < N)) throw parameter_error("bubble_d_const: 1 < p < N violated");
    const double p_star = static_cast<double>(N) * p / (N - p);
    const ResidualSamples s = residual_samples(N, p, 1.0);
    // Golden-section on log d.
    double lo = std::log(1e-2), hi = std::log(1e2);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = residual_at(s, p, p_star, std::exp(x1));
    double f2 = residual_at(s, p, p_star, std::exp(x2));
    for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = residual_at(s, p, p_star, std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = residual_at(s, p, p_star, std::exp(x2));
        }
        if (hi - lo < 1e-15) break;
    }
    BubbleFit out;
    out.d_const = std::exp(0.5 * (lo + hi));
    out.residual = residual_at(s, p, p_star, out.d_const);
    if (!(out.residual <= 1e-6))
        throw numerical_error("bubble_d_const: residual above 1e-6 at the fitted amplitude");
    return out;
}

double bubble_ode_residual(int N, double p, double d_const, double eps) {
    const double p_star = static_cast<double>(N) * p / (N - p);
    const ResidualSamples s = residual_samples(N, p, eps);
    return residual_at(s, p, p_star, d_const);
}

double bubble_value(int N, double p, double d_const, double eps, double r) {
    return BubbleForm(N, p, d_const, eps).value(r);
}

RadialFunction cutoff_bubble_profile(std::shared_ptr<const RadialGrid> grid, int N,
                                     double p, double d_const, double eps) {
    const BubbleForm f(N, p, d_const, eps);
    RadialFunction u(grid);
    for (int i = 0; i < grid->nodes(); ++i) {
        const double r = grid->r[i];
        u.values[i] = r >= 2.0 ? 0.0 : tau_cutoff(r, 1.0, 2.0) * f.value(r);
    }
    u.values.back() = 0.0;
    return u;
}

namespace {

AppendixRow appendix_row(int N, double p, double d_const, double eps,
                         const std::vector<double>& r_list) {
    const double om = omega_surface(N);
    const BubbleForm f(N, p, d_const, eps);
    auto phi = [](double r) { return tau_cutoff(r, 1.0, 2.0); };
    auto dphi = [](double r) {
        if (r <= 1.0 || r >= 2.0) return 0.0;
        const double x = r - 1.0;
        return -6.0 * x * (1.0 - x);
    };
    const double b0 = eps / 10.0;
    const int lin = 24, logp = 260;
    AppendixRow row;
    row.eps = eps;
    row.grad_p = om * integrate_radial(
                          [&](double r) {
                              const double g = dphi(r) * f.value(r) + phi(r) * f.deriv(r);
                              return std::pow(std::fabs(g), p) * std::pow(r, N - 1.0);
                          },
                          b0, 2.0, lin, logp);
    row.crit = om * integrate_radial(
                        [&](double r) {
                            return std::pow(phi(r) * f.value(r), f.p_star) *
                                   std::pow(r, N - 1.0);
                        },
                        b0, 2.0, lin, logp);
    for (double rr : r_list)
        row.r_norms.push_back(om * integrate_radial(
                                       [&](double r) {
                                           return std::pow(phi(r) * f.value(r), rr) *
                                                  std::pow(r, N - 1.0);
                                       },
                                       b0, 2.0, lin, logp));
    return row;
}

} // namespace

AppendixTable appendix_norms(int N, double p, const std::vector<double>& eps_list,
                             const std::vector<double>& r_list, int threads) {
    AppendixTable table;
    table.r_list = r_list;
    table.eps_floor = 2e-4;
    const BubbleFit d_fit = bubble_d_const(N, p);
    std::vector<double> usable;
    for (double eps : eps_list) {
        if (eps < table.eps_floor) {
            table.eps_floor_hit = true;
            continue;
        }
        if (eps > 0.3)
            throw parameter_error("appendix_norms: eps in (0, 0.3] required");
        usable.push_back(eps);
    }
    table.rows.resize(usable.size());
    if (threads > 1) {
        std::vector<std::future<AppendixRow>> jobs;
        for (double eps : usable)
            jobs.push_back(std::async(std::launch::async, appendix_row, N, p,
                                      d_fit.d_const, eps, r_list));
        for (std::size_t i = 0; i < jobs.size(); ++i) table.rows[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < usable.size(); ++i)
            table.rows[i] = appendix_row(N, p, d_fit.d_const, usable[i], r_list);
    }
    if (table.rows.size() < 2) throw numerical_error("appendix_norms: too few usable eps values");
    return table;
}

RNormLaw classify_r_norm_law(int N, double p, double r) {
    RNormLaw law{};
    law.boundary_r = static_cast<double>(N) * (p - 1.0) / (N - p);
    if (std::fabs(r - law.boundary_r) <= 1e-9 * law.boundary_r) {
        law.kind = RNormCase::Logarithmic;
        law.exponent = static_cast<double>(N) / p;
    } else if (r > law.boundary_r) {
        law.kind = RNormCase::ScaleDominated;
        law.exponent = N - (N - p) * r / p;
    } else {
        law.kind = RNormCase::TailDominated;
        law.exponent = (N - p) * r / (p * (p - 1.0));
    }
    return law;
}

AppendixRegression appendix_regression(int N, double p, const AppendixTable& table,
                                       double S_Np) {
    AppendixRegression out;
    std::vector<double> eps, dgrad;
    for (const auto& row : table.rows) {
        eps.push_back(row.eps);
        dgrad.push_back(S_Np - row.grad_p);
    }
    out.grad_correction = loglog_fit(eps, dgrad);
    out.grad_target = (N - p) / (p - 1.0);

    for (std::size_t k = 0; k < table.r_list.size(); ++k) {
        const RNormLaw law = classify_r_norm_law(N, p, table.r_list[k]);
        out.r_laws.push_back(law);
        std::vector<double> vals;
        for (const auto& row : table.rows) vals.push_back(row.r_norms[k]);
        if (law.kind == RNormCase::Logarithmic) {
            double lo = 1e300, hi = 0.0;
            for (std::size_t i = 0; i < eps.size(); ++i) {
                const double ratio =
                    vals[i] / (std::pow(eps[i], law.exponent) * std::fabs(std::log(eps[i])));
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            out.r_fits.push_back(loglog_fit(eps, vals));
            out.log_ratio_spread.push_back(hi / lo - 1.0);
        } else {
            const LinearFit f = loglog_fit(eps, vals);
            out.r_fits.push_back(f);
            out.log_ratio_spread.push_back(0.0);
            if (std::fabs(f.slope - law.exponent) > 0.25 * std::fabs(law.exponent))
                out.law_mismatch = true;
        }
    }
    return out;
}

std::vector<RadialFunction> gengeqn_family(int n, double R, const Params& prm,
                                           std::shared_ptr<const RadialGrid> grid) {
    if (n < 1) throw parameter_error("gengeqn_family: n >= 1 violated");
    if (!(R > 1.0)) throw parameter_error("gengeqn_family: R > 1 violated");
    if (grid->R_max < (2.0 * n + 1.0) * R)
        throw parameter_error("gengeqn_family: grid R_max below (2n+1)R");
    std::vector<RadialFunction> out;
    const double gap = R / 8.0;
    for (int k = 1; k <= n; ++k) {
        const double lo = (2.0 * k - 1.0) * R + gap;
        const double lo2 = (2.0 * k - 0.5) * R;
        const double hi2 = (2.0 * k + 0.5) * R;
        const double hi = (2.0 * k + 1.0) * R - gap;
        RadialFunction u(grid);
        for (int i = 0; i < grid->nodes(); ++i) {
            const double r = grid->r[i];
            double env = 0.0;
            if (r > lo && r < hi) {
                if (r < lo2) env = smoothstep01((r - lo) / (lo2 - lo));
                else if (r > hi2) env = 1.0 - smoothstep01((r - hi2) / (hi - hi2));
                else env = 1.0;
            }
            u.values[i] = env * std::pow(1.0 + r * r, static_cast<double>(k));
        }
        out.push_back(mass_normalize(u, prm.p, prm.a));
    }
    return out;
}

} // namespace normsol
