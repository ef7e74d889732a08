#include "normsol/asymptotics.hpp"
#include "normsol/errors.hpp"
#include "normsol/quad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace normsol {

namespace {

enum class SweepKind { ToZero, ToAlphaBar, ToInfinity };

// Spatial scale of the state along each degeneration: the profile widens like
// mu^{-1/(p - q gq)} as mu -> 0, like (alpha_bar - mu)^{-(N-p)/p^2} at the
// mass-critical bound, and like mu^{1/(q gq - p)} as mu -> infinity.
double expected_width(SweepKind kind, const Params& pm, double alpha_bar) {
    const double qgq = pm.q_gamma_q();
    switch (kind) {
        case SweepKind::ToZero: return std::pow(pm.mu, -1.0 / (pm.p - qgq));
        case SweepKind::ToAlphaBar:
            return std::pow(alpha_bar - pm.mu, -(pm.N - pm.p) / (pm.p * pm.p));
        case SweepKind::ToInfinity: return std::pow(pm.mu, 1.0 / (qgq - pm.p));
    }
    return 1.0;
}

RadialFunction resample_dilated(const RadialFunction& prev, double width_ratio,
                                std::shared_ptr<const RadialGrid> grid, const Params& pm) {
    PchipInterpolant itp(prev.grid->r, prev.values);
    const double amp = std::pow(width_ratio, -static_cast<double>(pm.N) / pm.p);
    RadialFunction u(grid);
    for (int i = 0; i < grid->nodes(); ++i) {
        const double arg = grid->r[i] / width_ratio;
        u.values[i] = arg <= prev.grid->R_max ? amp * itp(arg) : 0.0;
    }
    u.values.back() = 0.0;
    return mass_normalize(u, pm.p, pm.a);
}

struct FitInput {
    std::vector<double> x, neg_lambda, A, B;
};

enum class DropEnd { First, Last };

// Points arrive sorted by increasing mu. If R^2 < 0.98, drop the two points
// at the non-asymptotic end of the sweep once and retry (pre-asymptotic
// contamination sits at large mu for mu -> 0 and at small mu otherwise).
SlopeCheck fit_with_retry(std::vector<double> x, std::vector<double> y, double target,
                          DropEnd drop) {
    SlopeCheck out;
    out.target = target;
    if (x.size() < 3) return out;
    out.fit = loglog_fit(x, y);
    if (out.fit.r2 < 0.98 && x.size() >= 5) {
        if (drop == DropEnd::Last) {
            x.resize(x.size() - 2);
            y.resize(y.size() - 2);
        } else {
            x.erase(x.begin(), x.begin() + 2);
            y.erase(y.begin(), y.begin() + 2);
        }
        out.fit = loglog_fit(x, y);
    }
    out.r2_ok = out.fit.r2 >= 0.98;
    out.within_10pct =
        out.r2_ok && std::fabs(out.fit.slope - target) <= 0.10 * std::fabs(target);
    return out;
}

ExponentReport run_sweep(SweepKind kind, const Params& tmpl,
                         std::vector<double> mu_grid, const ThresholdSet& thr,
                         const GroundStateProfile* phi0, const SweepOptions& opt) {
    const RegimeKind want = kind == SweepKind::ToZero      ? RegimeKind::Subcritical
                            : kind == SweepKind::ToAlphaBar ? RegimeKind::MassCritical
                                                            : RegimeKind::Supercritical;
    if (classify_regime_kind(tmpl) != want)
        throw parameter_error("sweep: template regime does not match the sweep kind");
    if (mu_grid.size() < 4) throw insufficient_data("sweep: need at least 4 mu points");

    // Process from the benign end so warm starts track the degeneration.
    std::sort(mu_grid.begin(), mu_grid.end());
    std::vector<double> order = mu_grid;
    if (kind == SweepKind::ToZero) std::reverse(order.begin(), order.end());

    ExponentReport rep;
    RadialFunction prev;
    double prev_width = 0.0;
    const Params ref = tmpl.with_mu(order.front());
    const double w_ref = expected_width(kind, ref, thr.alpha_bar);

    for (double mu : order) {
        const Params pm = tmpl.with_mu(mu);
        SweepRecord rec;
        rec.mu = mu;
        try {
            double w = expected_width(kind, pm, thr.alpha_bar);
            // Inadmissible points (e.g. mu >= alpha_bar) have no width law;
            // run them on the reference grid so the solver can refuse.
            if (!std::isfinite(w)) w = w_ref;
            double R_max = opt.base_R_max;
            if (opt.adapt_grid) R_max = opt.base_R_max * std::max(w / w_ref, 1.0);
            auto grid = RadialGrid::geometric(pm.N, opt.grid_M, R_max, opt.grid_kappa);
            const ThresholdSet thr_mu = threshold_constants(pm, thr.S, thr.C_gn);

            RadialFunction init;
            const RadialFunction* init_ptr = nullptr;
            if (opt.warm_start && !prev.values.empty()) {
                init = resample_dilated(prev, w / prev_width, grid, pm);
                init_ptr = &init;
            }
            SolverResult sol = kind == SweepKind::ToZero
                                   ? solve_local_min(pm, thr_mu, grid, opt.solver, init_ptr)
                                   : solve_mountain_pass(pm, thr_mu, grid, opt.solver, init_ptr);
            rec.converged = sol.converged;
            rec.lambda = sol.lambda;
            rec.grad_norm_p = sol.triple.A;
            rec.level = sol.level;
            rec.q_norm = sol.triple.B;
            if (sol.converged) {
                prev = sol.profile;
                prev_width = w;
                if (opt.track_limit_profile && phi0) {
                    ScalingLimit sc = kind == SweepKind::ToZero ? ScalingLimit::MuToZeroPlus
                                      : kind == SweepKind::ToAlphaBar
                                          ? ScalingLimit::MuToAlphaBar
                                          : ScalingLimit::MuToInfinity;
                    const LimitRescale lr =
                        rescale_to_limit_profile(sol.profile, pm, sc, *phi0,
                                                 thr.alpha_bar, sol.lambda);
                    double gap = 0.0, peak = 0.0;
                    for (std::size_t i = 0; i < lr.rescaled.values.size(); ++i) {
                        gap = std::max(gap, std::fabs(lr.rescaled.values[i] -
                                                      phi0->profile.values[i]));
                        peak = std::max(peak, phi0->profile.values[i]);
                    }
                    rep.profile_gaps.push_back(gap / peak);
                }
            }
        } catch (const threshold_violation& e) {
            rec.converged = false;
            rep.note += std::string("refusal at mu=") + std::to_string(mu) + ": " +
                        e.what() + "\n";
        } catch (const std::exception& e) {
            rec.converged = false;
            rep.note += std::string("failure at mu=") + std::to_string(mu) + ": " +
                        e.what() + "\n";
        }
        rep.records.push_back(rec);
    }

    std::sort(rep.records.begin(), rep.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.mu < b.mu; });

    // Regression abscissa, points ordered with the largest mu last.
    FitInput fi;
    for (const SweepRecord& r : rep.records) {
        if (!r.converged) continue;
        const double x = kind == SweepKind::ToAlphaBar ? thr.alpha_bar - r.mu : r.mu;
        fi.x.push_back(x);
        fi.neg_lambda.push_back(-r.lambda);
        fi.A.push_back(r.grad_norm_p);
        fi.B.push_back(r.q_norm);
    }
    if (fi.x.size() < 4)
        throw insufficient_data("sweep: fewer than 4 converged points");

    const double p = tmpl.p, qgq = tmpl.q_gamma_q();
    double tA = 0, tB = 0;
    switch (kind) {
        case SweepKind::ToZero:
            tA = p / (p - qgq);
            tB = qgq / (p - qgq);
            break;
        case SweepKind::ToAlphaBar:
            tA = (tmpl.N - p) / p;
            tB = (tmpl.N - p) / p;
            break;
        case SweepKind::ToInfinity:
            tA = -p / (qgq - p);
            tB = -qgq / (qgq - p);
            break;
    }
    const DropEnd drop = kind == SweepKind::ToZero ? DropEnd::Last : DropEnd::First;
    rep.lambda_slope = fit_with_retry(fi.x, fi.neg_lambda, tA, drop);
    rep.grad_slope = fit_with_retry(fi.x, fi.A, tA, drop);
    rep.qnorm_slope = fit_with_retry(fi.x, fi.B, tB, drop);

    // Level trend along increasing mu.
    rep.level_trend_ok = true;
    const double slack = 1e-6;
    for (std::size_t i = 0; i + 1 < rep.records.size(); ++i) {
        const SweepRecord& lo = rep.records[i];
        const SweepRecord& hi = rep.records[i + 1];
        if (!lo.converged || !hi.converged) continue;
        if (kind == SweepKind::ToZero) {
            // m^+ < 0 shrinks in magnitude as mu -> 0.
            if (std::fabs(lo.level) > std::fabs(hi.level) * (1.0 + slack) + slack)
                rep.level_trend_ok = false;
        } else {
            // m^- non-increasing in mu.
            if (hi.level > lo.level * (1.0 + slack) + slack) rep.level_trend_ok = false;
        }
    }
    // Gaps are recorded in processing order, i.e. toward the degenerate end.
    // Below ~1.5e-3 the comparison is dominated by the interpolation error of
    // the rescaling map itself, so the monotonicity requirement stops there.
    rep.profile_gap_decreasing = rep.profile_gaps.size() >= 2;
    for (std::size_t i = 0; i + 1 < rep.profile_gaps.size(); ++i)
        if (rep.profile_gaps[i + 1] > std::max(rep.profile_gaps[i] * 1.001, 1.5e-3))
            rep.profile_gap_decreasing = false;
    return rep;
}

} // namespace

ExponentReport sweep_mu_to_zero(const Params& tmpl, const std::vector<double>& mu_grid,
                                const ThresholdSet& thr, const GroundStateProfile* phi0,
                                const SweepOptions& opt) {
    return run_sweep(SweepKind::ToZero, tmpl, mu_grid, thr, phi0, opt);
}

ExponentReport sweep_mu_to_alpha_bar(const Params& tmpl,
                                     const std::vector<double>& mu_grid,
                                     const ThresholdSet& thr,
                                     const GroundStateProfile* phi0,
                                     const SweepOptions& opt) {
    return run_sweep(SweepKind::ToAlphaBar, tmpl, mu_grid, thr, phi0, opt);
}

ExponentReport sweep_mu_to_infinity(const Params& tmpl,
                                    const std::vector<double>& mu_grid,
                                    const ThresholdSet& thr,
                                    const GroundStateProfile* phi0,
                                    const SweepOptions& opt) {
    return run_sweep(SweepKind::ToInfinity, tmpl, mu_grid, thr, phi0, opt);
}

NonexistenceReport nonexistence_scan(const Params& tmpl,
                                     const std::vector<double>& mu_negative_grid,
                                     double S, int triples_per_mu, int flow_seeds,
                                     std::uint64_t seed) {
    NonexistenceReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uA(-0.7, 2.3), uB(-14.0, 0.0);
    const double SNp = std::pow(S, tmpl.N / tmpl.p);
    rep.min_grad_excess = 1e300;
    rep.min_energy_excess = 1e300;

    for (double mu : mu_negative_grid) {
        if (!(mu < 0.0)) throw parameter_error("nonexistence_scan: mu < 0 required");
        const Params pm = tmpl.with_mu(mu);
        int accepted = 0;
        long attempts = 0;
        while (accepted < triples_per_mu && attempts < 400L * triples_per_mu) {
            ++attempts;
            NormTriple t;
            t.A = SNp * std::exp(uA(rng));
            t.B = t.A * std::exp(uB(rng));
            t.C = t.A - pm.mu * pm.gamma_q * t.B; // P_mu = 0 by construction
            // Keep only Sobolev-consistent triples.
            if (t.C > std::pow(S, -pm.p_star / pm.p) * std::pow(t.A, pm.p_star / pm.p))
                continue;
            ++accepted;
            ++rep.triples_checked;
            const double E = energy(t, pm);
            rep.min_grad_excess = std::min(rep.min_grad_excess, t.A - SNp);
            rep.min_energy_excess = std::min(rep.min_energy_excess, E - SNp / pm.N);
            if (!(t.A > SNp) || !(E > SNp / pm.N)) ++rep.triples_violating;
        }

        // Gradient-flow probe: projected descent from random bumps; certify
        // whether any end state passes the critical-point checks.
        auto grid = RadialGrid::geometric(pm.N, 256, 30.0, 4.0);
        std::uniform_real_distribution<double> uw(0.3, 4.0), uc(0.5, 2.0);
        for (int s = 0; s < flow_seeds / static_cast<int>(mu_negative_grid.size()) + 1; ++s) {
            ++rep.flow_runs;
            RadialFunction u(grid);
            const double w1 = uw(rng), w2 = uw(rng), c2 = uc(rng);
            for (int i = 0; i < grid->nodes(); ++i) {
                const double r = grid->r[i];
                u.values[i] = std::exp(-(r / w1) * (r / w1)) +
                              c2 * std::exp(-((r - 2.0) / w2) * ((r - 2.0) / w2));
            }
            u.values.back() = 0.0;
            u = mass_normalize(u, pm.p, pm.a);
            double step = 1e-3;
            for (int k = 0; k < 1500; ++k) {
                const RadialFunction g = discrete_energy_gradient(u, pm);
                double gmax = 0;
                for (double x : g.values) gmax = std::max(gmax, std::fabs(x));
                if (gmax == 0) break;
                for (std::size_t i = 0; i < u.values.size(); ++i)
                    u.values[i] -= step * g.values[i] / gmax;
                u.values.back() = 0.0;
                try {
                    u = mass_normalize(u, pm.p, pm.a);
                } catch (const degenerate_input&) {
                    break;
                }
            }
            const NormTriple t = norm_triple(u, pm);
            if (!(t.A > 0)) continue;
            const double pres = std::fabs(pohozaev(t, pm)) / t.A;
            const LagrangeEval le = lagrange_multiplier(t, pm);
            if (pres <= 1e-3 && le.identity_residual <= 1e-2 && le.lambda < 0.0)
                ++rep.flow_stationary_hits;
        }
    }
    std::ostringstream note;
    note << "empirical corroboration only (no stationary point certified: "
         << rep.flow_stationary_hits << "/" << rep.flow_runs << " hits)";
    rep.note = note.str();
    return rep;
}

RatioProbe probe_grad_q_ratio_unbounded(const Params& prm,
                                        const std::vector<double>& bounds) {
    RatioProbe out;
    out.bounds = bounds;
    out.exceeded.assign(bounds.size(), false);
    const double a_crit = (prm.N - prm.p) / (2.0 * prm.p);
    for (double delta_frac : {0.5, 0.25, 0.12, 0.06, 0.03}) {
        const double a_exp = a_crit * (1.0 - delta_frac);
        for (double R : {4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0, 65536.0}) {
            auto prof = [&](double r) {
                const double cut =
                    r <= R ? 1.0 : (r >= R + 1.0 ? 0.0 : 1.0 - (r - R) * (r - R) * (3.0 - 2.0 * (r - R)));
                return cut * std::pow(1.0 + r * r, -a_exp);
            };
            auto dprof = [&](double r) {
                const double base = std::pow(1.0 + r * r, -a_exp);
                const double dbase = -2.0 * a_exp * r * std::pow(1.0 + r * r, -a_exp - 1.0);
                double cut = 1.0, dcut = 0.0;
                if (r > R && r < R + 1.0) {
                    const double x = r - R;
                    cut = 1.0 - x * x * (3.0 - 2.0 * x);
                    dcut = -6.0 * x * (1.0 - x);
                } else if (r >= R + 1.0) {
                    cut = 0.0;
                }
                return dcut * base + cut * dbase;
            };
            const double omega =
                2.0 * std::pow(std::numbers::pi_v<double>, 0.5 * prm.N) /
                std::tgamma(0.5 * prm.N);
            auto integ = [&](const std::function<double(double)>& f) {
                return omega * integrate_radial(f, 0.5, R + 1.0, 16, 200);
            };
            const double A = integ([&](double r) {
                return std::pow(std::fabs(dprof(r)), prm.p) * std::pow(r, prm.N - 1.0);
            });
            const double B = integ([&](double r) {
                return std::pow(prof(r), prm.q) * std::pow(r, prm.N - 1.0);
            });
            const double m = integ([&](double r) {
                return std::pow(prof(r), prm.p) * std::pow(r, prm.N - 1.0);
            });
            if (!(m > 0) || !(B > 0)) continue;
            const double c = prm.a / std::pow(m, 1.0 / prm.p);
            const double ratio = std::pow(c, prm.p - prm.q) * A / B;
            out.best_ratio = std::max(out.best_ratio, ratio);
        }
    }
    for (std::size_t i = 0; i < bounds.size(); ++i)
        out.exceeded[i] = out.best_ratio > bounds[i];
    return out;
}

} // namespace normsol
