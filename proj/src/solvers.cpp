#include "normsol/solvers.hpp"
#include "normsol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace normsol {

namespace {

inline double sgn_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return (x > 0.0 ? 1.0 : -1.0) * std::pow(std::fabs(x), e - 1.0);
}

// Tridiagonal solve with partial pivoting (one fill-in superdiagonal).
void solve_tridiag(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                   std::vector<double> rhs, std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    std::vector<double> d(n, 0.0); // second superdiagonal fill
    for (int k = 0; k + 1 < n; ++k) {
        if (std::fabs(b[k]) < std::fabs(a[k + 1])) {
            std::swap(b[k], a[k + 1]);
            std::swap(c[k], b[k + 1]);
            if (k + 2 < n) std::swap(d[k], c[k + 1]);
            std::swap(rhs[k], rhs[k + 1]);
        }
        if (b[k] == 0.0) b[k] = 1e-300;
        const double m = a[k + 1] / b[k];
        b[k + 1] -= m * c[k];
        if (k + 2 < n) c[k + 1] -= m * d[k];
        rhs[k + 1] -= m * rhs[k];
    }
    x.assign(n, 0.0);
    if (b[n - 1] == 0.0) b[n - 1] = 1e-300;
    x[n - 1] = rhs[n - 1] / b[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
    for (int i = n - 3; i >= 0; --i)
        x[i] = (rhs[i] - c[i] * x[i + 1] - d[i] * x[i + 2]) / b[i];
}

// Discrete functional state: values, gradients, and the sphere multiplier.
struct Eval {
    double A = 0, B = 0, C = 0, mass = 0;
    double E = 0;
    std::vector<double> gE; // dE/du_j, j = 0..M (last pinned to 0)
    std::vector<double> gn; // d(mass/p)/du_j
    double lambda = 0;      // least-squares multiplier <gE, gn>/<gn, gn>
    double res = 0;         // ||gE - lambda gn||_2
};

class Discrete {
  public:
    Discrete(const Params& prm, std::shared_ptr<const RadialGrid> grid,
             double delta_override = -1.0)
        : prm_(prm), g_(std::move(grid)),
          delta_(delta_override >= 0.0 ? delta_override
                                       : regularization_delta(prm, *g_)) {}

    const RadialGrid& grid() const { return *g_; }
    const Params& params() const { return prm_; }

    void evaluate(const std::vector<double>& u, Eval& ev) const {
        const RadialGrid& g = *g_;
        const int M = g.cells();
        const double om = g.surface_const;
        const double p = prm_.p, q = prm_.q, ps = prm_.p_star, mu = prm_.mu;
        const double d2 = delta_ * delta_;
        ev.gE.assign(M + 1, 0.0);
        ev.gn.assign(M + 1, 0.0);
        double A = 0, B = 0, C = 0, mass = 0, Areg = 0;
        for (int i = 0; i < M; ++i) {
            const double h = g.r[i + 1] - g.r[i];
            const double w = g.cell_weight[i];
            const double gr = (u[i + 1] - u[i]) / h;
            double flux, acell;
            if (delta_ == 0.0) {
                const double ag = std::fabs(gr);
                acell = (ag != 0.0) ? std::pow(ag, p) * w : 0.0;
                flux = sgn_pow(gr, p);
            } else {
                acell = (std::pow(gr * gr + d2, 0.5 * p) - std::pow(d2, 0.5 * p)) * w;
                flux = std::pow(gr * gr + d2, 0.5 * (p - 2.0)) * gr;
            }
            Areg += acell;
            const double ag = std::fabs(gr);
            A += (ag != 0.0) ? std::pow(ag, p) * w : 0.0;
            const double ga = om * w * flux / h;
            ev.gE[i] -= ga;
            ev.gE[i + 1] += ga;

            const double um = 0.5 * (u[i] + u[i + 1]);
            const double au = std::fabs(um);
            if (au != 0.0) {
                B += std::pow(au, q) * w;
                C += std::pow(au, ps) * w;
                mass += std::pow(au, p) * w;
            }
            const double gm =
                om * w * 0.5 * (-mu * sgn_pow(um, q) - sgn_pow(um, ps));
            ev.gE[i] += gm;
            ev.gE[i + 1] += gm;
            const double gmass = om * w * 0.5 * sgn_pow(um, p);
            ev.gn[i] += gmass;
            ev.gn[i + 1] += gmass;
        }
        ev.A = om * A;
        ev.B = om * B;
        ev.C = om * C;
        ev.mass = om * mass;
        ev.E = om * Areg / p - mu * ev.B / q - ev.C / ps;
        ev.gE[M] = 0.0;
        ev.gn[M] = 0.0;
        double gg = 0, ge = 0;
        for (int j = 0; j <= M; ++j) {
            gg += ev.gn[j] * ev.gn[j];
            ge += ev.gE[j] * ev.gn[j];
        }
        ev.lambda = gg > 0 ? ge / gg : 0.0;
        double r2 = 0;
        for (int j = 0; j <= M; ++j) {
            const double rj = ev.gE[j] - ev.lambda * ev.gn[j];
            r2 += rj * rj;
        }
        ev.res = std::sqrt(r2);
    }

    // SPD preconditioner: Hessian of the Dirichlet part plus lumped-volume
    // diagonal scaled by 1/tau.
    void preconditioner(const std::vector<double>& u, double inv_tau,
                        std::vector<double>& sub, std::vector<double>& diag,
                        std::vector<double>& sup) const {
        const RadialGrid& g = *g_;
        const int M = g.cells();
        const int n = M; // DOFs 0..M-1
        const double om = g.surface_const;
        const double p = prm_.p;
        const double d2 = delta_ * delta_;
        sub.assign(n, 0.0);
        diag.assign(n, 0.0);
        sup.assign(n, 0.0);
        for (int i = 0; i < M; ++i) {
            const double h = g.r[i + 1] - g.r[i];
            const double w = g.cell_weight[i];
            const double gr = (u[i + 1] - u[i]) / h;
            double psi2;
            if (delta_ == 0.0) {
                const double ag = std::max(std::fabs(gr), 1e-30);
                psi2 = (p - 1.0) * std::pow(ag, p - 2.0);
            } else {
                psi2 = std::pow(gr * gr + d2, 0.5 * (p - 4.0)) *
                       ((p - 1.0) * gr * gr + d2);
            }
            const double t = om * w * psi2 / (h * h);
            if (i < n) diag[i] += t;
            if (i + 1 < n) {
                diag[i + 1] += t;
                sub[i + 1] -= t;
                if (i < n) sup[i] -= t;
            }
            const double lumped = om * w * 0.5 * inv_tau;
            if (i < n) diag[i] += lumped;
            if (i + 1 < n) diag[i + 1] += lumped;
        }
    }

    // Bordered Newton step for gE - lambda gn = 0, mass = a^p.
    // Returns false when the linear algebra failed.
    bool newton_step(std::vector<double>& u, double& lambda, double lm_shift) const {
        const RadialGrid& g = *g_;
        const int M = g.cells();
        const int n = M;
        const double om = g.surface_const;
        const double p = prm_.p, q = prm_.q, ps = prm_.p_star, mu = prm_.mu;
        const double d2 = delta_ * delta_;
        Eval ev;
        evaluate(u, ev);
        std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0);
        const double u_floor = 1e-13 * (1.0 + *std::max_element(u.begin(), u.end()));
        for (int i = 0; i < M; ++i) {
            const double h = g.r[i + 1] - g.r[i];
            const double w = g.cell_weight[i];
            const double gr = (u[i + 1] - u[i]) / h;
            double psi2;
            if (delta_ == 0.0) {
                const double ag = std::max(std::fabs(gr), u_floor / h);
                psi2 = (p - 1.0) * std::pow(ag, p - 2.0);
            } else {
                psi2 = std::pow(gr * gr + d2, 0.5 * (p - 4.0)) *
                       ((p - 1.0) * gr * gr + d2);
            }
            const double t = om * w * psi2 / (h * h);
            const double um = std::max(std::fabs(0.5 * (u[i] + u[i + 1])), u_floor);
            const double mid = om * w * 0.25 *
                               (-mu * (q - 1.0) * std::pow(um, q - 2.0) -
                                (ps - 1.0) * std::pow(um, ps - 2.0) -
                                lambda * (p - 1.0) * std::pow(um, p - 2.0));
            if (i < n) diag[i] += t + mid + lm_shift;
            if (i + 1 < n) {
                diag[i + 1] += t + mid + lm_shift;
                sub[i + 1] += -t + mid;
                if (i < n) sup[i] += -t + mid;
            }
        }
        std::vector<double> F1(n), nvec(n);
        for (int j = 0; j < n; ++j) {
            F1[j] = ev.gE[j] - lambda * ev.gn[j];
            nvec[j] = ev.gn[j];
        }
        const double F2 = (ev.mass - std::pow(prm_.a, p)) / p;
        std::vector<double> y, z;
        solve_tridiag(sub, diag, sup, nvec, y);
        solve_tridiag(sub, diag, sup, F1, z);
        double ny = 0, nz = 0;
        for (int j = 0; j < n; ++j) {
            ny += nvec[j] * y[j];
            nz += nvec[j] * z[j];
        }
        if (ny == 0.0 || !std::isfinite(ny) || !std::isfinite(nz)) return false;
        const double dlambda = (nz - F2) / ny;
        bool ok = true;
        for (int j = 0; j < n; ++j) {
            const double du = z[j] - dlambda * y[j];
            if (!std::isfinite(du)) ok = false;
            u[j] -= du;
        }
        lambda += dlambda;
        return ok && std::isfinite(lambda);
    }

  private:
    Params prm_;
    std::shared_ptr<const RadialGrid> g_;
    double delta_;
};

void renormalize(const Discrete& D, std::vector<double>& u) {
    const RadialGrid& g = D.grid();
    const double p = D.params().p;
    double mass = 0;
    for (int i = 0; i < g.cells(); ++i) {
        const double um = std::fabs(0.5 * (u[i] + u[i + 1]));
        if (um != 0.0) mass += std::pow(um, p) * g.cell_weight[i];
    }
    mass *= g.surface_const;
    if (!(mass > 0)) throw numerical_error("solver: iterate collapsed to zero");
    const double c = std::pow(std::pow(D.params().a, p) / mass, 1.0 / p);
    for (double& x : u) x *= c;
    u.back() = 0.0;
}

RadialFunction gaussian_init(std::shared_ptr<const RadialGrid> grid, const Params& prm,
                             double width) {
    RadialFunction u(grid);
    for (int i = 0; i < grid->nodes(); ++i) {
        const double r = grid->r[i];
        u.values[i] = std::exp(-(r / width) * (r / width));
    }
    u.values.back() = 0.0;
    return mass_normalize(u, prm.p, prm.a);
}

// Gaussian with |grad|_p ~ target after mass normalization, by the dilation
// scaling A(width) = A(1)/width^p.
RadialFunction gaussian_with_gradient(std::shared_ptr<const RadialGrid> grid,
                                      const Params& prm, double target_grad_norm) {
    RadialFunction ref = gaussian_init(grid, prm, 1.0);
    const double A1 = grad_lp_norm(ref, prm.p);
    double w = std::pow(A1, 1.0 / prm.p) / target_grad_norm;
    w = std::min(w, grid->R_max / 6.0);
    w = std::max(w, 4.0 * grid->r[1]);
    return gaussian_init(grid, prm, w);
}

double clamp_fiber(double s, const RadialGrid& g) {
    const double cap = 0.8 * g.s_cap();
    return std::clamp(s, -cap, cap);
}

struct DescentConfig {
    bool clamp_to_ball = false;   // u^+ : keep ||grad u||_p below 0.95 R0
    bool fiber_project = false;   // u^- : project to the fiber maximum
    double R0 = 0.0;
    double delta = -1.0;          // flux regularization override (p < 2 stages)
};

SolverResult run_solver(const Params& prm, std::shared_ptr<const RadialGrid> grid,
                        const SolverOptions& opt, RadialFunction u0,
                        const DescentConfig& cfg) {
    Discrete D(prm, grid, cfg.delta);
    SolverResult result;
    result.manifold_sign = cfg.fiber_project ? ManifoldSign::Minus : ManifoldSign::Plus;

    std::vector<double> u = u0.values;
    renormalize(D, u);

    auto fiber_to = [&](std::vector<double>& vals, double s) {
        RadialFunction f(grid, vals);
        f = fiber_rescale(f, clamp_fiber(s, *grid), prm);
        vals = f.values;
        renormalize(D, vals);
    };

    // Merit: E for the minimizer; the fiber-maximum value for the
    // mountain-pass branch (computed algebraically from the norm triple).
    auto merit_of = [&](const Eval& ev) -> double {
        if (!cfg.fiber_project) return ev.E;
        NormTriple t{ev.A, ev.B, ev.C};
        const FiberPoints fp = fiber_points(t, prm);
        if (fp.cls == FiberClass::NoCritical || !fp.t_u)
            throw threshold_violation("solve_mountain_pass: fiber map lost its critical point");
        return psi(t, *fp.t_u, prm).value;
    };

    Eval ev;
    std::vector<double> sub, diag, sup, step, utrial;
    double tau = 1.0;
    int it = 0;
    bool restarted = false;

    // Initial fiber projection for the minus branch.
    if (cfg.fiber_project) {
        for (int k = 0; k < 8; ++k) {
            RadialFunction f(grid, u);
            const NormTriple t = norm_triple(f, prm);
            const FiberPoints fp = fiber_points(t, prm);
            if (fp.cls == FiberClass::NoCritical || !fp.t_u)
                throw threshold_violation(
                    "solve_mountain_pass: fiber map has no critical point (mu too large)");
            if (std::fabs(*fp.t_u) < 1e-3) break;
            fiber_to(u, *fp.t_u);
        }
    }

    D.evaluate(u, ev);
    double merit = merit_of(ev);

    const int max_iter = opt.max_iter;
    const int Mc = D.grid().cells();
    // Lumped quadrature weights: the mass metric pairing nodal velocities with
    // functional gradients (cell weights span r^N over many decades, so the
    // raw Euclidean pairing is uselessly scaled in high dimension).
    std::vector<double> Wlump(Mc + 1, 0.0);
    for (int i = 0; i < Mc; ++i) {
        const double w = 0.5 * D.grid().surface_const * D.grid().cell_weight[i];
        Wlump[i] += w;
        if (i + 1 < Mc) Wlump[i + 1] += w;
    }
    std::vector<double> gfp; // fiber generator (velocity), mass-orthogonalized
    // Removes the dilation component from the search residual: for the
    // fiber-invariant merit the direction (N/p) u + r u' is neutral, so its
    // covector image W gfp is subtracted instead of being chased.
    auto tangent_residual = [&](const Eval& e, std::vector<double>& rt) {
        rt.resize(Mc + 1);
        for (int j = 0; j <= Mc; ++j) rt[j] = e.gE[j] - e.lambda * e.gn[j];
        if (!cfg.fiber_project) return std::sqrt(std::inner_product(
            rt.begin(), rt.end(), rt.begin(), 0.0));
        gfp.assign(Mc + 1, 0.0);
        const auto& r = D.grid().r;
        for (int j = 0; j < Mc; ++j) {
            const double du =
                j == 0 ? 0.0 : (u[j + 1] - u[j - 1]) / (r[j + 1] - r[j - 1]);
            gfp[j] = (static_cast<double>(prm.N) / prm.p) * u[j] + r[j] * du;
        }
        // W-orthogonalize the fiber velocity against the mass-constraint
        // velocity W^{-1} gn, then remove <rt, gfp> along W gfp.
        double fn = 0, ff = 0;
        for (int j = 0; j < Mc; ++j) {
            fn += gfp[j] * e.gn[j];                    // pairing with the covector gn
            ff += e.gn[j] * e.gn[j] / std::max(Wlump[j], 1e-300); // |W^{-1}gn|_W^2
        }
        if (ff > 0)
            for (int j = 0; j < Mc; ++j)
                gfp[j] -= fn / ff * e.gn[j] / std::max(Wlump[j], 1e-300);
        double rf = 0, f2 = 0;
        for (int j = 0; j < Mc; ++j) {
            rf += rt[j] * gfp[j];                      // dJ along the fiber
            f2 += gfp[j] * gfp[j] * Wlump[j];          // |gfp|_W^2
        }
        if (f2 > 0)
            for (int j = 0; j < Mc; ++j) rt[j] -= rf / f2 * gfp[j] * Wlump[j];
        return std::sqrt(std::inner_product(rt.begin(), rt.end(), rt.begin(), 0.0));
    };
    std::vector<double> rtang;
    int last_newton_it = -1000;
    bool stationary_found = false;

    // Bordered-Newton refinement of the full stationarity system; restores the
    // iterate when unproductive. Returns true when the residual met its goal.
    auto try_newton = [&](double goal) {
        std::vector<double> usave = u;
        double lambda = ev.lambda;
        double shift = 0.0;
        bool ok = true;
        for (int k = 0; k < 60; ++k) {
            const double res_before = ev.res;
            std::vector<double> ubefore = u;
            if (!D.newton_step(u, lambda, shift)) {
                ok = false;
                break;
            }
            u.back() = 0.0;
            D.evaluate(u, ev);
            if (opt.verbose >= 3)
                std::fprintf(stderr, "    newton k=%d res=%.3e (before %.3e) shift=%.1e\n", k,
                             ev.res, res_before, shift);
            if (!std::isfinite(ev.res) || ev.res > 0.9 * res_before) {
                u = ubefore;
                D.evaluate(u, ev);
                shift = (shift == 0.0) ? 1e-8 * (1.0 + ev.A) : shift * 10.0;
                if (shift > 1e4 * (1.0 + ev.A)) {
                    ok = false;
                    break;
                }
                continue;
            }
            shift *= 0.3;
            if (ev.res <= 1e-2 * goal) break;
        }
        if (ok && ev.res <= goal) {
            renormalize(D, u);
            D.evaluate(u, ev);
            merit = merit_of(ev);
            return true;
        }
        if (!ok || !std::isfinite(ev.res)) {
            u = usave;
            D.evaluate(u, ev);
        }
        merit = merit_of(ev);
        return false;
    };

    for (it = 0; it < max_iter; ++it) {
        const double tol = opt.tol_grad * std::max(1.0, ev.A);
        const double pres = std::fabs(psi({ev.A, ev.B, ev.C}, 0.0, prm).d1) /
                            std::max(ev.A, 1e-300);
        if (it % opt.history_stride == 0) result.grad_history.push_back(ev.res);
        const double res_tang = tangent_residual(ev, rtang);

        if (opt.verbose >= 2 && it % opt.verbose == 0)
            std::fprintf(stderr,
                         "it=%d merit=%.10g res=%.3e rtan=%.3e pres=%.3e tau=%.2e A=%.6g\n",
                         it, merit, ev.res, res_tang, pres, tau, ev.A);
        if (ev.res <= tol) {
            if (pres <= opt.tol_pohozaev) {
                result.converged = true;
                break;
            }
            if (stationary_found) {
                // The discrete critical point itself carries this Pohozaev
                // defect; iterating further cannot reduce it.
                result.message = "stationary point found but discrete Pohozaev residual " +
                                 std::to_string(pres) + " above tolerance";
                break;
            }
        }

        // Newton refinement once the descent is inside the basin.
        const double newton_trigger =
            std::max((cfg.fiber_project ? 3e-2 : 1e-4) * std::max(1.0, ev.A), 10.0 * tol);
        if (opt.newton_polish && it - last_newton_it >= 10 && res_tang <= newton_trigger) {
            last_newton_it = it;
            if (try_newton(tol)) {
                stationary_found = true;
                continue; // re-test convergence incl. Pohozaev
            }
        }

        // u^+ : keep the iterate inside A_{R0}.
        if (cfg.clamp_to_ball && std::pow(ev.A, 1.0 / prm.p) > 0.95 * cfg.R0) {
            const FiberPoints fp = fiber_points({ev.A, ev.B, ev.C}, prm);
            if (fp.cls == FiberClass::TwoCritical && fp.s_u) {
                fiber_to(u, *fp.s_u);
                D.evaluate(u, ev);
                merit = merit_of(ev);
                continue;
            }
        }
        // u^- : re-center on the Pohozaev manifold when the tangent steps have
        // let it drift; small drift is tolerated (resampling injects
        // interpolation noise the descent would then have to fight).
        if (cfg.fiber_project) {
            const FiberPoints fp = fiber_points({ev.A, ev.B, ev.C}, prm);
            if (fp.cls == FiberClass::NoCritical || !fp.t_u)
                throw threshold_violation(
                    "solve_mountain_pass: fiber map has no critical point (mu too large)");
            if (std::fabs(*fp.t_u) > 0.01) {
                fiber_to(u, *fp.t_u);
                D.evaluate(u, ev);
                merit = merit_of(ev);
                if (std::fabs(*fp.t_u) > 0.05) continue;
            }
        }

        D.preconditioner(u, 1.0 / tau, sub, diag, sup);
        tangent_residual(ev, rtang);
        std::vector<double> rhs(rtang.begin(), rtang.begin() + Mc);
        solve_tridiag(sub, diag, sup, rhs, step);
        if (cfg.fiber_project && !gfp.empty()) {
            // W-orthogonal projection of the velocity step against the fiber.
            double sf = 0, f2 = 0;
            for (int j = 0; j < Mc; ++j) {
                sf += step[j] * gfp[j] * Wlump[j];
                f2 += gfp[j] * gfp[j] * Wlump[j];
            }
            if (f2 > 0)
                for (int j = 0; j < Mc; ++j) step[j] -= sf / f2 * gfp[j];
            double descent = 0;
            for (int j = 0; j < Mc; ++j) descent += step[j] * rtang[j];
            if (!(descent > 0))
                for (int j = 0; j < Mc; ++j)
                    step[j] = rtang[j] / std::max(Wlump[j], 1e-300);
        }

        bool accepted = false;
        double scale = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
            utrial = u;
            for (int j = 0; j < D.grid().cells(); ++j) utrial[j] -= scale * step[j];
            utrial.back() = 0.0;
            Eval et;
            try {
                renormalize(D, utrial);
                D.evaluate(utrial, et);
                const double mt = merit_of(et);
                if (opt.verbose >= 3)
                    std::fprintf(stderr, "  bt=%d scale=%.2e merit=%.14g trial=%.14g diff=%.3e\n",
                                 bt, scale, merit, mt, mt - merit);
                if (std::isfinite(mt) && mt < merit - 1e-14 * std::fabs(merit)) {
                    u = utrial;
                    ev = et;
                    merit = mt;
                    accepted = true;
                    break;
                }
            } catch (const threshold_violation&) {
                throw;
            } catch (const std::exception&) {
                // collapsed trial; shrink
            }
            scale *= 0.4;
        }
        if (accepted) {
            tau = std::min(tau * 1.5, 1e4);
        } else {
            // Before shrinking further, snap back onto the manifold: a
            // J-stationary iterate can sit on the fiber orbit of the solution
            // with its whole residual pointing along the orbit.
            if (cfg.fiber_project) {
                const FiberPoints fp = fiber_points({ev.A, ev.B, ev.C}, prm);
                if (fp.t_u && std::fabs(*fp.t_u) > 1e-7) {
                    fiber_to(u, *fp.t_u);
                    D.evaluate(u, ev);
                    merit = merit_of(ev);
                    tau = std::max(tau, 1e-2);
                    continue;
                }
            }
            if (opt.newton_polish && it - last_newton_it >= 2) {
                last_newton_it = it;
                if (try_newton(opt.tol_grad * std::max(1.0, ev.A))) {
                    stationary_found = true;
                    continue;
                }
            }
            tau *= 0.2;
            if (tau < 1e-12) {
                result.message = "descent stagnated";
                break;
            }
        }

        // One positivity restart if negative lobes appeared.
        if (!restarted && it % 200 == 199) {
            double mn = 0, mx = 0;
            for (double x : u) {
                mn = std::min(mn, x);
                mx = std::max(mx, x);
            }
            if (mn < -1e-6 * mx) {
                for (double& x : u) x = std::fabs(x);
                renormalize(D, u);
                D.evaluate(u, ev);
                merit = merit_of(ev);
                restarted = true;
                result.positivity_restart = true;
            }
        }
    }

    result.iterations = it;
    RadialFunction prof(grid, u);
    result.profile = prof;
    result.triple = {ev.A, ev.B, ev.C};
    result.level = energy(result.triple, prm);
    result.lambda = lagrange_multiplier(result.triple, prm).lambda;
    result.grad_residual = ev.res;
    result.pohozaev_residual =
        std::fabs(pohozaev(result.triple, prm)) / std::max(ev.A, 1e-300);
    if (!result.converged && result.message.empty())
        result.message = "max_iter reached";
    if (result.converged) {
        const double tol = opt.tol_grad * std::max(1.0, ev.A);
        if (!(ev.res <= tol) || !(result.pohozaev_residual <= opt.tol_pohozaev))
            result.converged = false;
    }
    return result;
}

// For the degenerate/singular range p < 2 the target regularization is too
// stiff to start from: continue in delta, warm-starting each stage.
SolverResult run_with_continuation(const Params& prm,
                                   std::shared_ptr<const RadialGrid> grid,
                                   const SolverOptions& opt, RadialFunction u0,
                                   DescentConfig cfg) {
    if (!(prm.p < 2.0)) return run_solver(prm, grid, opt, std::move(u0), cfg);
    const double delta_final = regularization_delta(prm, *grid);
    const double base = prm.a / grid->R_max;
    SolverResult res;
    RadialFunction init = std::move(u0);
    for (double frac : {1e-2, 1e-4, 1e-6}) {
        cfg.delta = frac * base;
        SolverOptions stage = opt;
        stage.tol_grad = std::max(1e4 * opt.tol_grad, 1e-5);
        stage.max_iter = opt.max_iter / 4;
        stage.newton_polish = false;
        res = run_solver(prm, grid, stage, init, cfg);
        if (!res.profile.values.empty()) init = res.profile;
    }
    cfg.delta = delta_final;
    return run_solver(prm, grid, opt, init, cfg);
}

} // namespace

SolverResult solve_local_min(const Params& prm, const ThresholdSet& thr,
                             std::shared_ptr<const RadialGrid> grid,
                             const SolverOptions& opt, const RadialFunction* init) {
    if (classify_regime_kind(prm) != RegimeKind::Subcritical)
        throw threshold_violation("solve_local_min: subcritical regime required");
    if (!(prm.mu > 0.0))
        throw threshold_violation("solve_local_min: mu > 0 required");
    const double bound = prm.mu * std::pow(prm.a, prm.q * (1.0 - prm.gamma_q));
    if (!(bound < thr.alpha))
        throw threshold_violation("solve_local_min: mu a^{q(1-gamma_q)} >= alpha(N,p,q)");
    if (!(thr.R0 > 0.0))
        throw dependency_error("solve_local_min: thresholds lack R0");

    DescentConfig cfg;
    cfg.clamp_to_ball = true;
    cfg.R0 = thr.R0;
    RadialFunction u0 = init ? mass_normalize(*init, prm.p, prm.a)
                             : gaussian_with_gradient(grid, prm, thr.R0 / 4.0);
    SolverResult res = run_with_continuation(prm, grid, opt, u0, cfg);
    res.manifold_sign = ManifoldSign::Plus;
    if (res.converged && !(res.level < 0.0)) {
        res.converged = false;
        res.message = "local-min level not negative";
    }
    if (res.converged && !(std::pow(res.triple.A, 1.0 / prm.p) <= thr.R0)) {
        res.converged = false;
        res.message = "local minimizer escaped A_{R0}";
    }
    return res;
}

SolverResult solve_mountain_pass(const Params& prm, const ThresholdSet& thr,
                                 std::shared_ptr<const RadialGrid> grid,
                                 const SolverOptions& opt, const RadialFunction* init) {
    const RegimeKind kind = classify_regime_kind(prm);
    if (!(prm.mu > 0.0))
        throw threshold_violation("solve_mountain_pass: mu > 0 required");
    if (kind == RegimeKind::Subcritical) {
        const double bound = prm.mu * std::pow(prm.a, prm.q * (1.0 - prm.gamma_q));
        if (!(bound < thr.alpha))
            throw threshold_violation("solve_mountain_pass: mu a^{q(1-gamma_q)} >= alpha");
    } else if (kind == RegimeKind::MassCritical) {
        if (!(prm.mu < thr.alpha_bar))
            throw threshold_violation("solve_mountain_pass: mu >= alpha_bar (sharp bound)");
    }

    DescentConfig cfg;
    cfg.fiber_project = true;
    RadialFunction u0 = init ? mass_normalize(*init, prm.p, prm.a)
                             : gaussian_init(grid, prm, grid->R_max / 40.0);
    SolverResult res = run_with_continuation(prm, grid, opt, u0, cfg);
    res.manifold_sign = ManifoldSign::Minus;
    if (res.converged) {
        const double psi2 = psi(res.triple, 0.0, prm).d2;
        if (!(psi2 < 0.0)) {
            res.converged = false;
            res.message = "converged point is not a fiber maximum";
        } else if (!(res.level > 0.0)) {
            res.converged = false;
            res.message = "mountain-pass level not positive";
        }
    }
    return res;
}

CertificateReport certify(const SolverResult& result, const Params& prm, double S) {
    CertificateReport rep;
    const NormTriple t = norm_triple(result.profile, prm);
    rep.grad_norm_p = t.A;
    rep.pohozaev_residual = std::fabs(pohozaev(t, prm)) / std::max(t.A, 1e-300);
    const LagrangeEval le = lagrange_multiplier(t, prm);
    rep.lambda = le.lambda;
    rep.lambda_identity_residual = le.identity_residual;

    const auto& v = result.profile.values;
    rep.min_value = *std::min_element(v.begin(), v.end());
    rep.max_value = *std::max_element(v.begin(), v.end());
    rep.nonnegative = rep.min_value >= -1e-8 * std::max(1.0, rep.max_value);
    rep.radially_nonincreasing = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > v[i] + 1e-8 * std::max(1.0, rep.max_value)) {
            rep.radially_nonincreasing = false;
            break;
        }

    const FiberPoints fp = fiber_points(t, prm);
    rep.fiber_class = fp.cls;
    const PsiEval p0 = psi(t, 0.0, prm);
    if (result.manifold_sign == ManifoldSign::Plus) {
        rep.fiber_point_at_solution = fp.s_u ? *fp.s_u : std::nan("");
        rep.psi2_sign_matches = p0.d2 > 0.0;
    } else {
        rep.fiber_point_at_solution = fp.t_u ? *fp.t_u : std::nan("");
        rep.psi2_sign_matches = p0.d2 < 0.0;
    }
    rep.fiber_point_small = std::isfinite(rep.fiber_point_at_solution) &&
                            std::fabs(rep.fiber_point_at_solution) <= 1e-3;

    rep.lambda_sign_ok = prm.mu > 0.0 ? rep.lambda < 0.0 : rep.lambda > 0.0;
    if (prm.mu < 0.0 && std::isfinite(S))
        rep.grad_exceeds_sobolev = t.A > std::pow(S, prm.N / prm.p);

    rep.pohozaev_ok = rep.pohozaev_residual <= 1e-3;
    rep.lambda_identity_ok = rep.lambda_identity_residual <= 1e-2;
    rep.all_passed = rep.pohozaev_ok && rep.lambda_identity_ok && rep.nonnegative &&
                     rep.psi2_sign_matches && rep.fiber_point_small &&
                     (prm.mu <= 0.0 || rep.lambda_sign_ok);
    return rep;
}

} // namespace normsol
