#include "normsol/ode.hpp"
#include "normsol/errors.hpp"
#include "normsol/quad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace normsol {

namespace {

inline double sgn_root(double w, double p) {
    // u' = sign(w) |w|^{1/(p-1)} from the flux variable w = |u'|^{p-2} u'.
    if (w == 0.0) return 0.0;
    return (w > 0.0 ? 1.0 : -1.0) * std::pow(std::fabs(w), 1.0 / (p - 1.0));
}

inline double upow(double u, double e) { return u > 0.0 ? std::pow(u, e) : 0.0; }

struct OdeState {
    double u, w;
};

struct DensePoint {
    double r, u, w, du, dw;
};

enum class ShotKind { Overshoot, Undershoot, Decayed, ReachedEnd };

struct ShotResult {
    ShotKind kind;
    std::vector<DensePoint> path;
};

class Shooter {
  public:
    Shooter(int N, double p, double q, const ShootOptions& opt)
        : N_(N), p_(p), q_(q), opt_(opt) {}

    ShotResult integrate(double beta, bool record, double stop_below) const {
        ShotResult out;
        out.kind = ShotKind::ReachedEnd;
        const double r0 = 1e-8;
        const double f0 = upow(beta, p_ - 1.0) - upow(beta, q_ - 1.0);
        OdeState y;
        // Series bootstrap: w ~ f0 r / N, u ~ beta + (p-1)/p (f0 r/N)^{1/(p-1)} r.
        y.w = f0 * r0 / N_;
        y.u = beta + (p_ - 1.0) / p_ * sgn_root(y.w, p_) * r0;
        double r = r0;
        double h = 1e-6;
        auto deriv = [&](double rr, const OdeState& s) {
            OdeState d;
            d.u = sgn_root(s.w, p_);
            d.w = -(N_ - 1.0) / rr * s.w + (upow(s.u, p_ - 1.0) - upow(s.u, q_ - 1.0));
            return d;
        };
        if (record) {
            const OdeState d = deriv(r, y);
            out.path.push_back({r, y.u, y.w, d.u, d.w});
        }
        const double atol = 1e-14 * beta;
        long steps = 0;
        while (r < opt_.r_end) {
            if (++steps > 400000) break;
            h = std::min(h, opt_.r_end - r);
            // Cash-Karp embedded RK4(5).
            static const double a2 = 1. / 5, a3 = 3. / 10, a4 = 3. / 5, a5 = 1., a6 = 7. / 8;
            static const double b21 = 1. / 5;
            static const double b31 = 3. / 40, b32 = 9. / 40;
            static const double b41 = 3. / 10, b42 = -9. / 10, b43 = 6. / 5;
            static const double b51 = -11. / 54, b52 = 5. / 2, b53 = -70. / 27, b54 = 35. / 27;
            static const double b61 = 1631. / 55296, b62 = 175. / 512, b63 = 575. / 13824,
                                b64 = 44275. / 110592, b65 = 253. / 4096;
            static const double c1 = 37. / 378, c3 = 250. / 621, c4 = 125. / 594,
                                c6 = 512. / 1771;
            static const double d1 = 2825. / 27648, d3 = 18575. / 48384, d4 = 13525. / 55296,
                                d5 = 277. / 14336, d6 = 1. / 4;
            const OdeState k1 = deriv(r, y);
            auto at = [&](double f1u, double f1w) { return OdeState{y.u + h * f1u, y.w + h * f1w}; };
            const OdeState k2 = deriv(r + a2 * h, at(b21 * k1.u, b21 * k1.w));
            const OdeState k3 =
                deriv(r + a3 * h, at(b31 * k1.u + b32 * k2.u, b31 * k1.w + b32 * k2.w));
            const OdeState k4 = deriv(r + a4 * h, at(b41 * k1.u + b42 * k2.u + b43 * k3.u,
                                                     b41 * k1.w + b42 * k2.w + b43 * k3.w));
            const OdeState k5 =
                deriv(r + a5 * h, at(b51 * k1.u + b52 * k2.u + b53 * k3.u + b54 * k4.u,
                                     b51 * k1.w + b52 * k2.w + b53 * k3.w + b54 * k4.w));
            const OdeState k6 = deriv(
                r + a6 * h, at(b61 * k1.u + b62 * k2.u + b63 * k3.u + b64 * k4.u + b65 * k5.u,
                               b61 * k1.w + b62 * k2.w + b63 * k3.w + b64 * k4.w + b65 * k5.w));
            const double u5 = y.u + h * (c1 * k1.u + c3 * k3.u + c4 * k4.u + c6 * k6.u);
            const double w5 = y.w + h * (c1 * k1.w + c3 * k3.w + c4 * k4.w + c6 * k6.w);
            const double u4 = y.u + h * (d1 * k1.u + d3 * k3.u + d4 * k4.u + d5 * k5.u + d6 * k6.u);
            const double w4 = y.w + h * (d1 * k1.w + d3 * k3.w + d4 * k4.w + d5 * k5.w + d6 * k6.w);
            const double eu = std::fabs(u5 - u4) / (atol + opt_.ode_tol * std::fabs(y.u));
            const double ew = std::fabs(w5 - w4) / (atol + opt_.ode_tol * std::fabs(y.w));
            const double err = std::max(eu, ew);
            if (err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
                continue;
            }
            r += h;
            y.u = u5;
            y.w = w5;
            h *= std::min(5.0, std::max(0.3, 0.9 * std::pow(std::max(err, 1e-16), -0.2)));
            if (record) {
                const OdeState d = deriv(r, y);
                out.path.push_back({r, y.u, y.w, d.u, d.w});
            }
            if (y.u <= 0.0) {
                out.kind = ShotKind::Overshoot;
                return out;
            }
            if (y.w >= 0.0) {
                out.kind = ShotKind::Undershoot;
                return out;
            }
            if (y.u < stop_below) {
                out.kind = ShotKind::Decayed;
                return out;
            }
        }
        return out;
    }

  private:
    int N_;
    double p_, q_;
    ShootOptions opt_;
};

// Cubic Hermite evaluation over the dense path (u component).
double hermite_u(const std::vector<DensePoint>& path, double r) {
    if (r <= path.front().r) return path.front().u;
    if (r >= path.back().r) return 0.0;
    size_t lo = 0, hi = path.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (path[mid].r <= r) lo = mid; else hi = mid;
    }
    const DensePoint& P0 = path[lo];
    const DensePoint& P1 = path[lo + 1];
    const double h = P1.r - P0.r, t = (r - P0.r) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * P0.u + (t3 - 2 * t2 + t) * h * P0.du +
           (-2 * t3 + 3 * t2) * P1.u + (t3 - t2) * h * P1.du;
}

// Flux-balance residual of the sampled trajectory: on windows [r_a, r_b],
// r^{N-1} w |_a^b must equal \int r^{N-1}(u^{p-1} - u^{q-1}) dr.
double flux_residual(const std::vector<DensePoint>& path, int N, double p, double q) {
    double worst = 0.0, scale = 0.0;
    const size_t n = path.size();
    const size_t stride = std::max<size_t>(1, n / 400);
    for (size_t i = 0; i + stride < n; i += stride) {
        const DensePoint& A = path[i];
        const DensePoint& B = path[i + stride];
        auto rhs = [&](double r) {
            const double u = hermite_u(path, r);
            return std::pow(r, N - 1.0) * (upow(u, p - 1.0) - upow(u, q - 1.0));
        };
        const double lhs = std::pow(B.r, N - 1.0) * B.w - std::pow(A.r, N - 1.0) * A.w;
        const double integral = gauss16(rhs, A.r, B.r);
        auto mag = [&](double r) {
            const double u = hermite_u(path, r);
            return std::pow(r, N - 1.0) * (upow(u, p - 1.0) + upow(u, q - 1.0));
        };
        worst = std::max(worst, std::fabs(lhs - integral));
        scale = std::max(scale, gauss16(mag, A.r, B.r));
    }
    return scale > 0.0 ? worst / scale : worst;
}

} // namespace

GroundStateProfile shoot_ground_state(int N, double p, double q,
                                      std::shared_ptr<const RadialGrid> grid,
                                      const ShootOptions& opt) {
    if (!(p > 1.0) || !(p < N)) throw parameter_error("shoot_ground_state: 1 < p < N violated");
    const double p_star = static_cast<double>(N) * p / (N - p);
    if (!(q > p) || !(q < p_star))
        throw parameter_error("shoot_ground_state: p < q < p* violated");

    Shooter sh(N, p, q, opt);
    // Below beta_V = (q/p)^{1/(q-p)} the potential energy is negative and the
    // trajectory must turn back up; bracket the separatrix above it.
    const double beta_V = std::pow(q / p, 1.0 / (q - p));
    double lo = 1.02 * beta_V, hi = 0.0;
    double b = lo;
    std::ostringstream trace;
    while (b <= opt.beta_max) {
        const ShotResult s = sh.integrate(b, false, 0.0);
        trace << "beta=" << b << " -> " << static_cast<int>(s.kind) << "\n";
        if (s.kind == ShotKind::Overshoot) {
            hi = b;
            break;
        }
        lo = b;
        b *= 1.3;
    }
    if (hi == 0.0)
        throw numerical_error("shoot_ground_state: no overshoot bracket within beta_max; trace:\n" +
                              trace.str());
    for (int it = 0; it < opt.max_bisect; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * hi) break;
        const ShotResult s = sh.integrate(mid, false, 0.0);
        if (s.kind == ShotKind::Overshoot) hi = mid; else lo = mid;
    }
    const double beta_star = 0.5 * (lo + hi);

    // Final pass on the undershoot side down to the matching height, then an
    // analytic exponential tail u ~ r^{-(N-1)/(p(p-1))} e^{-a r}.
    const double u_match = 1e-6 * beta_star;
    ShotResult fin = sh.integrate(lo, true, u_match);
    if (fin.kind == ShotKind::Overshoot)
        fin = sh.integrate(lo * (1.0 - 1e-13), true, u_match);
    if (fin.path.size() < 8)
        throw numerical_error("shoot_ground_state: degenerate final trajectory");

    // Truncate the recorded path at the last monotone point.
    while (fin.path.size() > 2 &&
           (fin.path.back().w >= 0.0 || fin.path.back().u <= 0.0))
        fin.path.pop_back();
    const double r_m = fin.path.back().r;
    const double u_m = fin.path.back().u;
    const double decay_rate = std::pow(p - 1.0, -1.0 / p);
    const double k_alg = (N - 1.0) / (p * (p - 1.0));
    auto tail = [&](double r) {
        return u_m * std::pow(r / r_m, -k_alg) * std::exp(-decay_rate * (r - r_m));
    };

    GroundStateProfile out;
    out.profile = RadialFunction(grid);
    for (int i = 0; i < grid->nodes(); ++i) {
        const double r = grid->r[i];
        double v;
        if (r <= fin.path.front().r) v = hermite_u(fin.path, fin.path.front().r);
        else if (r <= r_m) v = hermite_u(fin.path, r);
        else v = tail(r);
        if (v < opt.decay_floor * 1e-4) v = 0.0;
        out.profile.values[i] = v;
    }
    out.profile.values[0] = beta_star;
    out.profile.values.back() = 0.0;

    out.beta_star = beta_star;
    out.residual = flux_residual(fin.path, N, p, q);
    out.mass_p = lr_norm(out.profile, p);
    out.norms.A = grad_lp_norm(out.profile, p);
    out.norms.B = lr_norm(out.profile, q);
    out.norms.C = lr_norm(out.profile, p_star);
    out.converged = (u_m <= 10 * u_match) && out.residual < 1e-6;
    if (!out.converged) {
        std::ostringstream msg;
        msg << "shoot_ground_state: tail height " << u_m << ", residual " << out.residual;
        out.message = msg.str();
    }
    return out;
}

LimitRescale rescale_to_limit_profile(const RadialFunction& u, const Params& prm,
                                      ScalingLimit scaling, const GroundStateProfile& phi0,
                                      double alpha_bar, double lambda) {
    const RegimeKind kind = classify_regime_kind(prm);
    const double p = prm.p, q = prm.q;
    const double qgq = prm.q_gamma_q();
    const double m0 = phi0.mass_p;
    if (!(m0 > 0.0)) throw dependency_error("rescale_to_limit_profile: phi0 norms missing");

    double c_u = 0.0, c_r = 0.0, sigma0 = 0.0;
    switch (scaling) {
        case ScalingLimit::MuToZeroPlus: {
            if (kind != RegimeKind::Subcritical)
                throw parameter_error("rescale_to_limit_profile: MuToZeroPlus needs subcritical q");
            sigma0 = std::pow(std::pow(prm.a, p) / m0,
                              p * (q - p) / (p * p - prm.N * (q - p)));
            c_u = std::pow(sigma0, 1.0 / (p - q)) *
                  std::pow(prm.mu, -static_cast<double>(prm.N) / (p * (p - qgq)));
            c_r = std::pow(sigma0, -1.0 / p) * std::pow(prm.mu, -1.0 / (p - qgq));
            break;
        }
        case ScalingLimit::MuToInfinity: {
            if (kind != RegimeKind::Supercritical)
                throw parameter_error("rescale_to_limit_profile: MuToInfinity needs supercritical q");
            sigma0 = std::pow(std::pow(prm.a, p) / m0,
                              p * (q - p) / (p * p - prm.N * (q - p)));
            c_u = std::pow(sigma0, 1.0 / (p - q)) *
                  std::pow(prm.mu, static_cast<double>(prm.N) / (p * (qgq - p)));
            c_r = std::pow(sigma0, -1.0 / p) * std::pow(prm.mu, 1.0 / (qgq - p));
            break;
        }
        case ScalingLimit::MuToAlphaBar: {
            if (kind != RegimeKind::MassCritical)
                throw parameter_error("rescale_to_limit_profile: MuToAlphaBar needs mass-critical q");
            if (!(alpha_bar > prm.mu) || !(lambda < 0.0))
                throw parameter_error(
                    "rescale_to_limit_profile: MuToAlphaBar needs alpha_bar > mu and lambda < 0");
            const double s_mu =
                std::pow(alpha_bar - prm.mu, -(prm.N - p) / (p * p));
            sigma0 = -lambda * std::pow(s_mu, p);
            c_u = std::pow(sigma0 / alpha_bar, 1.0 / (p - q)) * std::pow(s_mu, prm.N / p);
            c_r = std::pow(sigma0, -1.0 / p) * s_mu;
            break;
        }
    }

    PchipInterpolant itp(u.grid->r, u.values);
    const auto& tgt = *phi0.profile.grid;
    LimitRescale out;
    out.sigma0 = sigma0;
    out.rescaled = RadialFunction(phi0.profile.grid);
    for (int i = 0; i < tgt.nodes(); ++i) {
        const double arg = c_r * tgt.r[i];
        out.rescaled.values[i] = arg <= u.grid->R_max ? c_u * itp(arg) : 0.0;
    }
    out.rescaled.values.back() = 0.0;
    return out;
}

} // namespace normsol
