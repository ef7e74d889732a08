#include "normsol/radial.hpp"
#include "normsol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace normsol {

std::shared_ptr<const RadialGrid> RadialGrid::geometric(int N, int M, double R_max,
                                                        double kappa) {
    if (N < 2) throw parameter_error("RadialGrid: N >= 2 violated");
    if (M < 64) throw parameter_error("RadialGrid: M >= 64 violated");
    if (!(R_max > 0.0)) throw parameter_error("RadialGrid: R_max > 0 violated");
    if (!(kappa > 0.0)) throw parameter_error("RadialGrid: kappa > 0 violated");
    auto g = std::make_shared<RadialGrid>();
    g->N = N;
    g->R_max = R_max;
    g->kappa = kappa;
    g->r.resize(M + 1);
    const double denom = std::expm1(kappa);
    for (int i = 0; i <= M; ++i)
        g->r[i] = R_max * std::expm1(kappa * i / M) / denom;
    g->r[0] = 0.0;
    g->r[M] = R_max;
    g->cell_weight.resize(M);
    for (int i = 0; i < M; ++i)
        g->cell_weight[i] = (std::pow(g->r[i + 1], N) - std::pow(g->r[i], N)) / N;
    g->surface_const = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    return g;
}

double RadialGrid::s_cap() const {
    return std::log(R_max / (10.0 * r[1]));
}

double lr_norm(const RadialFunction& u, double r_exp) {
    if (!(r_exp >= 1.0)) throw parameter_error("lr_norm: r_exp >= 1 violated");
    const RadialGrid& g = *u.grid;
    double s = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double um = 0.5 * (u.values[i] + u.values[i + 1]);
        if (um != 0.0) s += std::pow(std::fabs(um), r_exp) * g.cell_weight[i];
    }
    return g.surface_const * s;
}

double grad_lp_norm(const RadialFunction& u, double p) {
    if (!(p > 1.0)) throw parameter_error("grad_lp_norm: p > 1 violated");
    const RadialGrid& g = *u.grid;
    double s = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double gr = (u.values[i + 1] - u.values[i]) / (g.r[i + 1] - g.r[i]);
        if (gr != 0.0) s += std::pow(std::fabs(gr), p) * g.cell_weight[i];
    }
    return g.surface_const * s;
}

RadialFunction mass_normalize(const RadialFunction& u, double p, double a) {
    const double m = lr_norm(u, p);
    if (!(m > 0.0)) throw degenerate_input("mass_normalize: zero profile");
    const double c = a / std::pow(m, 1.0 / p);
    RadialFunction v = u;
    for (double& x : v.values) x *= c;
    return v;
}

NormTriple norm_triple(const RadialFunction& u, const Params& prm) {
    return {grad_lp_norm(u, prm.p), lr_norm(u, prm.q), lr_norm(u, prm.p_star)};
}

double tail_mass_fraction(const RadialFunction& u, double p) {
    const RadialGrid& g = *u.grid;
    const double r_lo = g.R_max / 10.0;
    double tail = 0.0, total = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double um = 0.5 * (u.values[i] + u.values[i + 1]);
        const double c = std::pow(std::fabs(um), p) * g.cell_weight[i];
        total += c;
        if (g.r[i] >= r_lo) tail += c;
    }
    return total > 0.0 ? tail / total : 0.0;
}

PchipInterpolant::PchipInterpolant(const std::vector<double>& x,
                                   const std::vector<double>& y)
    : x_(x), y_(y), m_(x.size(), 0.0) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n)
        throw parameter_error("PchipInterpolant: need >= 3 matching nodes");
    std::vector<double> h(n - 1), d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // One-sided endpoint slopes with monotonicity clamp.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) m = 0.0;
        else if (d0 * d1 <= 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) m = 3.0 * d0;
        return m;
    };
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double PchipInterpolant::operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return 0.0;
    size_t lo = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
    const double h = x_[lo + 1] - x_[lo];
    const double t = (xq - x_[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] + h11 * h * m_[lo + 1];
}

RadialFunction fiber_rescale(const RadialFunction& u, double s, const Params& prm) {
    if (!std::isfinite(s)) throw parameter_error("fiber_rescale: s must be finite");
    const RadialGrid& g = *u.grid;
    const double cap = g.s_cap();
    if (std::fabs(s) > cap)
        throw std::range_error("fiber_rescale: |s| exceeds grid resolution cap");
    const double mass0 = lr_norm(u, prm.p);
    if (!(mass0 > 0.0)) throw degenerate_input("fiber_rescale: zero profile");
    const double amp = std::exp(static_cast<double>(prm.N) * s / prm.p);
    const double es = std::exp(s);
    PchipInterpolant itp(g.r, u.values);
    RadialFunction v(u.grid);
    for (int i = 0; i < g.nodes(); ++i) v.values[i] = amp * itp(es * g.r[i]);
    v.values.back() = 0.0;
    const double mass1 = lr_norm(v, prm.p);
    if (!(mass1 > 0.0)) throw numerical_error("fiber_rescale: profile escaped the grid");
    const double c = std::pow(mass0 / mass1, 1.0 / prm.p);
    for (double& x : v.values) x *= c;
    return v;
}

} // namespace normsol
