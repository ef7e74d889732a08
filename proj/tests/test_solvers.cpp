#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsol/errors.hpp"
#include "normsol/ode.hpp"
#include "normsol/solvers.hpp"
#include "normsol/thresholds.hpp"

#include <cmath>
#include <random>

using namespace normsol;

namespace {

struct Instance {
    Params prm;
    ThresholdSet thr;
};

Instance subcritical_instance(double mu_frac = 0.5) {
    Params base(3, 2.0, 2.5, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 2.5, gsg);
    const double S = sobolev_constant(3, 2.0);
    const double C_gn = gn_constant(base, p0);
    ThresholdSet thr0 = threshold_constants(base, S, C_gn);
    Params prm = base.with_mu(mu_frac * thr0.alpha);
    return {prm, threshold_constants(prm, S, C_gn)};
}

Instance masscritical_instance(double mu_frac = 0.5) {
    Params base(4, 2.0, 3.0, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(4, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(4, 2.0, 3.0, gsg);
    const double S = sobolev_constant(4, 2.0);
    const double C_gn = gn_constant(base, p0);
    ThresholdSet thr0 = threshold_constants(base, S, C_gn);
    Params prm = base.with_mu(mu_frac * thr0.alpha_bar);
    return {prm, threshold_constants(prm, S, C_gn)};
}

} // namespace

TEST_CASE("local minimizer u+ on the subcritical instance") {
    const Instance inst = subcritical_instance();
    auto grid = RadialGrid::geometric(3, 512, 50.0, 4.0);
    const SolverResult up = solve_local_min(inst.prm, inst.thr, grid);
    REQUIRE(up.converged);
    CHECK(up.level < 0.0);
    CHECK(up.lambda < 0.0);
    CHECK(up.pohozaev_residual <= 1e-3);
    CHECK(std::pow(up.triple.A, 1.0 / inst.prm.p) <= inst.thr.R0);

    SUBCASE("projected-gradient history is recorded") {
        CHECK(!up.grad_history.empty());
        CHECK(up.grad_history.front() > up.grad_residual);
    }
    SUBCASE("mass conserved at the solution to 1e-12") {
        CHECK(lr_norm(up.profile, inst.prm.p) ==
              doctest::Approx(std::pow(inst.prm.a, inst.prm.p)).epsilon(1e-12));
    }
    SUBCASE("fiber point s_u ~ 0 at the solution") {
        const FiberPoints fp = fiber_points(up.triple, inst.prm);
        REQUIRE(fp.cls == FiberClass::TwoCritical);
        CHECK(std::fabs(*fp.s_u) <= 1e-3);
    }
    SUBCASE("independence from initialization to 1e-4 relative") {
        RadialFunction init2(grid);
        for (int i = 0; i < grid->nodes(); ++i) {
            const double r = grid->r[i];
            init2.values[i] = 1.0 / (1.0 + std::pow(r / 7.0, 4.0));
        }
        init2.values.back() = 0.0;
        const SolverResult up2 = solve_local_min(inst.prm, inst.thr, grid, {}, &init2);
        REQUIRE(up2.converged);
        CHECK(up2.level == doctest::Approx(up.level).epsilon(1e-4));
    }
    SUBCASE("certificate passes at the stated tolerances") {
        const CertificateReport cert = certify(up, inst.prm, inst.thr.S);
        CHECK(cert.all_passed);
        CHECK(cert.pohozaev_ok);
        CHECK(cert.lambda_identity_ok);
        CHECK(cert.nonnegative);
        CHECK(cert.radially_nonincreasing);
        CHECK(cert.psi2_sign_matches);
    }
    SUBCASE("1% perturbed profile fails both residual certificates") {
        SolverResult bad = up;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> un(-1.0, 1.0);
        for (double& x : bad.profile.values) x *= 1.0 + 0.01 * un(rng);
        bad.profile.values.back() = 0.0;
        const CertificateReport cert = certify(bad, inst.prm, inst.thr.S);
        CHECK(cert.pohozaev_residual > 1e-3);
        CHECK(cert.lambda_identity_residual > 1e-2);
        CHECK(!cert.all_passed);
    }
}

TEST_CASE("mountain pass u- on the subcritical instance, level ordering") {
    const Instance inst = subcritical_instance();
    auto grid = RadialGrid::geometric(3, 512, 50.0, 4.0);
    const SolverResult up = solve_local_min(inst.prm, inst.thr, grid);
    const SolverResult um = solve_mountain_pass(inst.prm, inst.thr, grid);
    REQUIRE(up.converged);
    REQUIRE(um.converged);
    const double SNpN = std::pow(inst.thr.S, inst.prm.N / inst.prm.p) / inst.prm.N;

    CHECK(up.level < 0.0);
    CHECK(um.level > 0.0);
    CHECK(um.level < SNpN);
    // Energy gap of the two-state geometry.
    CHECK(um.level < up.level + SNpN - 1e-3);
    CHECK(um.lambda < 0.0);
    CHECK(psi(um.triple, 0.0, inst.prm).d2 < 0.0);
    CHECK(um.pohozaev_residual <= 1e-3);
    const CertificateReport cert = certify(um, inst.prm, inst.thr.S);
    CHECK(cert.all_passed);
}

TEST_CASE("mass-critical window") {
    const Instance inst = masscritical_instance(0.5);
    auto grid = RadialGrid::geometric(4, 512, 30.0, 5.0);
    const SolverResult um = solve_mountain_pass(inst.prm, inst.thr, grid);
    REQUIRE(um.converged);
    const double SNpN = std::pow(inst.thr.S, 2.0) / 4.0;
    CHECK(um.level > 0.0);
    CHECK(um.level < SNpN);
    CHECK(um.lambda < 0.0);

    SUBCASE("mu >= alpha_bar is refused") {
        const Params hot = inst.prm.with_mu(inst.thr.alpha_bar * 1.0);
        CHECK_THROWS_AS(solve_mountain_pass(hot, inst.thr, grid), threshold_violation);
        const Params hotter = inst.prm.with_mu(inst.thr.alpha_bar * 1.2);
        CHECK_THROWS_AS(solve_mountain_pass(hotter, inst.thr, grid), threshold_violation);
    }
}

TEST_CASE("mountain-pass level matches the inf-max characterization") {
    // m^- = inf over the sphere of the fiber maximum: every trial profile's
    // fiber maximum is an upper bound, and a good trial family should come
    // close from above.
    const Instance inst = masscritical_instance(0.5);
    auto grid = RadialGrid::geometric(4, 768, 30.0, 5.0);
    const SolverResult um = solve_mountain_pass(inst.prm, inst.thr, grid);
    REQUIRE(um.converged);
    double family_min = 1e300;
    for (double w = 0.3; w <= 6.0; w *= 1.12) {
        RadialFunction u(grid);
        for (int i = 0; i < grid->nodes(); ++i) {
            const double r = grid->r[i];
            u.values[i] = std::exp(-(r / w) * (r / w));
        }
        u.values.back() = 0.0;
        u = mass_normalize(u, inst.prm.p, inst.prm.a);
        const NormTriple t = norm_triple(u, inst.prm);
        const FiberPoints fp = fiber_points(t, inst.prm);
        REQUIRE(fp.cls == FiberClass::OneCritical);
        const double fiber_max = psi(t, *fp.t_u, inst.prm).value;
        CHECK(um.level <= fiber_max * (1.0 + 1e-9));
        family_min = std::min(family_min, fiber_max);
    }
    // Gaussians are a decent but not optimal family; the solver must beat
    // them, and not by an implausible margin.
    CHECK(um.level <= family_min);
    CHECK(um.level >= 0.5 * family_min);
}

TEST_CASE("supercritical mountain pass") {
    Params prm(3, 2.0, 5.0, 1.0, 2.0);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 5.0, gsg);
    const double S = sobolev_constant(3, 2.0);
    const ThresholdSet thr = threshold_constants(prm, S, gn_constant(prm, p0));
    auto grid = RadialGrid::geometric(3, 512, 50.0, 5.0);
    const SolverResult um = solve_mountain_pass(prm, thr, grid);
    REQUIRE(um.converged);
    CHECK(um.level > 0.0);
    CHECK(um.lambda < 0.0);
    CHECK(um.pohozaev_residual <= 1e-3);
}

TEST_CASE("mountain pass mu -> 0 endpoint approaches the Sobolev level") {
    // Along mu halving, m^- increases toward S^{N/p}/N from below and the
    // state becomes bubble-like: A and C within 2% of S^{N/p} at the end.
    Params base(3, 2.0, 2.5, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 2.5, gsg);
    const double S = sobolev_constant(3, 2.0);
    const double C_gn = gn_constant(base, p0);
    const ThresholdSet thr0 = threshold_constants(base, S, C_gn);
    const double SNp = std::pow(S, 1.5), bound = SNp / 3.0;
    // The near-bubble endpoint has a slowly decaying tail; it needs the wide
    // fine grid.
    auto grid = RadialGrid::geometric(3, 1536, 200.0, 6.0);
    RadialFunction prev;
    bool have = false;
    double last_level = -1e300, final_A = 0.0, final_C = 0.0;
    for (double frac : {0.5, 0.25, 0.125, 0.0625}) {
        const Params prm = base.with_mu(frac * thr0.alpha);
        const ThresholdSet thr = threshold_constants(prm, S, C_gn);
        const SolverResult um =
            solve_mountain_pass(prm, thr, grid, {}, have ? &prev : nullptr);
        REQUIRE(um.converged);
        CHECK(um.level > last_level);
        CHECK(um.level < bound);
        last_level = um.level;
        final_A = um.triple.A;
        final_C = um.triple.C;
        prev = um.profile;
        have = true;
    }
    CHECK(bound - last_level < 0.05 * bound);
    CHECK(std::fabs(final_A / SNp - 1.0) <= 0.02);
    CHECK(std::fabs(final_C / SNp - 1.0) <= 0.02);
}

TEST_CASE("solver refusals") {
    const Instance inst = subcritical_instance();
    auto grid = RadialGrid::geometric(3, 256, 50.0, 4.0);
    SUBCASE("mu above alpha") {
        const Params hot = inst.prm.with_mu(1.05 * inst.thr.alpha);
        CHECK_THROWS_AS(solve_local_min(hot, inst.thr, grid), threshold_violation);
        CHECK_THROWS_AS(solve_mountain_pass(hot, inst.thr, grid), threshold_violation);
    }
    SUBCASE("mu <= 0") {
        CHECK_THROWS_AS(solve_local_min(inst.prm.with_mu(-0.5), inst.thr, grid),
                        threshold_violation);
        CHECK_THROWS_AS(solve_mountain_pass(inst.prm.with_mu(0.0), inst.thr, grid),
                        threshold_violation);
    }
    SUBCASE("wrong regime for the local minimizer") {
        const Params super(3, 2.0, 5.0, 1.0, 0.5);
        CHECK_THROWS_AS(solve_local_min(super, inst.thr, grid), threshold_violation);
    }
}

TEST_CASE("levels are non-increasing in the mass radius a") {
    // Shared mu admissible for both radii; a1 < a2.
    Params base(3, 2.0, 2.5, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 2.5, gsg);
    const double S = sobolev_constant(3, 2.0);
    const double C_gn = gn_constant(base, p0);
    const double a1 = 1.0, a2 = 1.15;
    const ThresholdSet thr_a2 =
        threshold_constants(base.with_a(a2), S, C_gn);
    const double mu = 0.4 * thr_a2.alpha /
                      std::pow(a2, base.q * (1.0 - base.gamma_q)); // admissible at both
    // Smaller mu pushes u^- toward the bubble; the discrete Pohozaev residual
    // is quadrature-limited there and needs the finer grid.
    auto grid = RadialGrid::geometric(3, 1024, 100.0, 5.0);

    double mp[2], mm[2];
    int k = 0;
    for (double a : {a1, a2}) {
        const Params pm(3, 2.0, 2.5, a, mu);
        const ThresholdSet thr = threshold_constants(pm, S, C_gn);
        const SolverResult up = solve_local_min(pm, thr, grid);
        const SolverResult um = solve_mountain_pass(pm, thr, grid);
        REQUIRE(up.converged);
        REQUIRE(um.converged);
        mp[k] = up.level;
        mm[k] = um.level;
        ++k;
    }
    CHECK(mp[0] >= mp[1] - 1e-4);
    CHECK(mm[0] >= mm[1] - 1e-4);
}

TEST_CASE("certify reports the gradient excess over S^{N/p} for mu < 0 inputs") {
    // A synthetic Pohozaev-manifold member for mu < 0 must carry
    // ||grad u||_p^p > S^{N/p}; certify reports the comparison when S is given.
    const double S = sobolev_constant(3, 2.0);
    const Params prm(3, 2.0, 2.5, 1.0, -1.0);
    auto grid = RadialGrid::geometric(3, 512, 60.0, 5.0);
    // A un-cut bubble carries A ~ C ~ S^{N/p}; adding mass pushes A above it.
    const double d = std::pow(3.0, 0.25);
    SolverResult fake;
    fake.profile = RadialFunction(grid);
    for (int i = 0; i < grid->nodes(); ++i) {
        const double r = grid->r[i];
        fake.profile.values[i] = 1.15 * d / std::sqrt(1.0 + r * r);
    }
    fake.profile.values.back() = 0.0;
    fake.manifold_sign = ManifoldSign::Minus;
    fake.triple = norm_triple(fake.profile, prm);
    const CertificateReport cert = certify(fake, prm, S);
    CHECK(cert.grad_exceeds_sobolev);
    CHECK(cert.grad_norm_p > std::pow(S, 1.5));
}
