#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsol/asymptotics.hpp"
#include "normsol/errors.hpp"
#include "normsol/ode.hpp"
#include "normsol/regression.hpp"
#include "normsol/thresholds.hpp"

#include <cmath>

using namespace normsol;

TEST_CASE("regression helpers on synthetic data") {
    std::vector<double> x, y;
    for (int i = 1; i <= 8; ++i) {
        x.push_back(i);
        y.push_back(3.0 * i - 2.0);
    }
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> xs, ys;
    for (int i = 0; i < 6; ++i) {
        xs.push_back(std::pow(2.0, i));
        ys.push_back(5.0 * std::pow(xs.back(), -1.7));
    }
    const LinearFit g = loglog_fit(xs, ys);
    CHECK(g.slope == doctest::Approx(-1.7).epsilon(1e-12));
}

TEST_CASE("sweep mu -> 0 (subcritical): exponents and trends") {
    Params base(3, 2.0, 2.5, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 2.5, gsg);
    const double S = sobolev_constant(3, 2.0);
    const ThresholdSet thr = threshold_constants(base, S, gn_constant(base, p0));

    std::vector<double> mus;
    for (int k = 0; k < 6; ++k) mus.push_back(0.2 * thr.alpha * std::pow(0.5, k));
    SweepOptions so;
    so.track_limit_profile = true;
    const ExponentReport rep = sweep_mu_to_zero(base, mus, thr, &p0, so);

    const double target = base.p / (base.p - base.q_gamma_q()); // 1.6
    CHECK(rep.lambda_slope.target == doctest::Approx(target));
    CHECK(rep.lambda_slope.within_10pct);
    CHECK(rep.grad_slope.within_10pct);
    CHECK(rep.qnorm_slope.target ==
          doctest::Approx(base.q_gamma_q() / (base.p - base.q_gamma_q())));
    CHECK(rep.qnorm_slope.within_10pct);
    CHECK(rep.level_trend_ok); // |m+| -> 0
    CHECK(rep.profile_gap_decreasing);
    REQUIRE(!rep.profile_gaps.empty());
    CHECK(rep.profile_gaps.back() < 0.05);
    SUBCASE("records are sorted by mu") {
        for (std::size_t i = 0; i + 1 < rep.records.size(); ++i)
            CHECK(rep.records[i].mu < rep.records[i + 1].mu);
    }
}

TEST_CASE("sweep mu -> alpha_bar (mass-critical)") {
    Params base(4, 2.0, 3.0, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(4, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(4, 2.0, 3.0, gsg);
    const double S = sobolev_constant(4, 2.0);
    const ThresholdSet thr = threshold_constants(base, S, gn_constant(base, p0));
    REQUIRE(thr.alpha_bar > 0.0);

    std::vector<double> mus;
    for (int k = 1; k <= 6; ++k) mus.push_back(thr.alpha_bar * (1.0 - 0.5 * std::pow(0.5, k)));
    SweepOptions so;
    so.base_R_max = 40.0;
    const ExponentReport rep = sweep_mu_to_alpha_bar(base, mus, thr, nullptr, so);

    CHECK(rep.lambda_slope.target == doctest::Approx(1.0)); // (N-p)/p
    CHECK(rep.lambda_slope.within_10pct);
    CHECK(rep.grad_slope.within_10pct);
    CHECK(rep.level_trend_ok); // m^- -> 0 monotonically

    SUBCASE("mu above alpha_bar refuses and is recorded as non-converged") {
        std::vector<double> bad{0.5 * thr.alpha_bar, 0.7 * thr.alpha_bar,
                                0.8 * thr.alpha_bar, 0.9 * thr.alpha_bar,
                                1.01 * thr.alpha_bar};
        const ExponentReport r2 = sweep_mu_to_alpha_bar(base, bad, thr, nullptr, so);
        CHECK(!r2.records.back().converged);
        CHECK(r2.note.find("refusal") != std::string::npos);
    }
}

TEST_CASE("sweep mu -> infinity (supercritical)") {
    Params base(3, 2.0, 5.0, 1.0, 1.0);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 5.0, gsg);
    const double S = sobolev_constant(3, 2.0);
    const ThresholdSet thr = threshold_constants(base, S, gn_constant(base, p0));

    std::vector<double> mus;
    for (int k = 0; k < 7; ++k) mus.push_back(8.0 * std::pow(2.5, k));
    SweepOptions so;
    so.base_R_max = 40.0;
    so.grid_kappa = 5.0;
    so.track_limit_profile = true;
    const ExponentReport rep = sweep_mu_to_infinity(base, mus, thr, &p0, so);

    const double qgq = base.q_gamma_q();
    CHECK(rep.lambda_slope.target == doctest::Approx(-base.p / (qgq - base.p))); // -0.8
    CHECK(rep.lambda_slope.within_10pct);
    CHECK(rep.grad_slope.within_10pct);
    CHECK(rep.qnorm_slope.target == doctest::Approx(-qgq / (qgq - base.p))); // -1.8
    CHECK(rep.qnorm_slope.within_10pct);
    CHECK(rep.level_trend_ok); // m^- non-increasing
    CHECK(rep.profile_gap_decreasing);
}

TEST_CASE("insufficient data is an error") {
    Params base(3, 2.0, 2.5, 1.0, 0.1);
    auto gsg = RadialGrid::geometric(3, 512, 40.0, 4.0);
    const GroundStateProfile p0 = shoot_ground_state(3, 2.0, 2.5, gsg);
    const double S = sobolev_constant(3, 2.0);
    const ThresholdSet thr = threshold_constants(base, S, gn_constant(base, p0));
    CHECK_THROWS_AS(sweep_mu_to_zero(base, {0.1, 0.2, 0.3}, thr, nullptr, {}),
                    insufficient_data);
    // All points above alpha: refusals leave fewer than 4 converged points.
    std::vector<double> bad{2.0 * thr.alpha, 3.0 * thr.alpha, 4.0 * thr.alpha,
                            5.0 * thr.alpha};
    CHECK_THROWS_AS(sweep_mu_to_zero(base, bad, thr, nullptr, {}), insufficient_data);
}

TEST_CASE("nonexistence scan (mu < 0)") {
    const Params prm(3, 2.0, 2.5, 1.0, -1.0);
    const double S = sobolev_constant(3, 2.0);
    const NonexistenceReport rep = nonexistence_scan(prm, {-1.0, -0.3}, S, 500, 10, 3);
    CHECK(rep.triples_checked == 1000);
    CHECK(rep.triples_violating == 0);
    CHECK(rep.min_grad_excess > 0.0);
    CHECK(rep.min_energy_excess > 0.0);
    CHECK(rep.flow_stationary_hits == 0);
    CHECK(rep.note.find("empirical") != std::string::npos);
    CHECK_THROWS_AS(nonexistence_scan(prm, {0.5}, S, 10, 1, 1), parameter_error);
}

TEST_CASE("gradient/q-norm ratio is unbounded over the sphere") {
    const Params prm(4, 2.0, 3.0, 1.0, 0.1);
    const RatioProbe rp = probe_grad_q_ratio_unbounded(prm, {10.0, 100.0, 1000.0});
    REQUIRE(rp.exceeded.size() == 3);
    CHECK(rp.exceeded[0]);
    CHECK(rp.exceeded[1]);
    CHECK(rp.exceeded[2]);
    CHECK(rp.best_ratio > 1000.0);
}
