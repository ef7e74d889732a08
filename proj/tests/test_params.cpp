#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsol/errors.hpp"
#include "normsol/params.hpp"

#include <cmath>
#include <random>

using namespace normsol;

TEST_CASE("derived exponents: direct formula evaluation") {
    const Exponents e = derive_exponents(3, 2.0, 4.0);
    CHECK(e.gamma_q == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(e.p_star == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("derived exponents: boundary values q = p and q = p*") {
    CHECK(derive_exponents(3, 2.0, 2.0).gamma_q == doctest::Approx(0.0));
    // N(p*-p)/(p p*) = 1 algebraically.
    const double ps = 3.0 * 2.0 / (3.0 - 2.0);
    CHECK(derive_exponents(3, 2.0, ps).gamma_q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(derive_exponents(5, 2.5, 5.0 * 2.5 / 2.5).gamma_q ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("domain violations are named") {
    CHECK_THROWS_WITH_AS(derive_exponents(3, 1.0, 2.0),
                         doctest::Contains("p > 1"), parameter_error);
    CHECK_THROWS_WITH_AS(derive_exponents(3, 3.0, 4.0),
                         doctest::Contains("p < N"), parameter_error);
    CHECK_THROWS_WITH_AS(derive_exponents(3, 2.0, 1.5),
                         doctest::Contains("q >= p"), parameter_error);
    CHECK_THROWS_WITH_AS(derive_exponents(3, 2.0, 6.5),
                         doctest::Contains("q <= p*"), parameter_error);
    CHECK_THROWS_AS(Params(3, 2.0, 2.0, 1.0, 0.1), parameter_error); // q = p unsupported
    CHECK_THROWS_AS(Params(3, 2.0, 6.0, 1.0, 0.1), parameter_error); // q = p* unsupported
    CHECK_THROWS_AS(Params(3, 2.0, 2.5, 0.0, 0.1), parameter_error);
}

TEST_CASE("mu < 0 accepted at construction") {
    const Params prm(3, 2.0, 2.5, 1.0, -2.0);
    CHECK(prm.mu == -2.0);
}

TEST_CASE("regime classification") {
    CHECK(classify_regime_kind(Params(3, 2, 3.0, 1, 0.1)) == RegimeKind::Subcritical);
    CHECK(classify_regime_kind(Params(4, 2, 3.0, 1, 0.1)) == RegimeKind::MassCritical);
    CHECK(classify_regime_kind(Params(3, 2, 5.0, 1, 0.1)) == RegimeKind::Supercritical);
    // p + p^2/N = 10/3 for (3,2).
    CHECK(Params(3, 2, 3.0, 1, 0.1).mass_critical_q() == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("mass-critical detection tolerance 1e-9 relative") {
    const double qc = 2.0 + 4.0 / 3.0;
    CHECK(classify_regime_kind(Params(3, 2, qc * (1.0 + 1e-10), 1, 0.1)) ==
          RegimeKind::MassCritical);
    CHECK(classify_regime_kind(Params(3, 2, qc * (1.0 + 1e-6), 1, 0.1)) ==
          RegimeKind::Supercritical);
    CHECK(classify_regime_kind(Params(3, 2, qc * (1.0 - 1e-6), 1, 0.1)) ==
          RegimeKind::Subcritical);
}

TEST_CASE("properties over random valid instances") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uN(2.0, 9.99), up(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const int N = 2 + static_cast<int>(uN(rng));
        const double p = 1.0 + up(rng) * (N - 1.0) * 0.98 + 1e-3;
        if (!(p > 1.0 && p < N)) continue;
        const double ps = static_cast<double>(N) * p / (N - p);
        const double q = p + up(rng) * (ps - p) * 0.999;
        if (!(q > p && q < ps)) continue;
        const Params prm(N, p, q, 0.1 + up(rng) * 5, up(rng));
        CHECK(prm.gamma_q > 0.0);
        CHECK(prm.gamma_q < 1.0);
        CHECK(prm.q * (1.0 - prm.gamma_q) > 0.0);
        // sign(q gamma_q - p) = sign(q - p - p^2/N): algebraic identity
        // q gamma_q - p = (N/p)(q - p - p^2/N).
        const double lhs = prm.q_gamma_q() - prm.p;
        const double rhs = (N / prm.p) * (q - prm.mass_critical_q());
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}
