#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "deadcore/oracles.hpp"

using namespace deadcore;
using namespace deadcore::oracles;

TEST_CASE("reference disk profile (fixed-slope family)", "[oracles]") {
    const double R0 = std::sqrt(2.0 * std::numbers::e);

    SECTION("at the critical radius") {
        FixedSlopeDiskProfileN2 up(1.0, R0, Branch::Upper);
        FixedSlopeDiskProfileN2 lo(1.0, R0, Branch::Lower);
        CHECK(up.eval(0.5) == 1.0);
        CHECK(lo.eval(std::sqrt(2.0)) == 0.0);
        CHECK(lo.eval(R0) == Approx(1.0).epsilon(1e-12));
        CHECK(lo.core_edge() == Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SECTION("below the critical radius both branches are constant") {
        for (Branch b : {Branch::Upper, Branch::Lower}) {
            FixedSlopeDiskProfileN2 prof(1.0, 0.7 * R0, b);
            CHECK(prof.eval(0.0) == 1.0);
            CHECK(prof.eval(0.5) == 1.0);
        }
    }
    SECTION("above the critical radius: boundary value and core edge") {
        FixedSlopeDiskProfileN2 prof(1.0, 2.0 * R0, Branch::Lower);
        CHECK(prof.eval(2.0 * R0) == Approx(1.0).epsilon(1e-12));
        CHECK(prof.core_edge() == Approx(2.0 * R0 / std::sqrt(std::numbers::e)).epsilon(1e-12));
        CHECK(prof.eval(prof.core_edge()) == 0.0);
    }
    SECTION("invalid parameters") {
        CHECK_THROWS_AS(FixedSlopeDiskProfileN2(-1.0, 1.0, Branch::Upper), std::domain_error);
        CHECK_THROWS_AS(FixedSlopeDiskProfileN2(1.0, 0.0, Branch::Upper), std::domain_error);
    }
    SECTION("critical-radius energy tie between the two branches") {
        auto pc = RadialPotential::characteristic(1.0);
        FixedSlopeDiskProfileN2 up(1.0, R0, Branch::Upper);
        FixedSlopeDiskProfileN2 lo(1.0, R0, Branch::Lower);
        const double e_up = continuum_energy(up, pc, 2, R0);
        const double e_lo = continuum_energy(lo, pc, 2, R0);
        CHECK(e_up == Approx(std::numbers::e).epsilon(1e-10));
        CHECK(e_lo == Approx(e_up).epsilon(1e-8));
        // the same tie seen through the cell rule, which is first-order at
        // the core-edge jump
        auto up_prof = sample_profile(up, 2, R0, 4000);
        auto lo_prof = sample_profile(lo, 2, R0, 4000);
        CHECK(discrete_energy(lo_prof, pc) ==
              Approx(discrete_energy(up_prof, pc)).epsilon(5e-4));
    }
    SECTION("harmonic in 2d where positive: finite-difference laplacian") {
        FixedSlopeDiskProfileN2 prof(1.0, 2.0 * R0, Branch::Lower);
        const double h = 1e-4;
        for (double r : {3.2, 3.6, 4.0, 4.4}) {
            const double lap = (prof.eval(r + h) - 2.0 * prof.eval(r) + prof.eval(r - h)) / (h * h) +
                               prof.deriv(r) / r;
            CHECK(std::abs(lap) < 1e-4); // O(h^2) residual
        }
    }
}

TEST_CASE("free-boundary disk minimizer", "[oracles]") {
    const double R0 = std::sqrt(2.0 * std::numbers::e);

    SECTION("stationarity condition at the core edge") {
        for (double R : {1.1 * R0, 2.0 * R0, 5.0 * R0}) {
            CharDiskMinimizerN2 prof(1.0, R);
            const double l = prof.core_edge();
            CHECK(std::sqrt(2.0) * l * std::log(R / l) == Approx(1.0).epsilon(1e-10));
            CHECK(prof.c == Approx(std::sqrt(2.0) * l).epsilon(1e-12));
            CHECK(prof.eval(R) == Approx(1.0).epsilon(1e-10));
        }
    }
    SECTION("agrees with the fixed-slope family exactly at the critical radius") {
        CharDiskMinimizerN2 a(1.0, R0);
        FixedSlopeDiskProfileN2 b(1.0, R0, Branch::Lower);
        CHECK(a.core_edge() == Approx(b.core_edge()).epsilon(1e-9));
        for (double r : {1.5, 1.8, 2.1, 2.3})
            CHECK(a.eval(r) == Approx(b.eval(r)).margin(1e-8));
    }
    SECTION("strictly lower energy than the fixed-slope profile off the critical radius") {
        auto pc = RadialPotential::characteristic(1.0);
        const double R = 2.0 * R0;
        const double e_free = continuum_energy(CharDiskMinimizerN2(1.0, R), pc, 2, R);
        const double e_fixed =
            continuum_energy(FixedSlopeDiskProfileN2(1.0, R, Branch::Lower), pc, 2, R);
        CHECK(e_free < e_fixed - 1.5);
        CHECK(e_free == Approx(6.064738).epsilon(1e-5));
        CHECK(e_fixed == Approx(7.873127).epsilon(1e-5));
    }
}

TEST_CASE("first-integral profile in one dimension", "[oracles]") {
    SECTION("linear power law: explicit parabola") {
        auto p = RadialPotential::power_law(1.0, 1.0);
        FirstIntegralProfileN1 prof(p, 3.0);
        const double l = 3.0 - std::sqrt(2.0);
        CHECK(prof.core_edge() == Approx(l).epsilon(1e-12));
        CHECK(prof.eval(3.0) == Approx(1.0).margin(1e-9));
        CHECK(prof.eval(l) == 0.0);
        for (double r : {l + 0.2, l + 0.7, l + 1.2})
            CHECK(prof.eval(r) == Approx(0.5 * (r - l) * (r - l)).margin(1e-9));
    }
    SECTION("characteristic: linear ramp at slope sqrt(2)") {
        auto p = RadialPotential::characteristic(1.0);
        FirstIntegralProfileN1 prof(p, 2.0);
        const double l = 2.0 - 1.0 / std::sqrt(2.0);
        CHECK(prof.core_edge() == Approx(l).epsilon(1e-12));
        for (double r : {l + 0.1, l + 0.4, l + 0.7})
            CHECK(prof.eval(r) == Approx(std::sqrt(2.0) * (r - l)).margin(1e-9));
    }
    SECTION("first integral holds at sampled radii") {
        auto p = RadialPotential::power_law(1.0, 1.0);
        FirstIntegralProfileN1 prof(p, 3.0);
        for (int k = 0; k < 100; ++k) {
            const double r = prof.core_edge() + (k + 0.5) / 100.0 * (3.0 - prof.core_edge());
            const double lhs = 0.5 * prof.deriv(r) * prof.deriv(r);
            const double rhs = p.eval(prof.eval(r));
            REQUIRE(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, rhs));
        }
    }
    SECTION("gamma inversion consistency") {
        auto p = RadialPotential::tabulated({{0.0, 0.5}, {0.4, 2.0}}, 1.0);
        FirstIntegralProfileN1 prof(p, 3.0);
        for (double r : {prof.core_edge() + 0.1, prof.core_edge() + 0.5, 2.9}) {
            const double s = prof.eval(r);
            CHECK(gamma_sqrt2w(p, s) == Approx(r - prof.core_edge()).margin(1e-8));
        }
    }
    SECTION("radius below the integral is rejected") {
        auto p = RadialPotential::power_law(1.0, 1.0);
        CHECK_THROWS_AS(FirstIntegralProfileN1(p, 1.0), precondition_error);
        CHECK_THROWS_AS(FirstIntegralProfileN1(RadialPotential::quadratic(1.0), 10.0),
                        precondition_error);
    }
}

TEST_CASE("cosh reference profile", "[oracles]") {
    CoshProfileN1 prof(1.0, 1.0);
    CHECK(prof.eval(1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(prof.eval(0.0) == Approx(1.0 / std::cosh(std::sqrt(2.0))).epsilon(1e-14));
    CHECK(prof.eval(0.0) == Approx(0.4591).margin(5e-4));
    for (double q : {0.3, 1.0, 2.0})
        for (double R : {0.5, 1.0, 4.0}) CHECK(CoshProfileN1(q, R).eval(0.0) > 0.0);

    SECTION("solves psi'' = 2 psi") {
        const double h = 1e-5;
        for (double r : {0.2, 0.5, 0.8}) {
            const double dd =
                (prof.eval(r + h) - 2.0 * prof.eval(r) + prof.eval(r - h)) / (h * h);
            CHECK(dd == Approx(2.0 * prof.eval(r)).epsilon(1e-5));
        }
    }
    SECTION("constant first integral") {
        for (double r : {0.1, 0.4, 0.9}) {
            const double H = 0.5 * prof.deriv(r) * prof.deriv(r) - prof.eval(r) * prof.eval(r);
            CHECK(H == Approx(prof.hamiltonian()).epsilon(1e-12));
        }
    }
}

TEST_CASE("brute-force oracle guards", "[oracles]") {
    auto pz = RadialPotential::zero(1.0);
    auto bf = brute_force_dp_oracle(pz, 1, 1.0, 1.0, 16, 8);
    CHECK(bf.best.energy == 0.0);
    for (double v : bf.best.values) CHECK(v == 1.0);
    CHECK_THROWS_AS(brute_force_dp_oracle(pz, 1, 1.0, 1.0, 30, 14), resource_error);
}
