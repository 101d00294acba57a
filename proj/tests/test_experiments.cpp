#include <catch2/catch_amalgamated.hpp>

#include "qbat/closed_forms.hpp"
#include "qbat/experiments.hpp"

#include <cmath>

using namespace qbat;
namespace cf = qbat::closed_form;

namespace {
SweepConfig test_config() {
    SweepConfig cfg;
    cfg.threads = 4;
    return cfg;
}
} // namespace

TEST_CASE("charge_point reproduces the two-cell reference numbers", "[experiments]") {
    const SweepConfig cfg = test_config();
    const auto pt = charge_point(sweep_params(cfg, 2, 4, 0.0), cfg);
    REQUIRE(pt.e_over_omega0(cfg.omega0) == Catch::Approx(1.92).margin(1e-6));
    REQUIRE(pt.p_over_gomega0(cfg.g, cfg.omega0) == Catch::Approx(3.04).margin(0.01));
    REQUIRE(pt.t_e * cfg.g == Catch::Approx(M_PI / cf::xi(4)* 1.0).margin(1e-4));
    REQUIRE_FALSE(pt.horizon_warning);
}

TEST_CASE("landscape task validation and ordering", "[experiments]") {
    const SweepConfig cfg = test_config();
    REQUIRE_THROWS_AS(landscape({1, 2}, {1.5}, {0.0}, cfg), std::invalid_argument);

    const auto points = landscape({1, 2}, {1.0, 2.0}, {0.0}, cfg);
    REQUIRE(points.size() == 4);
    // nesting order: ratio, gamma, M
    REQUIRE(points[0].cells == 1);
    REQUIRE(points[0].chargers == 1);
    REQUIRE(points[1].cells == 2);
    REQUIRE(points[1].chargers == 2);
    REQUIRE(points[2].chargers == 2);
    REQUIRE(points[3].chargers == 4);
}

TEST_CASE("landscape trade-off with the charger size", "[experiments]") {
    const SweepConfig cfg = test_config();
    for (const int m : {4, 6, 10}) {
        double prev_e = 1e300, prev_p = -1.0;
        for (const double ratio : {1.0, 2.0, 3.0, 10.0}) {
            const auto pt =
                charge_point(sweep_params(cfg, m, static_cast<int>(ratio) * m, 0.0), cfg);
            const double e = pt.e_over_omega0(cfg.omega0);
            const double p = pt.p_over_sqrtn_gomega0(cfg.g, cfg.omega0);
            REQUIRE(e < prev_e);
            REQUIRE(p > prev_p);
            prev_e = e;
            prev_p = p;
        }
    }
}

TEST_CASE("anisotropy degrades the charging monotonically", "[experiments]") {
    const SweepConfig cfg = test_config();
    for (const int m : {10, 50}) {
        double prev_e = 1e300, prev_p = 1e300;
        for (const double gamma : {0.0, 0.2, 0.6, 1.0}) {
            const auto pt = charge_point(sweep_params(cfg, m, m, gamma), cfg);
            REQUIRE(pt.e_max <= prev_e + 1e-9);
            REQUIRE(pt.p_max <= prev_p + 1e-9);
            prev_e = pt.e_max;
            prev_p = pt.p_max;
        }
    }
}

TEST_CASE("eta scaling basics", "[experiments]") {
    const SweepConfig cfg = test_config();
    REQUIRE_THROWS_AS(eta_scaling({1, 2}, 0.0, cfg), std::invalid_argument);
    REQUIRE_THROWS_AS(eta_scaling({1, 3, 2}, 0.0, cfg), std::invalid_argument);

    const auto fit = eta_scaling({1, 2, 3, 4, 5, 7, 10}, 0.0, cfg);
    REQUIRE(fit.eta.front() == Catch::Approx(1.0).margin(1e-9));
    // frozen cross-implementation reference values
    REQUIRE(fit.eta[1] == Catch::Approx(1.4142).margin(2e-4));
    REQUIRE(fit.eta.back() == Catch::Approx(4.0351).margin(2e-4));
    REQUIRE(fit.beta_local > 0.0);
}

TEST_CASE("slope_fit degenerate cases", "[experiments]") {
    const SweepConfig cfg = test_config();
    LandscapePoint a;
    a.cells = 1;
    a.chargers = 1;
    a.e_max = 1.0;
    a.p_max = 0.08;
    LandscapePoint b = a;
    b.e_max = 2.0;
    b.p_max = 0.22;

    SECTION("two distinct points duplicated give the exact two-point slope") {
        const double slope = slope_fit({a, b, a, b, a, b}, cfg);
        const double dp = (0.22 - 0.08) / (cfg.g * cfg.omega0);
        REQUIRE(slope == Catch::Approx(dp / 1.0));
    }

    SECTION("zero-variance abscissa is rejected") {
        REQUIRE_THROWS_AS(slope_fit({a, a, a}, cfg), std::invalid_argument);
        REQUIRE_THROWS_AS(slope_fit({a, b}, cfg), std::invalid_argument);
    }
}

TEST_CASE("cavity reference points", "[experiments]") {
    const SweepConfig cfg = test_config();
    const auto pt = tc_point(2, 2, 0.0, cfg);
    REQUIRE(pt.e_over_omega0(cfg.omega0) == Catch::Approx(16.0 / 9.0).margin(1e-6));

    SECTION("anisotropic cavity run converges its cutoff") {
        const auto wide = tc_point(1, 1, 0.6, cfg);
        REQUIRE(wide.e_max <= 1.0 + 1e-6);
        REQUIRE(wide.e_max > 0.0);
    }

    SECTION("spin charger beats the cavity for M >= 3 at equal sizes") {
        for (const int m : {3, 4, 6}) {
            const auto spin = charge_point(sweep_params(cfg, m, m, 0.0), cfg);
            const auto cavity = tc_point(m, m, 0.0, cfg);
            REQUIRE(spin.e_max > cavity.e_max);
        }
    }
}

TEST_CASE("parallel-scheme optimum is independent of the anisotropy", "[experiments]") {
    const SweepConfig cfg = test_config();
    const TimeGrid grid = cfg.grid_for(1);
    double reference = -1.0;
    for (const double gamma : {0.0, 0.5, 1.0}) {
        ChargingSimulation sim(build_single_cell(gamma, cfg.omega0, cfg.g),
                               single_cell_initial_state(), single_cell_excitation_weights(),
                               cfg.omega0, grid, cfg.engine);
        const double p_max = sim.summary().p_max;
        if (reference < 0.0) {
            reference = p_max;
        } else {
            REQUIRE(p_max == Catch::Approx(reference).margin(1e-10));
        }
    }
    REQUIRE(reference == Catch::Approx(cf::single_cell_pmax(cfg.g, cfg.omega0).first).margin(1e-9));
}

TEST_CASE("Krylov-path summaries agree with the spectral path", "[experiments]") {
    SweepConfig spectral = test_config();
    spectral.engine.spectral_threshold = 100000;
    SweepConfig krylov = test_config();
    krylov.engine.spectral_threshold = 1;  // everything through Lanczos, refinement included

    const auto a = charge_point(sweep_params(spectral, 20, 20, 1.0), spectral);
    const auto b = charge_point(sweep_params(krylov, 20, 20, 1.0), krylov);
    REQUIRE(b.e_max == Catch::Approx(a.e_max).margin(1e-7));
    REQUIRE(b.p_max == Catch::Approx(a.p_max).margin(1e-7));
    REQUIRE(b.t_e == Catch::Approx(a.t_e).margin(1e-4));
    REQUIRE(b.t_p == Catch::Approx(a.t_p).margin(1e-4));
}

TEST_CASE("crosstalk scan and non-ideal runs at reduced size", "[experiments]") {
    const SweepConfig cfg = test_config();

    SECTION("crosstalk suppression is monotone at the scan points") {
        const auto pts = crosstalk_scan(2, 4, {0.0, 0.1, 1.0, 10.0}, cfg);
        REQUIRE(pts[0].e_over_omega0(cfg.omega0) == Catch::Approx(1.92).margin(1e-6));
        for (std::size_t i = 1; i < pts.size(); ++i) {
            REQUIRE(pts[i].e_max < pts[i - 1].e_max);
        }
    }

    SECTION("charger mixture fractions against a direct recomputation") {
        const auto r = charger_mixture_run(2, 2, {0.5, 0.25, 0.25}, cfg);
        REQUIRE(r.ideal.e_over_omega0(cfg.omega0) == Catch::Approx(2.0).margin(1e-9));
        REQUIRE(r.e_fraction > 0.0);
        REQUIRE(r.e_fraction < 1.0);
        REQUIRE(r.p_fraction < 1.0);
    }

    SECTION("battery mixture with everything ideal is neutral") {
        const auto r = battery_mixture_run(2, 2, {1.0, 0.0, 0.0}, cfg);
        REQUIRE(r.e_fraction == Catch::Approx(1.0).margin(1e-9));
        REQUIRE(r.p_fraction == Catch::Approx(1.0).margin(1e-9));
    }
}
