#include <catch2/catch_amalgamated.hpp>

#include "qbat/closed_forms.hpp"
#include "qbat/hamiltonians.hpp"
#include "qbat/observables.hpp"

#include <cmath>

using namespace qbat;
namespace cf = qbat::closed_form;

namespace {
constexpr double kG = 0.1;

ChargingTrace analytic_trace(int n, const TimeGrid& grid) {
    std::vector<double> energy(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        energy[i] = cf::two_cell_energy(n, kG, grid.time(i));
    }
    return ChargingTrace(grid, std::move(energy));
}
} // namespace

TEST_CASE("battery excitation expectation", "[observables]") {
    const ProductBasis basis(2, 4);
    const auto w = basis.battery_excitation_weights();
    REQUIRE(battery_excitation(ideal_initial_state(basis), w) == 0.0);
    REQUIRE(battery_excitation(basis_state(basis.dim(), basis.index(2, 0)), w) == 2.0);

    // M = 2, N = 2 at g t = pi / xi: fully charged
    const ProductBasis small(2, 2);
    const HermitianOperator h = [&] {
        ModelParams p;
        p.cells = 2;
        p.chargers = 2;
        p.g = kG;
        p.frame = Frame::Rotating;
        return build_spin_charger(p, small);
    }();
    SpectralEvolution ev(h, ideal_initial_state(small));
    const double t_full = M_PI / (cf::xi(2) * kG);
    REQUIRE(battery_excitation(ev.at(t_full), small.battery_excitation_weights()) ==
            Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("trace construction pins the endpoints", "[observables]") {
    const TimeGrid grid(10.0, 5);
    const auto trace = ChargingTrace::from_excitation(grid, {0.3, 0.5, 0.9, 0.5, 0.3}, 2.0);
    REQUIRE(trace.energy[0] == 0.0);
    REQUIRE(trace.power[0] == 0.0);
    REQUIRE(trace.energy[2] == Catch::Approx(1.2));
    REQUIRE(trace.power[2] == Catch::Approx(1.2 / 5.0));
    REQUIRE_THROWS_AS(ChargingTrace(grid, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("summarize on the analytic two-cell trace", "[observables]") {
    const int n = 4;  // xi = sqrt(20)
    const TimeGrid grid(8.0 * M_PI / (kG * std::sqrt(double(n))), 4000);
    const auto trace = analytic_trace(n, grid);
    const auto energy_at = [n](double t) { return cf::two_cell_energy(n, kG, t); };
    const auto summary = summarize(trace, energy_at);

    REQUIRE(summary.e_max == Catch::Approx(1.92).margin(1e-6));
    // equal maxima recur; the first attainment is pi/(xi g)
    REQUIRE(summary.t_e == Catch::Approx(cf::two_cell_t_emax(n, kG)).margin(1e-5));
    REQUIRE_FALSE(summary.at_horizon);
    REQUIRE_FALSE(summary.degenerate);

    SECTION("refined maxima never fall below the best grid value") {
        const auto grid_only = summarize(trace);
        REQUIRE(summary.e_max >= grid_only.e_max);
        REQUIRE(summary.p_max >= grid_only.p_max);
    }

    SECTION("the power optimum dominates the energy-peak candidate") {
        REQUIRE(summary.p_max >= summary.e_max / summary.t_e - 1e-12);
    }

    SECTION("grid-density independence of the refined maximum") {
        const TimeGrid dense(grid.t_max, 8000);
        const auto refined = summarize(analytic_trace(n, dense), energy_at);
        REQUIRE(std::abs(refined.e_max - summary.e_max) < 1e-6 * summary.e_max);
    }
}

TEST_CASE("degenerate and horizon-limited traces are flagged", "[observables]") {
    const TimeGrid grid(10.0, 50);
    REQUIRE(summarize(ChargingTrace(grid, std::vector<double>(50, 0.0))).degenerate);

    std::vector<double> rising(50);
    for (std::size_t i = 0; i < 50; ++i) rising[i] = static_cast<double>(i);
    const auto summary = summarize(ChargingTrace(grid, std::move(rising)));
    REQUIRE(summary.at_horizon);
}

TEST_CASE("full charging at M = N = 2", "[observables]") {
    const ProductBasis basis(2, 2);
    ModelParams p;
    p.cells = 2;
    p.chargers = 2;
    p.g = kG;
    p.frame = Frame::Rotating;
    const TimeGrid grid(8.0 * M_PI / (kG * std::sqrt(2.0)), 4000);
    ChargingSimulation sim(build_spin_charger(p, basis), ideal_initial_state(basis),
                           basis.battery_excitation_weights(), 1.0, grid);
    const auto summary = sim.summary();
    REQUIRE(summary.e_max == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(summary.t_e == Catch::Approx(cf::two_cell_t_emax(2, kG)).margin(1e-5));
}

TEST_CASE("two-cell four-charger run reproduces the reported power", "[observables]") {
    const ProductBasis basis(2, 4);
    ModelParams p;
    p.cells = 2;
    p.chargers = 4;
    p.g = kG;
    p.frame = Frame::Rotating;
    const TimeGrid grid(8.0 * M_PI / (kG * 2.0), 4000);
    ChargingSimulation sim(build_spin_charger(p, basis), ideal_initial_state(basis),
                           basis.battery_excitation_weights(), 1.0, grid);
    const auto summary = sim.summary();
    REQUIRE(summary.p_max / kG == Catch::Approx(3.04).margin(0.01));
    REQUIRE(summary.e_max == Catch::Approx(1.92).margin(1e-6));

    SECTION("ideal-state energies stay inside [0, M omega0]") {
        for (const double e : sim.trace().energy) {
            REQUIRE(e >= -1e-9);
            REQUIRE(e <= 2.0 + 1e-9);
        }
    }
}
