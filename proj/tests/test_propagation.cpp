#include <catch2/catch_amalgamated.hpp>

#include "qbat/closed_forms.hpp"
#include "qbat/hamiltonians.hpp"
#include "qbat/observables.hpp"
#include "qbat/propagation.hpp"

#include <random>

using namespace qbat;
namespace cf = qbat::closed_form;

namespace {
constexpr double kG = 0.1;

HermitianOperator random_symmetric(std::size_t dim, unsigned seed, double density = 0.2) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    HermitianOperator h(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        h.add(r, r, coef(rng));
        for (std::size_t c = r + 1; c < dim; ++c) {
            if (pick(rng) < density) h.add(r, c, coef(rng));
        }
    }
    return h;
}

StateVector random_state(std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    StateVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(coef(rng), coef(rng));
    return v / v.norm();
}

ModelParams model(int m, int n, double gamma, Frame frame) {
    ModelParams p;
    p.cells = m;
    p.chargers = n;
    p.g = kG;
    p.gamma = gamma;
    p.frame = frame;
    return p;
}
} // namespace

TEST_CASE("TimeGrid and MixedState validation", "[propagation]") {
    REQUIRE_THROWS_AS(TimeGrid(0.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(TimeGrid(1.0, 1), std::invalid_argument);
    const TimeGrid grid(2.0, 5);
    REQUIRE(grid.dt() == Catch::Approx(0.5));
    REQUIRE(grid.times().back() == Catch::Approx(2.0));

    const StateVector e0 = basis_state(2, 0);
    REQUIRE_THROWS_AS(MixedState({{0.5, e0}, {0.4, e0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(MixedState({{1.5, e0}, {-0.5, e0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(MixedState({{1.0, StateVector(2.0 * e0)}}), std::invalid_argument);
    REQUIRE_NOTHROW(MixedState({{0.5, e0}, {0.5, basis_state(2, 1)}}));
}

TEST_CASE("spectral propagation reproduces the four-state amplitudes", "[propagation]") {
    const int n = 2;  // xi = 2 sqrt(2)
    const ProductBasis basis(2, n);
    const HermitianOperator h = build_spin_charger(model(2, n, 0.0, Frame::Rotating), basis);
    const TimeGrid grid(4.0 / kG, 101);
    const auto states = spectral_propagate(h, ideal_initial_state(basis), grid);

    for (std::size_t i = 0; i < grid.points; ++i) {
        const auto a = cf::two_cell_amplitudes(n, kG, grid.time(i));
        const auto& psi = states[i];
        // the symmetric one-excitation amplitude carries both middle branches
        const Complex middle = std::sqrt(2.0) * a.c2;
        REQUIRE(std::abs(psi[static_cast<Eigen::Index>(basis.index(0, 2))] - a.c4) < 1e-10);
        REQUIRE(std::abs(psi[static_cast<Eigen::Index>(basis.index(1, 1))] - middle) < 1e-10);
        REQUIRE(std::abs(psi[static_cast<Eigen::Index>(basis.index(2, 0))] - a.c1) < 1e-10);
    }
}

TEST_CASE("propagation at t = 0 is the identity", "[propagation]") {
    const auto h = random_symmetric(20, 42);
    const auto psi0 = random_state(20, 43);
    SpectralEvolution ev(h, psi0);
    REQUIRE((ev.at(0.0) - psi0).norm() < 1e-12);
    KrylovPropagator prop(h);
    REQUIRE((prop.step(psi0, 0.0) - psi0).norm() == 0.0);
}

TEST_CASE("spectral and Krylov engines agree on random operators", "[propagation]") {
    const auto h = random_symmetric(50, 7);
    const auto psi0 = random_state(50, 8);
    const TimeGrid grid(20.0, 41);
    const auto spectral = spectral_propagate(h, psi0, grid);
    const auto krylov = krylov_propagate(h, psi0, grid);
    for (std::size_t i = 0; i < grid.points; ++i) {
        REQUIRE((spectral[i] - krylov[i]).norm() < 1e-8);
    }
}

TEST_CASE("Krylov handles the zero operator and tiny subspaces", "[propagation]") {
    HermitianOperator zero(6);
    const auto psi0 = random_state(6, 3);
    const auto states = krylov_propagate(zero, psi0, TimeGrid(10.0, 5));
    for (const auto& psi : states) REQUIRE((psi - psi0).norm() < 1e-14);
}

TEST_CASE("Krylov reproduces the closed-form charging energy", "[propagation]") {
    const ProductBasis basis(2, 2);
    const HermitianOperator h = build_spin_charger(model(2, 2, 0.0, Frame::Rotating), basis);
    const TimeGrid grid(4.0 / kG, 301);
    const auto states = krylov_propagate(h, ideal_initial_state(basis), grid);
    const auto weights = basis.battery_excitation_weights();
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double energy = battery_excitation(states[i], weights) -
                              battery_excitation(states[0], weights);
        REQUIRE(energy == Catch::Approx(cf::two_cell_energy(2, kG, grid.time(i))).margin(1e-8));
    }
}

TEST_CASE("cross-engine agreement on an anisotropic model", "[propagation]") {
    const int m = 30, n = 30;
    const ProductBasis basis(m, n);
    const HermitianOperator h = build_spin_charger(model(m, n, 0.6, Frame::Lab), basis);
    const StateVector psi0 = ideal_initial_state(basis);
    const auto weights = basis.battery_excitation_weights();

    // restrict to the parity block so the dense solve stays quick
    const auto map = reachable_component(h, psi0);
    const HermitianOperator sub = restrict_operator(h, map);
    const StateVector sub_psi = restrict_state(psi0, map);
    const auto sub_w = restrict_weights(weights, map);

    const TimeGrid grid(2.0 / kG, 81);
    const auto spectral = spectral_propagate(sub, sub_psi, grid);
    const auto krylov = krylov_propagate(sub, sub_psi, grid);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double e_s = battery_excitation(spectral[i], sub_w);
        const double e_k = battery_excitation(krylov[i], sub_w);
        REQUIRE(e_s == Catch::Approx(e_k).margin(1e-7));
    }
}

TEST_CASE("unitarity, energy conservation, and reversibility", "[propagation]") {
    const ProductBasis basis(3, 4);
    const HermitianOperator h = build_spin_charger(model(3, 4, 0.8, Frame::Lab), basis);
    const StateVector psi0 = ideal_initial_state(basis);
    const TimeGrid grid(30.0, 61);
    const double e0 = h.expectation(psi0);

    for (const bool use_krylov : {false, true}) {
        const auto states = use_krylov ? krylov_propagate(h, psi0, grid)
                                       : spectral_propagate(h, psi0, grid);
        for (const auto& psi : states) {
            REQUIRE(std::abs(psi.norm() - 1.0) < 1e-9);
            REQUIRE(h.expectation(psi) == Catch::Approx(e0).margin(1e-9));
        }
    }

    SECTION("forward then backward propagation returns the initial state") {
        SpectralEvolution ev(h, psi0);
        const StateVector forward = ev.at(17.3);
        SpectralEvolution back(h, forward);
        REQUIRE((back.at(-17.3) - psi0).norm() < 1e-8);

        KrylovPropagator prop(h);
        const StateVector kf = prop.step(psi0, 17.3);
        REQUIRE((prop.step(kf, -17.3) - psi0).norm() < 1e-8);
    }
}

TEST_CASE("frame equivalence of the stored energy at gamma = 0", "[propagation]") {
    const ProductBasis basis(3, 4);
    const auto weights = basis.battery_excitation_weights();
    const TimeGrid grid(6.0 / kG, 121);
    ChargingSimulation lab(build_spin_charger(model(3, 4, 0.0, Frame::Lab), basis),
                           ideal_initial_state(basis), weights, 1.0, grid);
    ChargingSimulation rot(build_spin_charger(model(3, 4, 0.0, Frame::Rotating), basis),
                           ideal_initial_state(basis), weights, 1.0, grid);
    for (std::size_t i = 0; i < grid.points; ++i) {
        REQUIRE(lab.trace().energy[i] ==
                Catch::Approx(rot.trace().energy[i]).margin(1e-9));
    }
}

TEST_CASE("conserved-block confinement of the propagated support", "[propagation]") {
    SECTION("gamma = 0 keeps the total excitation block") {
        const ProductBasis basis(2, 4);
        const HermitianOperator h = build_spin_charger(model(2, 4, 0.0, Frame::Lab), basis);
        const auto states =
            spectral_propagate(h, ideal_initial_state(basis), TimeGrid(50.0, 26));
        for (const auto& psi : states) {
            double leak = 0.0;
            for (std::size_t nb = 0; nb <= 2; ++nb) {
                for (std::size_t nc = 0; nc <= 4; ++nc) {
                    if (nb + nc != 4) {
                        leak += std::norm(psi[static_cast<Eigen::Index>(basis.index(nb, nc))]);
                    }
                }
            }
            REQUIRE(leak < 1e-10);
        }
    }
    SECTION("gamma > 0 keeps the parity sector") {
        const ProductBasis basis(2, 3);
        const HermitianOperator h = build_spin_charger(model(2, 3, 0.7, Frame::Lab), basis);
        const auto states =
            spectral_propagate(h, ideal_initial_state(basis), TimeGrid(50.0, 26));
        for (const auto& psi : states) {
            double leak = 0.0;
            for (std::size_t nb = 0; nb <= 2; ++nb) {
                for (std::size_t nc = 0; nc <= 3; ++nc) {
                    if ((nb + nc) % 2 != 3 % 2) {
                        leak += std::norm(psi[static_cast<Eigen::Index>(basis.index(nb, nc))]);
                    }
                }
            }
            REQUIRE(leak < 1e-10);
        }
    }
}

TEST_CASE("mixture evolution", "[propagation]") {
    const ProductBasis basis(2, 2);
    const HermitianOperator h = build_spin_charger(model(2, 2, 0.0, Frame::Rotating), basis);
    const auto weights = basis.battery_excitation_weights();
    const auto hook = [&](const StateVector& psi) { return battery_excitation(psi, weights); };
    const TimeGrid grid(4.0 / kG, 101);

    SECTION("a single branch reduces to the pure-state result") {
        const MixedState pure({{1.0, ideal_initial_state(basis)}});
        const auto series = evolve_mixture(h, pure, grid, hook);
        const auto states = spectral_propagate(h, ideal_initial_state(basis), grid);
        for (std::size_t i = 0; i < grid.points; ++i) {
            REQUIRE(series[i] == Catch::Approx(hook(states[i])).margin(1e-12));
        }
    }

    SECTION("thermally degraded charger matches the closed form") {
        for (const double p0 : {0.0, 0.3, 0.7}) {
            const MixedState mix({{1.0 - p0, ideal_initial_state(basis)},
                                  {p0, basis_state(basis.dim(), basis.index(0, 1))}});
            const auto series = evolve_mixture(h, mix, grid, hook);
            for (std::size_t i = 0; i < grid.points; ++i) {
                const double energy = series[i] - series[0];
                REQUIRE(energy ==
                        Catch::Approx(cf::thermal_energy(p0, kG, grid.time(i))).margin(1e-10));
            }
        }
    }

    SECTION("p0 = 1 leaves only the singly-excited branch") {
        const MixedState mix({{1.0, basis_state(basis.dim(), basis.index(0, 1))}});
        const auto series = evolve_mixture(h, mix, grid, hook);
        for (std::size_t i = 0; i < grid.points; ++i) {
            const double s = std::sin(2.0 * kG * grid.time(i));
            REQUIRE(series[i] - series[0] == Catch::Approx(s * s).margin(1e-10));
        }
    }
}
