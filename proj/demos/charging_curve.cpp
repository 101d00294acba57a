// Minimal library walkthrough: charge two cells with four spins, print the
// energy trace and compare the optimum against the closed form.

#include "qbat/closed_forms.hpp"
#include "qbat/hamiltonians.hpp"
#include "qbat/observables.hpp"

#include <cstdio>

int main() {
    qbat::ModelParams params;
    params.cells = 2;
    params.chargers = 4;
    params.g = 0.1;
    params.frame = qbat::Frame::Rotating;

    const qbat::ProductBasis basis(params.cells, params.chargers);
    const qbat::HermitianOperator h = qbat::build_spin_charger(params, basis);
    const qbat::TimeGrid grid(10.0 / params.g, 2001);

    qbat::ChargingSimulation sim(h, qbat::ideal_initial_state(basis),
                                 basis.battery_excitation_weights(), params.omega0, grid);

    std::printf("gt      E/omega0   P/(g omega0)\n");
    for (std::size_t i = 0; i < grid.points; i += 200) {
        std::printf("%-7.3f %-10.6f %-10.6f\n", grid.time(i) * params.g, sim.trace().energy[i],
                    sim.trace().power[i] / params.g);
    }

    const auto summary = sim.summary();
    std::printf("\nE_max/omega0 = %.8f (closed form %.8f) at gt = %.6f\n", summary.e_max,
                qbat::closed_form::two_cell_emax(params.chargers), summary.t_e * params.g);
    std::printf("P_max/(g omega0) = %.8f at gt = %.6f\n", summary.p_max / params.g,
                summary.t_p * params.g);
    return 0;
}
