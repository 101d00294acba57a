// Collective-vs-parallel charging: eta(M) and its power-law exponent for the
// isotropic protocol, next to the cavity-charger reference.

#include "qbat/experiments.hpp"

#include <cstdio>

int main() {
    qbat::SweepConfig cfg;
    cfg.threads = 0;  // hardware concurrency

    const std::vector<int> sizes = {1, 2, 3, 4, 5, 7, 10, 14, 20, 28, 40};
    const auto spin = qbat::eta_scaling(sizes, 0.0, cfg);
    const auto cavity = qbat::tc_scaling(sizes, cfg);

    std::printf("M     eta(spin)   eta(cavity)\n");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        std::printf("%-5d %-11.5f %-11.5f\n", sizes[i], spin.eta[i], cavity.eta[i]);
    }
    std::printf("\nbeta(spin):   local %.4f, global %.4f\n", spin.beta_local, spin.beta_global);
    std::printf("beta(cavity): local %.4f, global %.4f\n", cavity.beta_local,
                cavity.beta_global);
    return 0;
}
