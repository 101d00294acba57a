// basis.hpp — collective spin sectors and tensor-product index arithmetic

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbat {

// Half-integer spins are carried as twice their value (two_j) so all sector
// arithmetic stays exact in integers. Excitation counts n = m + j run 0..2j.
struct SpinSector {
    int two_j{0};

    SpinSector() = default;
    explicit SpinSector(int two_j_) : two_j(two_j_) {
        if (two_j < 0) {
            throw std::invalid_argument("SpinSector: 2j must be a non-negative integer");
        }
    }

    std::size_t dim() const { return static_cast<std::size_t>(two_j) + 1; }
    double j() const { return 0.5 * two_j; }

    // m-value of the n-th basis state, ascending from -j to +j
    double m(std::size_t n) const {
        if (n >= dim()) {
            throw std::out_of_range("SpinSector::m: state index out of range");
        }
        return static_cast<double>(n) - j();
    }
};

// Battery collective sector (j_B = M/2) tensor charger collective sector
// (j_C = N/2), flattened battery-major: k = n_B (N+1) + n_C. Excitation
// counts n_B, n_C count spins above the fully-down state on each side.
struct ProductBasis {
    SpinSector battery;
    SpinSector charger;

    ProductBasis(int cells, int chargers)
        : battery(cells), charger(chargers) {
        if (cells < 1 || chargers < 1) {
            throw std::invalid_argument("ProductBasis: need M >= 1 and N >= 1");
        }
    }

    int cells() const { return battery.two_j; }     // M
    int chargers() const { return charger.two_j; }  // N

    std::size_t dim() const { return battery.dim() * charger.dim(); }

    std::size_t index(std::size_t n_battery, std::size_t n_charger) const {
        if (n_battery >= battery.dim() || n_charger >= charger.dim()) {
            throw std::out_of_range(
                "ProductBasis::index: (" + std::to_string(n_battery) + ", " +
                std::to_string(n_charger) + ") outside " +
                std::to_string(battery.dim()) + " x " + std::to_string(charger.dim()));
        }
        return n_battery * charger.dim() + n_charger;
    }

    std::pair<std::size_t, std::size_t> unindex(std::size_t k) const {
        if (k >= dim()) {
            throw std::out_of_range("ProductBasis::unindex: flat index out of range");
        }
        return {k / charger.dim(), k % charger.dim()};
    }

    // <n_B> weights for battery-excitation expectation values
    std::vector<double> battery_excitation_weights() const {
        std::vector<double> w(dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            w[k] = static_cast<double>(k / charger.dim());
        }
        return w;
    }
};

} // namespace qbat
