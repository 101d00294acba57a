// collective.hpp — ladder-operator matrix elements and collective operators
// on a maximal-spin sector.

#pragma once

#include "qbat/basis.hpp"
#include "qbat/operator.hpp"

#include <cmath>
#include <stdexcept>

namespace qbat {

enum class Ladder { Raise, Lower };

namespace detail {
inline bool is_half_integer(double x) {
    return std::abs(2.0 * x - std::round(2.0 * x)) < 1e-12;
}
} // namespace detail

// <j, m±1| J± |j, m> = sqrt(j(j+1) - m(m±1)); zero when the target leaves the sector
inline double ladder_element(double j, double m, Ladder dir) {
    if (!detail::is_half_integer(j) || !detail::is_half_integer(m)) {
        throw std::invalid_argument("ladder_element: j and m must be half-integers");
    }
    if (j < 0.0 || m < -j - 1e-12 || m > j + 1e-12) {
        throw std::invalid_argument("ladder_element: m outside [-j, j]");
    }
    const double target = (dir == Ladder::Raise) ? m + 1.0 : m - 1.0;
    if (target > j + 1e-12 || target < -j - 1e-12) return 0.0;
    const double value = j * (j + 1.0) - m * target;
    return std::sqrt(value);
}

enum class CollectiveOp {
    Jz,            // Pauli-sum convention: eigenvalue 2m on |j, m>
    Jplus,
    Jminus,
    Janticommutator  // J+J- + J-J+, diagonal 2[j(j+1) - m^2]
};

// Sparse matrix of a collective operator over the sector basis (m ascending).
// Jplus/Jminus are not symmetric; the Hermitian members can be wrapped with
// hermitian_from_sparse when needed.
inline Eigen::SparseMatrix<double> build_collective(const SpinSector& sector, CollectiveOp which) {
    const auto dim = static_cast<Eigen::Index>(sector.dim());
    Eigen::SparseMatrix<double> out(dim, dim);
    std::vector<Eigen::Triplet<double>> trip;
    const double j = sector.j();
    switch (which) {
    case CollectiveOp::Jz:
        for (Eigen::Index n = 0; n < dim; ++n) {
            trip.emplace_back(static_cast<int>(n), static_cast<int>(n),
                              2.0 * sector.m(static_cast<std::size_t>(n)));
        }
        break;
    case CollectiveOp::Jplus:
        for (Eigen::Index n = 0; n + 1 < dim; ++n) {
            const double m = sector.m(static_cast<std::size_t>(n));
            trip.emplace_back(static_cast<int>(n + 1), static_cast<int>(n),
                              ladder_element(j, m, Ladder::Raise));
        }
        break;
    case CollectiveOp::Jminus:
        for (Eigen::Index n = 1; n < dim; ++n) {
            const double m = sector.m(static_cast<std::size_t>(n));
            trip.emplace_back(static_cast<int>(n - 1), static_cast<int>(n),
                              ladder_element(j, m, Ladder::Lower));
        }
        break;
    case CollectiveOp::Janticommutator:
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double m = sector.m(static_cast<std::size_t>(n));
            trip.emplace_back(static_cast<int>(n), static_cast<int>(n),
                              2.0 * (j * (j + 1.0) - m * m));
        }
        break;
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline Eigen::SparseMatrix<double> sector_identity(const SpinSector& sector) {
    const auto dim = static_cast<Eigen::Index>(sector.dim());
    Eigen::SparseMatrix<double> out(dim, dim);
    out.setIdentity();
    return out;
}

} // namespace qbat
