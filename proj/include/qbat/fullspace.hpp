// fullspace.hpp — brute-force reference spaces: per-site spin products on
// either side (battery, charger, or both), non-ideal initial-state mixtures,
// and symmetric-state embeddings for cross-representation checks.

#pragma once

#include "qbat/basis.hpp"
#include "qbat/collective.hpp"
#include "qbat/hamiltonians.hpp"
#include "qbat/operator.hpp"
#include "qbat/propagation.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qbat {

enum class SideKind { Collective, Full };

// Battery side (x) charger side, each either the (n+1)-dim maximal-spin sector
// or the full 2^n product space; flattened battery-major.
struct HybridBasis {
    int cells{1};
    int chargers{1};
    SideKind battery_side{SideKind::Collective};
    SideKind charger_side{SideKind::Collective};

    HybridBasis(int cells_, int chargers_, SideKind battery, SideKind charger)
        : cells(cells_), chargers(chargers_), battery_side(battery), charger_side(charger) {
        if (cells < 1 || chargers < 1) {
            throw std::invalid_argument("HybridBasis: need M >= 1 and N >= 1");
        }
        // keep brute-force spaces small enough for test-time use
        if (battery_side == SideKind::Full && charger_side == SideKind::Full) {
            if (cells + chargers > 14) {
                throw std::invalid_argument("HybridBasis: full x full limited to M + N <= 14");
            }
        } else if (battery_side == SideKind::Full && cells > 12) {
            throw std::invalid_argument("HybridBasis: full battery limited to M <= 12");
        } else if (charger_side == SideKind::Full && chargers > 12) {
            throw std::invalid_argument("HybridBasis: full charger limited to N <= 12");
        }
    }

    static std::size_t side_dim(SideKind kind, int n) {
        return kind == SideKind::Full ? (std::size_t{1} << n) : static_cast<std::size_t>(n) + 1;
    }

    std::size_t battery_dim() const { return side_dim(battery_side, cells); }
    std::size_t charger_dim() const { return side_dim(charger_side, chargers); }
    std::size_t dim() const { return battery_dim() * charger_dim(); }

    std::size_t index(std::size_t battery_state, std::size_t charger_state) const {
        if (battery_state >= battery_dim() || charger_state >= charger_dim()) {
            throw std::out_of_range("HybridBasis::index: out of range");
        }
        return battery_state * charger_dim() + charger_state;
    }

    std::vector<double> battery_excitation_weights() const {
        std::vector<double> w(dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            const std::size_t b = k / charger_dim();
            w[k] = battery_side == SideKind::Full
                       ? static_cast<double>(std::popcount(static_cast<std::uint64_t>(b)))
                       : static_cast<double>(b);
        }
        return w;
    }
};

namespace detail {

// sum_k sigma^+_k on one side space
inline Eigen::SparseMatrix<double> side_raise(SideKind kind, int n) {
    if (kind == SideKind::Collective) {
        return build_collective(SpinSector(n), CollectiveOp::Jplus);
    }
    const auto dim = std::size_t{1} << n;
    Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t b = 0; b < dim; ++b) {
        for (int k = 0; k < n; ++k) {
            if (!(b >> k & 1U)) {
                trip.emplace_back(static_cast<int>(b | (std::size_t{1} << k)),
                                  static_cast<int>(b), 1.0);
            }
        }
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

// sum_k sigma^z_k (Pauli eigenvalues, so 2 popcount - n on the full side)
inline Eigen::SparseMatrix<double> side_z(SideKind kind, int n) {
    if (kind == SideKind::Collective) {
        return build_collective(SpinSector(n), CollectiveOp::Jz);
    }
    const auto dim = std::size_t{1} << n;
    Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t b = 0; b < dim; ++b) {
        const double z = 2.0 * std::popcount(static_cast<std::uint64_t>(b)) - n;
        trip.emplace_back(static_cast<int>(b), static_cast<int>(b), z);
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

// sum_{l != j} (tau^+_l tau^-_j + tau^-_l tau^+_j); equals J+J- + J-J+ - N on
// the collective side
inline Eigen::SparseMatrix<double> side_exchange(SideKind kind, int n) {
    if (kind == SideKind::Collective) {
        const SpinSector sector(n);
        Eigen::SparseMatrix<double> anti = build_collective(sector, CollectiveOp::Janticommutator);
        return Eigen::SparseMatrix<double>(anti - double(n) * sector_identity(sector));
    }
    const auto dim = std::size_t{1} << n;
    Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t b = 0; b < dim; ++b) {
        for (int l = 0; l < n; ++l) {
            for (int j = 0; j < n; ++j) {
                if (l == j) continue;
                // tau^+_l tau^-_j moves one excitation from j to l; the
                // tau^- tau^+ half of the sum doubles every such move
                if ((b >> j & 1U) && !(b >> l & 1U)) {
                    const std::size_t target =
                        (b & ~(std::size_t{1} << j)) | (std::size_t{1} << l);
                    trip.emplace_back(static_cast<int>(target), static_cast<int>(b), 2.0);
                }
            }
        }
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline Eigen::SparseMatrix<double> side_identity(SideKind kind, int n) {
    const auto dim = static_cast<Eigen::Index>(HybridBasis::side_dim(kind, n));
    Eigen::SparseMatrix<double> out(dim, dim);
    out.setIdentity();
    return out;
}

} // namespace detail

// Same model as build_spin_charger, assembled from per-site operators on any
// full side; agrees with the collective engine on permutation-symmetric data.
inline HermitianOperator build_full_hamiltonian(const ModelParams& p, const HybridBasis& basis) {
    p.validate();
    if (basis.cells != p.cells || basis.chargers != p.chargers) {
        throw std::invalid_argument("build_full_hamiltonian: basis does not match (M, N)");
    }
    using Sparse = Eigen::SparseMatrix<double>;
    const Sparse sb_plus = detail::side_raise(basis.battery_side, basis.cells);
    const Sparse sb_minus = Sparse(sb_plus.transpose());
    const Sparse jc_minus = Sparse(detail::side_raise(basis.charger_side, basis.chargers).transpose());
    const Sparse ib = detail::side_identity(basis.battery_side, basis.cells);
    const Sparse ic = detail::side_identity(basis.charger_side, basis.chargers);

    Sparse half = kron(Sparse(p.gamma * sb_minus + sb_plus), jc_minus);
    Sparse h = p.g * (half + Sparse(half.transpose()));
    if (p.frame == Frame::Lab) {
        h += 0.5 * p.omega0 * (kron(detail::side_z(basis.battery_side, basis.cells), ic) +
                               kron(ib, detail::side_z(basis.charger_side, basis.chargers)));
    }
    if (p.g1 > 0.0) {
        h += p.g1 * kron(ib, detail::side_exchange(basis.charger_side, basis.chargers));
    }
    return hermitian_from_sparse(h);
}

// |n excited> Dicke state embedded in a full 2^n side space
inline Eigen::VectorXcd symmetric_side_state(int n_spins, int n_excited) {
    if (n_excited < 0 || n_excited > n_spins) {
        throw std::invalid_argument("symmetric_side_state: excitation count out of range");
    }
    const auto dim = std::size_t{1} << n_spins;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    std::size_t count = 0;
    for (std::size_t b = 0; b < dim; ++b) {
        if (std::popcount(static_cast<std::uint64_t>(b)) == n_excited) {
            v[static_cast<Eigen::Index>(b)] = 1.0;
            ++count;
        }
    }
    return v / std::sqrt(static_cast<double>(count));
}

inline StateVector ideal_initial_state(const HybridBasis& basis) {
    const std::size_t charger_top = basis.charger_side == SideKind::Full
                                        ? (std::size_t{1} << basis.chargers) - 1
                                        : static_cast<std::size_t>(basis.chargers);
    return basis_state(basis.dim(), basis.index(0, charger_top));
}

// ----------------------------- non-ideal mixtures -----------------------------

namespace detail {
inline void check_probabilities(const std::vector<double>& p, std::size_t expected,
                                const char* where) {
    if (p.size() != expected) {
        throw std::invalid_argument(std::string(where) + ": expected " +
                                    std::to_string(expected) + " probabilities");
    }
    double total = 0.0;
    for (const double v : p) {
        if (v < 0.0) throw std::invalid_argument(std::string(where) + ": negative probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string(where) + ": probabilities sum to " +
                                    std::to_string(total));
    }
}
} // namespace detail

// Charger prepared with l-1 of N spins excited (l = 1..N), battery empty;
// p[0] weights the ideal fully-excited charger. All branches are symmetric,
// so the mixture lives in the collective product basis.
inline MixedState nonideal_charger_mixture(const ProductBasis& basis, const std::vector<double>& p) {
    const auto n = static_cast<std::size_t>(basis.chargers());
    detail::check_probabilities(p, n + 1, "nonideal_charger_mixture");
    std::vector<std::pair<double, StateVector>> branches;
    branches.emplace_back(p[0], ideal_initial_state(basis));
    for (std::size_t l = 1; l <= n; ++l) {
        branches.emplace_back(p[l], basis_state(basis.dim(), basis.index(0, l - 1)));
    }
    return MixedState(std::move(branches));
}

// Battery with cell k excited (k = 1..M), charger fully excited; p[0] weights
// the ideal empty battery. Branch states are not permutation-symmetric, so the
// basis must be full on the battery side.
inline MixedState nonideal_battery_mixture(const HybridBasis& basis, const std::vector<double>& p) {
    if (basis.battery_side != SideKind::Full) {
        throw std::invalid_argument("nonideal_battery_mixture: battery side must be full");
    }
    const auto m = static_cast<std::size_t>(basis.cells);
    detail::check_probabilities(p, m + 1, "nonideal_battery_mixture");
    const std::size_t charger_top = basis.charger_side == SideKind::Full
                                        ? (std::size_t{1} << basis.chargers) - 1
                                        : static_cast<std::size_t>(basis.chargers);
    std::vector<std::pair<double, StateVector>> branches;
    branches.emplace_back(p[0], basis_state(basis.dim(), basis.index(0, charger_top)));
    for (std::size_t k = 1; k <= m; ++k) {
        const std::size_t flipped = std::size_t{1} << (k - 1);
        branches.emplace_back(p[k], basis_state(basis.dim(), basis.index(flipped, charger_top)));
    }
    return MixedState(std::move(branches));
}

// ---------------------- thermally degraded second charger ---------------------
// Two cells, two chargers; the second charger starts in diag(p1, p0). Two
// representations are exposed: the collective one treats the singly-excited
// charger as the symmetric |m = 0> state and reproduces the closed form in
// closed_forms.hpp; the product one keeps the literal |1_1 0_2> state, whose
// antisymmetric component stays dark.

inline MixedState thermal_charger_mixture_collective(const ProductBasis& basis, double p0) {
    if (basis.cells() != 2 || basis.chargers() != 2) {
        throw std::invalid_argument("thermal_charger_mixture: model is fixed at M = N = 2");
    }
    if (p0 < 0.0 || p0 > 1.0) {
        throw std::invalid_argument("thermal_charger_mixture: p0 must lie in [0, 1]");
    }
    std::vector<double> p(static_cast<std::size_t>(basis.chargers()) + 1, 0.0);
    p[0] = 1.0 - p0;  // ideal |m = 1>
    p[2] = p0;        // l = 2 branch: one excitation, |m = 0>
    return nonideal_charger_mixture(basis, p);
}

inline MixedState thermal_charger_mixture_product(const HybridBasis& basis, double p0) {
    if (basis.cells != 2 || basis.chargers != 2 || basis.charger_side != SideKind::Full) {
        throw std::invalid_argument(
            "thermal_charger_mixture_product: needs M = N = 2 with a full charger side");
    }
    if (p0 < 0.0 || p0 > 1.0) {
        throw std::invalid_argument("thermal_charger_mixture: p0 must lie in [0, 1]");
    }
    std::vector<std::pair<double, StateVector>> branches;
    branches.emplace_back(1.0 - p0, basis_state(basis.dim(), basis.index(0, 0b11)));
    branches.emplace_back(p0, basis_state(basis.dim(), basis.index(0, 0b01)));
    return MixedState(std::move(branches));
}

} // namespace qbat
