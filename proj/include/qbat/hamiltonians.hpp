// hamiltonians.hpp — model parameters and Hamiltonian assembly: spin-charger
// battery (isotropic/anisotropic, optional charger crosstalk), cavity-charger
// benchmark, and the explicit single-cell block.

#pragma once

#include "qbat/basis.hpp"
#include "qbat/collective.hpp"
#include "qbat/operator.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qbat {

enum class Frame { Lab, Rotating };

struct ModelParams {
    int cells{1};       // M battery cells
    int chargers{1};    // N charger spins
    double omega0{1.0}; // level splitting
    double g{0.1};      // battery-charger coupling
    double gamma{0.0};  // anisotropy in [0, 1]
    double g1{0.0};     // charger-charger crosstalk
    Frame frame{Frame::Lab};

    void validate() const {
        if (cells < 1 || chargers < 1) {
            throw std::invalid_argument("ModelParams: need M >= 1 and N >= 1");
        }
        if (gamma < 0.0 || gamma > 1.0) {
            throw std::invalid_argument("ModelParams: gamma must lie in [0, 1]");
        }
        // g = 0 is admitted so crosstalk-only configurations stay expressible
        if (g < 0.0) throw std::invalid_argument("ModelParams: g must be non-negative");
        if (g1 < 0.0) throw std::invalid_argument("ModelParams: g1 must be non-negative");
        if (frame == Frame::Rotating && gamma != 0.0) {
            // counter-rotating terms would become time-dependent in the rotating frame
            throw std::invalid_argument("ModelParams: rotating frame requires gamma = 0");
        }
    }
};

struct TcParams {
    int cells{1};     // M battery cells
    int n_init{1};    // initial photon number
    int cutoff{1};    // Fock truncation (states 0..cutoff)
    double omega0{1.0};
    double g_tilde{0.1};  // cavity coupling, ~ sqrt(N) g in the large-N map
    double gamma{0.0};
    Frame frame{Frame::Lab};

    void validate() const {
        if (cells < 1) throw std::invalid_argument("TcParams: need M >= 1");
        if (n_init < 0) throw std::invalid_argument("TcParams: photon number must be >= 0");
        if (g_tilde <= 0.0) throw std::invalid_argument("TcParams: g_tilde must be positive");
        if (gamma < 0.0 || gamma > 1.0) {
            throw std::invalid_argument("TcParams: gamma must lie in [0, 1]");
        }
        if (cutoff < n_init) {
            throw std::invalid_argument("TcParams: cutoff below initial photon number");
        }
        if (gamma > 0.0 && cutoff < n_init + 2 * cells) {
            // counter-rotating terms populate higher Fock states
            throw std::invalid_argument("TcParams: cutoff below n_init + 2M convergence floor");
        }
        if (frame == Frame::Rotating && gamma != 0.0) {
            throw std::invalid_argument("TcParams: rotating frame requires gamma = 0");
        }
    }
};

// ------------------------------ spin charger ---------------------------------

// H = H0 + H1 (+ crosstalk), collective form over battery (x) charger sectors:
//   H0 = omega0/2 (Sz_B + Jz_C)              [Pauli-sum Jz, eigenvalues 2m]
//   H1 = g [ (gamma S-_B + S+_B) J-_C + h.c. ]
//   crosstalk = g1 (J+J- + J-J+ - N)         [on the charger side]
// Rotating frame drops H0; valid only for gamma = 0 where [H0, H1] = 0.
inline HermitianOperator build_spin_charger(const ModelParams& p, const ProductBasis& basis) {
    p.validate();
    if (basis.cells() != p.cells || basis.chargers() != p.chargers) {
        throw std::invalid_argument("build_spin_charger: basis does not match (M, N)");
    }
    using Sparse = Eigen::SparseMatrix<double>;
    const Sparse sb_plus = build_collective(basis.battery, CollectiveOp::Jplus);
    const Sparse sb_minus = build_collective(basis.battery, CollectiveOp::Jminus);
    const Sparse jc_minus = build_collective(basis.charger, CollectiveOp::Jminus);
    const Sparse ib = sector_identity(basis.battery);
    const Sparse ic = sector_identity(basis.charger);

    Sparse half = kron(Sparse(p.gamma * sb_minus + sb_plus), jc_minus);
    Sparse h = p.g * (half + Sparse(half.transpose()));

    if (p.frame == Frame::Lab) {
        h += 0.5 * p.omega0 *
             (kron(build_collective(basis.battery, CollectiveOp::Jz), ic) +
              kron(ib, build_collective(basis.charger, CollectiveOp::Jz)));
    }
    if (p.g1 > 0.0) {
        Sparse anti = build_collective(basis.charger, CollectiveOp::Janticommutator);
        h += p.g1 * kron(ib, Sparse(anti - double(p.chargers) * ic));
    }
    return hermitian_from_sparse(h);
}

// Chargers fully excited, battery empty: |0...0>_B (x) |m = N/2>_C
inline StateVector ideal_initial_state(const ProductBasis& basis) {
    return basis_state(basis.dim(), basis.index(0, basis.charger.dim() - 1));
}

// ------------------------------ cavity charger -------------------------------

// Battery collective sector (x) truncated Fock space, battery-major:
// k = n_B (cutoff+1) + n_photon.
struct TcBasis {
    SpinSector battery;
    int cutoff{0};

    TcBasis(int cells, int cutoff_) : battery(cells), cutoff(cutoff_) {
        if (cutoff < 0) throw std::invalid_argument("TcBasis: cutoff must be >= 0");
    }

    std::size_t photon_dim() const { return static_cast<std::size_t>(cutoff) + 1; }
    std::size_t dim() const { return battery.dim() * photon_dim(); }

    std::size_t index(std::size_t n_battery, std::size_t n_photon) const {
        if (n_battery >= battery.dim() || n_photon >= photon_dim()) {
            throw std::out_of_range("TcBasis::index: out of range");
        }
        return n_battery * photon_dim() + n_photon;
    }

    std::vector<double> battery_excitation_weights() const {
        std::vector<double> w(dim());
        for (std::size_t k = 0; k < dim(); ++k) {
            w[k] = static_cast<double>(k / photon_dim());
        }
        return w;
    }
};

inline Eigen::SparseMatrix<double> boson_annihilation(int cutoff) {
    Eigen::SparseMatrix<double> b(cutoff + 1, cutoff + 1);
    std::vector<Eigen::Triplet<double>> trip;
    for (int n = 1; n <= cutoff; ++n) {
        trip.emplace_back(n - 1, n, std::sqrt(double(n)));
    }
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

// H = omega0 b'b + omega0/2 Sz_B + g~ [ (gamma S-_B + S+_B) b + h.c. ];
// rotating frame keeps only the coupling (gamma = 0).
inline HermitianOperator build_tc(const TcParams& p) {
    p.validate();
    using Sparse = Eigen::SparseMatrix<double>;
    const TcBasis basis(p.cells, p.cutoff);
    const Sparse sb_plus = build_collective(basis.battery, CollectiveOp::Jplus);
    const Sparse sb_minus = build_collective(basis.battery, CollectiveOp::Jminus);
    const Sparse b = boson_annihilation(p.cutoff);
    const Sparse ib = sector_identity(basis.battery);

    Sparse half = kron(Sparse(p.gamma * sb_minus + sb_plus), b);
    Sparse h = p.g_tilde * (half + Sparse(half.transpose()));
    if (p.frame == Frame::Lab) {
        Sparse number = Sparse(Sparse(b.transpose()) * b);
        Eigen::SparseMatrix<double> iph(p.cutoff + 1, p.cutoff + 1);
        iph.setIdentity();
        h += p.omega0 * kron(ib, number) +
             0.5 * p.omega0 * kron(build_collective(basis.battery, CollectiveOp::Jz), iph);
    }
    return hermitian_from_sparse(h);
}

inline StateVector tc_initial_state(const TcParams& p) {
    const TcBasis basis(p.cells, p.cutoff);
    return basis_state(basis.dim(), basis.index(0, static_cast<std::size_t>(p.n_init)));
}

// ------------------------------- single cell ---------------------------------

// Explicit 4x4 over {|1B 1C>, |1B 0C>, |0B 1C>, |0B 0C>}
inline HermitianOperator build_single_cell(double gamma, double omega0 = 1.0, double g = 0.1) {
    if (gamma < 0.0 || gamma > 1.0) {
        throw std::invalid_argument("build_single_cell: gamma must lie in [0, 1]");
    }
    HermitianOperator h(4);
    h.add(0, 0, omega0);
    h.add(3, 3, -omega0);
    h.add(0, 3, g * gamma);
    h.add(1, 2, g);
    return h;
}

inline std::vector<double> single_cell_excitation_weights() { return {1.0, 1.0, 0.0, 0.0}; }

// |0B 1C>: empty cell, excited charger
inline StateVector single_cell_initial_state() { return basis_state(4, 2); }

} // namespace qbat
