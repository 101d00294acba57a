// operator.hpp — sparse real-symmetric operator storage and state-vector helpers

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qbat {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

// Every Hamiltonian in this model is real in its working basis, so a Hermitian
// operator is stored as the upper triangle (col >= row) of a real symmetric
// matrix. Duplicate entries coalesce by summation.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }

    void add(std::size_t row, std::size_t col, double value) {
        if (row >= dim_ || col >= dim_) {
            throw std::out_of_range("HermitianOperator::add: index outside dimension");
        }
        if (col < row) std::swap(row, col);
        if (value == 0.0) return;
        triplets_.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
        compressed_ = false;
    }

    // Upper-triangle entries after coalescing
    const std::vector<Eigen::Triplet<double>>& entries() const {
        compress();
        return triplets_;
    }

    std::size_t nonzeros() const {
        compress();
        return static_cast<std::size_t>(matrix_.nonZeros());
    }

    // Full symmetric sparse form
    const Eigen::SparseMatrix<double>& sparse() const {
        compress();
        return matrix_;
    }

    Eigen::MatrixXd dense() const {
        compress();
        return Eigen::MatrixXd(matrix_);
    }

    // y = H x (complex state, real symmetric H)
    void apply(const StateVector& x, StateVector& y) const {
        compress();
        if (x.size() != static_cast<Eigen::Index>(dim_)) {
            throw std::invalid_argument("HermitianOperator::apply: dimension mismatch");
        }
        y.resize(x.size());
        y.real() = matrix_ * x.real();
        y.imag() = matrix_ * x.imag();
    }

    StateVector apply(const StateVector& x) const {
        StateVector y;
        apply(x, y);
        return y;
    }

    double expectation(const StateVector& x) const {
        return apply(x).dot(x).real();
    }

private:
    void compress() const {
        if (compressed_) return;
        // coalesce duplicates and mirror the strict upper triangle
        std::vector<Eigen::Triplet<double>> full;
        full.reserve(2 * triplets_.size());
        for (const auto& t : triplets_) {
            full.emplace_back(t.row(), t.col(), t.value());
            if (t.row() != t.col()) full.emplace_back(t.col(), t.row(), t.value());
        }
        matrix_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        matrix_.setFromTriplets(full.begin(), full.end());
        matrix_.prune(0.0, 0.0);
        // rebuild the canonical upper-triangle list from the coalesced matrix
        triplets_.clear();
        for (int k = 0; k < matrix_.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, k); it; ++it) {
                if (it.row() <= it.col() && it.value() != 0.0) {
                    triplets_.emplace_back(static_cast<int>(it.row()),
                                           static_cast<int>(it.col()), it.value());
                }
            }
        }
        compressed_ = true;
    }

    std::size_t dim_{0};
    mutable std::vector<Eigen::Triplet<double>> triplets_;
    mutable Eigen::SparseMatrix<double> matrix_;
    mutable bool compressed_{false};
};

inline double norm_of(const StateVector& v) { return v.norm(); }

inline void require_normalized(const StateVector& v, double tol = 1e-10,
                               const char* where = "state") {
    const double n = v.norm();
    if (std::abs(n - 1.0) > tol) {
        throw std::invalid_argument(std::string(where) + ": vector norm " +
                                    std::to_string(n) + " violates normalization");
    }
}

inline StateVector basis_state(std::size_t dim, std::size_t k) {
    if (k >= dim) throw std::out_of_range("basis_state: index out of range");
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(k)] = Complex(1.0, 0.0);
    return v;
}

// Kronecker product in battery-major flattening: index = a_row * bdim + b_row
inline Eigen::SparseMatrix<double> kron(const Eigen::SparseMatrix<double>& a,
                                        const Eigen::SparseMatrix<double>& b) {
    Eigen::SparseMatrix<double> out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (Eigen::SparseMatrix<double>::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (Eigen::SparseMatrix<double>::InnerIterator ib(b, kb); ib; ++ib) {
                    trip.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                      static_cast<int>(ia.col() * b.cols() + ib.col()),
                                      ia.value() * ib.value());
                }
            }
        }
    }
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline HermitianOperator hermitian_from_sparse(const Eigen::SparseMatrix<double>& m,
                                               double asym_tol = 1e-14) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermitian_from_sparse: matrix must be square");
    }
    Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(m.transpose()) - m;
    double asym = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
            asym = std::max(asym, std::abs(it.value()));
        }
    }
    if (asym > asym_tol) {
        throw std::invalid_argument("hermitian_from_sparse: matrix is not symmetric");
    }
    HermitianOperator h(static_cast<std::size_t>(m.rows()));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            if (it.row() <= it.col()) {
                h.add(static_cast<std::size_t>(it.row()),
                      static_cast<std::size_t>(it.col()), it.value());
            }
        }
    }
    return h;
}

// ------------------------- support-connected component -----------------------

// Indices of the sparsity-graph component reachable from the support of psi0.
// Dynamics generated by H never leaves this set, so propagation may restrict
// to it (conserved-excitation and parity blocks fall out automatically).
struct ComponentMap {
    std::vector<std::size_t> keep;        // restricted index -> original index
    std::vector<std::ptrdiff_t> inverse;  // original index -> restricted or -1
    std::size_t full_dim{0};

    std::size_t dim() const { return keep.size(); }
};

inline ComponentMap reachable_component(const HermitianOperator& h, const StateVector& psi0,
                                        double support_tol = 0.0) {
    const auto& m = h.sparse();
    const std::size_t n = h.dim();
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(psi0[static_cast<Eigen::Index>(i)]) > support_tol) {
            seen[i] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, static_cast<int>(i)); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            if (!seen[r] && it.value() != 0.0) {
                seen[r] = 1;
                stack.push_back(r);
            }
        }
    }
    ComponentMap map;
    map.full_dim = n;
    map.inverse.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) {
            map.inverse[i] = static_cast<std::ptrdiff_t>(map.keep.size());
            map.keep.push_back(i);
        }
    }
    return map;
}

inline HermitianOperator restrict_operator(const HermitianOperator& h, const ComponentMap& map) {
    HermitianOperator out(map.dim());
    for (const auto& t : h.entries()) {
        const auto r = map.inverse[static_cast<std::size_t>(t.row())];
        const auto c = map.inverse[static_cast<std::size_t>(t.col())];
        if (r >= 0 && c >= 0) {
            out.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c), t.value());
        }
    }
    return out;
}

inline StateVector restrict_state(const StateVector& v, const ComponentMap& map) {
    StateVector out(static_cast<Eigen::Index>(map.dim()));
    for (std::size_t i = 0; i < map.dim(); ++i) {
        out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(map.keep[i])];
    }
    return out;
}

inline std::vector<double> restrict_weights(const std::vector<double>& w, const ComponentMap& map) {
    std::vector<double> out(map.dim());
    for (std::size_t i = 0; i < map.dim(); ++i) out[i] = w[map.keep[i]];
    return out;
}

} // namespace qbat
