// propagation.hpp — unitary time evolution under a static Hermitian operator,
// with a spectral engine (dense eigendecomposition, exact at any time) and a
// Krylov engine (Lanczos matrix exponential for large sparse problems).

#pragma once

#include "qbat/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbat {

struct TimeGrid {
    double t_max{0.0};
    std::size_t points{0};

    TimeGrid(double t_max_, std::size_t points_) : t_max(t_max_), points(points_) {
        if (!(t_max > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be positive");
        if (points < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    }

    double dt() const { return t_max / static_cast<double>(points - 1); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt(); }

    std::vector<double> times() const {
        std::vector<double> t(points);
        for (std::size_t i = 0; i < points; ++i) t[i] = time(i);
        return t;
    }
};

// Convex mixture of orthonormal pure branches; evolved branch-wise, which is
// exact for unitary dynamics.
struct MixedState {
    std::vector<std::pair<double, StateVector>> branches;

    MixedState() = default;
    explicit MixedState(std::vector<std::pair<double, StateVector>> b) : branches(std::move(b)) {
        validate();
    }

    void validate() const {
        if (branches.empty()) throw std::invalid_argument("MixedState: no branches");
        double total = 0.0;
        const auto dim = branches.front().second.size();
        for (const auto& [p, psi] : branches) {
            if (p < 0.0) throw std::invalid_argument("MixedState: negative probability");
            if (psi.size() != dim) throw std::invalid_argument("MixedState: branch dimension mismatch");
            require_normalized(psi, 1e-10, "MixedState branch");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("MixedState: probabilities sum to " + std::to_string(total));
        }
    }

    std::size_t dim() const { return static_cast<std::size_t>(branches.front().second.size()); }
};

// ------------------------------ spectral engine -------------------------------

// Eigendecomposition of H bound to one initial state; evaluates
// |psi(t)> = V exp(-i Lambda t) V^T |psi0> at arbitrary t.
class SpectralEvolution {
public:
    SpectralEvolution(const HermitianOperator& h, StateVector psi0) {
        if (psi0.size() != static_cast<Eigen::Index>(h.dim())) {
            throw std::invalid_argument("SpectralEvolution: state dimension mismatch");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("SpectralEvolution: eigendecomposition failed at dimension " +
                                     std::to_string(h.dim()));
        }
        eigenvalues_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        weights_ = vectors_.transpose() * psi0;
    }

    StateVector at(double t) const {
        const Eigen::ArrayXd phase = -t * eigenvalues_.array();
        const Eigen::VectorXcd rotated =
            ((phase.cos().cast<Complex>() + Complex(0.0, 1.0) * phase.sin().cast<Complex>()) *
             weights_.array())
                .matrix();
        StateVector out(vectors_.rows());
        out.real() = vectors_ * rotated.real();
        out.imag() = vectors_ * rotated.imag();
        return out;
    }

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd vectors_;
    Eigen::VectorXcd weights_;
};

inline std::vector<StateVector> spectral_propagate(const HermitianOperator& h,
                                                   const StateVector& psi0,
                                                   const TimeGrid& grid) {
    require_normalized(psi0, 1e-10, "spectral_propagate input");
    SpectralEvolution ev(h, psi0);
    std::vector<StateVector> out;
    out.reserve(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) out.push_back(ev.at(grid.time(i)));
    return out;
}

// ------------------------------- Krylov engine --------------------------------

struct KrylovOptions {
    double tol{1e-10};     // step error per unit time
    int max_subspace{40};  // Lanczos vectors per step
};

// One short-time step |psi> -> exp(-i H dt) |psi| via Lanczos with full
// reorthogonalization. Non-convergence at max_subspace halves the internal
// substep; persistent failure throws.
class KrylovPropagator {
public:
    explicit KrylovPropagator(const HermitianOperator& h, KrylovOptions opts = {})
        : h_(&h), opts_(opts) {
        if (opts_.max_subspace < 2) {
            throw std::invalid_argument("KrylovPropagator: max_subspace must be >= 2");
        }
    }

    StateVector step(const StateVector& psi, double dt) const {
        if (dt == 0.0) return psi;
        StateVector out = psi;
        double remaining = std::abs(dt);
        const double sign = dt >= 0.0 ? 1.0 : -1.0;
        double h_step = remaining;
        int halvings = 0;
        while (remaining > 0.0) {
            const double take = std::min(h_step, remaining);
            StateVector next;
            if (try_step(out, sign * take, next)) {
                out.swap(next);
                remaining -= take;
            } else {
                h_step *= 0.5;
                if (++halvings > 60) {
                    throw std::runtime_error(
                        "KrylovPropagator: no convergence at dimension " +
                        std::to_string(h_->dim()) + ", dt " + std::to_string(dt));
                }
            }
        }
        return out;
    }

private:
    bool try_step(const StateVector& psi, double dt, StateVector& out) const {
        const double nrm = psi.norm();
        if (nrm == 0.0) {
            out = psi;
            return true;
        }
        const int m_max = opts_.max_subspace;
        const auto dim = psi.size();
        std::vector<StateVector> basis;
        basis.reserve(static_cast<std::size_t>(m_max));
        basis.push_back(psi / nrm);
        std::vector<double> alpha, beta;  // T diagonal / subdiagonal
        StateVector w(dim);
        for (int j = 0; j < m_max; ++j) {
            h_->apply(basis.back(), w);
            if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis[static_cast<std::size_t>(j - 1)];
            double a = w.dot(basis.back()).real();
            w -= a * basis.back();
            // second orthogonalization pass keeps the tridiagonal honest
            for (const auto& v : basis) {
                const Complex overlap = v.dot(w);
                w -= overlap * v;
                if (&v == &basis.back()) a += overlap.real();
            }
            alpha.push_back(a);
            const double b = w.norm();
            const bool breakdown = b < 1e-14 * std::max(1.0, std::abs(a));
            if (!breakdown) beta.push_back(b);

            Eigen::VectorXcd y;
            const double err = small_exponential(alpha, beta, dt, y);
            if (breakdown || err <= opts_.tol * std::abs(dt)) {
                out = StateVector::Zero(dim);
                for (std::size_t k = 0; k < basis.size(); ++k) {
                    out += (nrm * y[static_cast<Eigen::Index>(k)]) * basis[k];
                }
                return true;
            }
            if (j + 1 < m_max) basis.push_back(w / b);
        }
        return false;
    }

    // y = exp(-i dt T) e1 for the current tridiagonal; returns the residual
    // estimate beta_m |y_m| used as the step-error proxy.
    static double small_exponential(const std::vector<double>& alpha,
                                    const std::vector<double>& beta, double dt,
                                    Eigen::VectorXcd& y) {
        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) {
                t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
        const Eigen::ArrayXd phase = -dt * solver.eigenvalues().array();
        const Eigen::VectorXcd rotated =
            ((phase.cos().cast<Complex>() + Complex(0.0, 1.0) * phase.sin().cast<Complex>()) *
             solver.eigenvectors().row(0).transpose().array().cast<Complex>())
                .matrix();
        y.noalias() = solver.eigenvectors().cast<Complex>() * rotated;
        const double tail = std::abs(y[m - 1]);
        const double next_beta = static_cast<Eigen::Index>(beta.size()) >= m
                                     ? beta[static_cast<std::size_t>(m - 1)]
                                     : 0.0;
        return next_beta * tail;
    }

    const HermitianOperator* h_;
    KrylovOptions opts_;
};

inline std::vector<StateVector> krylov_propagate(const HermitianOperator& h,
                                                 const StateVector& psi0, const TimeGrid& grid,
                                                 KrylovOptions opts = {}) {
    require_normalized(psi0, 1e-10, "krylov_propagate input");
    KrylovPropagator prop(h, opts);
    std::vector<StateVector> out;
    out.reserve(grid.points);
    out.push_back(psi0);
    for (std::size_t i = 1; i < grid.points; ++i) {
        out.push_back(prop.step(out.back(), grid.dt()));
    }
    return out;
}

// ------------------------------ engine dispatch -------------------------------

struct EngineConfig {
    std::size_t spectral_threshold{20000};  // dense path up to this dimension
    KrylovOptions krylov{};
    bool restrict_to_component{true};       // propagate on the reachable block only
    std::size_t krylov_anchor_stride{50};   // cached states for local re-evaluation
};

inline std::vector<StateVector> propagate(const HermitianOperator& h, const StateVector& psi0,
                                          const TimeGrid& grid, const EngineConfig& cfg = {}) {
    if (h.dim() <= cfg.spectral_threshold) return spectral_propagate(h, psi0, grid);
    return krylov_propagate(h, psi0, grid, cfg.krylov);
}

// Branch-wise expectation series: sum_i p_i <psi_i(t)| O |psi_i(t)> with O
// supplied as a hook on states.
inline std::vector<double> evolve_mixture(const HermitianOperator& h, const MixedState& mixed,
                                          const TimeGrid& grid,
                                          const std::function<double(const StateVector&)>& hook,
                                          const EngineConfig& cfg = {}) {
    if (mixed.dim() != h.dim()) {
        throw std::invalid_argument("evolve_mixture: mixture dimension mismatch");
    }
    std::vector<double> out(grid.points, 0.0);
    for (const auto& [p, psi] : mixed.branches) {
        if (p == 0.0) continue;
        const auto states = propagate(h, psi, grid, cfg);
        for (std::size_t i = 0; i < grid.points; ++i) out[i] += p * hook(states[i]);
    }
    return out;
}

} // namespace qbat
