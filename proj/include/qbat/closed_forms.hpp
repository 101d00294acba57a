// closed_forms.hpp — analytic reference solutions (two-cell battery with an
// N-spin charger, single charging cell, thermally degraded charger).
// Deliberately independent of the matrix/propagation stack so these can act
// as ground truth for it.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace qbat::closed_form {

// ----------------------- two cells, N-spin charger ---------------------------
// Isotropic coupling, chargers fully polarized; dynamics closes on four states
// with a single frequency scale xi = sqrt(2(3N-2)).

inline void require_charger_count(int n_chargers) {
    if (n_chargers < 2) {
        throw std::invalid_argument("closed_form: two-cell solution needs N >= 2");
    }
}

inline double xi(int n_chargers) {
    require_charger_count(n_chargers);
    return std::sqrt(2.0 * (3.0 * n_chargers - 2.0));
}

struct TwoCellAmplitudes {
    std::complex<double> c1, c2, c3, c4;
};

// Amplitudes over {|11, N/2-2>, |10, N/2-1>, |01, N/2-1>, |00, N/2>}
inline TwoCellAmplitudes two_cell_amplitudes(int n_chargers, double g, double t) {
    const double x = xi(n_chargers);
    const double x2 = x * x;
    const double s_half = std::sin(0.5 * x * g * t);
    TwoCellAmplitudes a;
    a.c1 = -2.0 * std::sqrt(2.0 * (x2 + 4.0) * (x2 - 2.0)) / (3.0 * x2) * s_half * s_half;
    a.c2 = std::complex<double>(0.0, -std::sqrt((x2 + 4.0) / (6.0 * x2)) * std::sin(x * g * t));
    a.c3 = a.c2;
    a.c4 = ((x2 + 4.0) * std::cos(x * g * t) + 2.0 * (x2 - 2.0)) / (3.0 * x2);
    return a;
}

inline double two_cell_energy(int n_chargers, double g, double t, double omega0 = 1.0) {
    const double x = xi(n_chargers);
    const double x2 = x * x;
    const double c = std::cos(x * g * t);
    return (x2 + 4.0) * omega0 / (9.0 * x2 * x2) *
           ((x2 - 8.0) * c - (7.0 * x2 - 8.0)) * (c - 1.0);
}

inline double two_cell_emax(int n_chargers, double omega0 = 1.0) {
    require_charger_count(n_chargers);
    const double n = n_chargers;
    return 16.0 * n * (n - 1.0) / ((3.0 * n - 2.0) * (3.0 * n - 2.0)) * omega0;
}

// First time the stored energy reaches its maximum
inline double two_cell_t_emax(int n_chargers, double g) {
    return M_PI / (xi(n_chargers) * g);
}

inline double two_cell_emax_limit(double omega0 = 1.0) { return 16.0 / 9.0 * omega0; }

// ------------------------------- single cell ---------------------------------

inline double single_cell_energy(double g, double t, double omega0 = 1.0) {
    const double s = std::sin(g * t);
    return omega0 * s * s;
}

inline double single_cell_power(double g, double t, double omega0 = 1.0) {
    if (t <= 0.0) return 0.0;
    return single_cell_energy(g, t, omega0) / t;
}

// Root of tan x = 2x on (0, pi), located by bisection on sin x - 2x cos x
inline double single_cell_optimal_phase(double tol = 1e-12) {
    double lo = 0.1, hi = M_PI - 0.1;
    auto f = [](double x) { return std::sin(x) - 2.0 * x * std::cos(x); };
    if (f(lo) >= 0.0 || f(hi) <= 0.0) {
        throw std::runtime_error("single_cell_optimal_phase: bracket failure");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// (p_max, t*) of the single-cell average power
inline std::pair<double, double> single_cell_pmax(double g, double omega0 = 1.0) {
    const double x = single_cell_optimal_phase();
    const double s = std::sin(x);
    return {omega0 * g * s * s / x, x / g};
}

// --------------------- thermally degraded second charger ---------------------
// Two cells, two chargers; the second charger starts mixed with ground-state
// weight p0. Matches the collective mixture {1-p0: |m=1>, p0: |m=0>}.

inline double thermal_energy(double p0, double g, double t, double omega0 = 1.0) {
    if (p0 < 0.0 || p0 > 1.0) {
        throw std::invalid_argument("thermal_energy: p0 must lie in [0, 1]");
    }
    const double s2 = std::sin(std::sqrt(2.0) * g * t);
    const double s4 = std::sin(2.0 * g * t);
    return 2.0 * omega0 * s2 * s2 - p0 * omega0 * (2.0 * s2 * s2 - s4 * s4);
}

} // namespace qbat::closed_form
