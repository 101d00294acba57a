// observables.hpp — stored energy E(t), average power P(t) = E(t)/t, and
// location of their maxima (grid scan plus golden-section refinement with
// first-attainment tie breaking).

#pragma once

#include "qbat/operator.hpp"
#include "qbat/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qbat {

inline double battery_excitation(const StateVector& state, const std::vector<double>& weights) {
    if (state.size() != static_cast<Eigen::Index>(weights.size())) {
        throw std::invalid_argument("battery_excitation: weight vector does not match state");
    }
    double out = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        out += weights[static_cast<std::size_t>(i)] * std::norm(state[i]);
    }
    return out;
}

struct ChargingTrace {
    TimeGrid grid;
    std::vector<double> energy;  // E(t_k), E(0) = 0
    std::vector<double> power;   // P(t_k) = E/t, P(0) = 0 (E ~ t^2 near zero)

    ChargingTrace(TimeGrid grid_, std::vector<double> energy_)
        : grid(grid_), energy(std::move(energy_)) {
        if (energy.size() != grid.points) {
            throw std::invalid_argument("ChargingTrace: series length does not match grid");
        }
        power.resize(energy.size());
        power[0] = 0.0;
        for (std::size_t i = 1; i < energy.size(); ++i) power[i] = energy[i] / grid.time(i);
    }

    // From a battery-excitation series: E = omega0 (<n_B>(t) - <n_B>(0))
    static ChargingTrace from_excitation(const TimeGrid& grid, const std::vector<double>& exc,
                                         double omega0) {
        std::vector<double> e(exc.size());
        for (std::size_t i = 0; i < exc.size(); ++i) e[i] = omega0 * (exc[i] - exc[0]);
        if (!e.empty()) e[0] = 0.0;
        return ChargingTrace(grid, std::move(e));
    }
};

struct ChargingSummary {
    double e_max{0.0};
    double t_e{0.0};  // first attainment
    double p_max{0.0};
    double t_p{0.0};
    bool at_horizon{false};  // an argmax sits on the final grid point
    bool degenerate{false};  // nothing charged
};

namespace detail {

// Golden-section maximization on [a, b]; returns (f*, t*)
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double xtol) {
    constexpr double kGolden = 0.618033988749894848;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        }
    }
    return fc >= fd ? std::make_pair(fc, c) : std::make_pair(fd, d);
}

struct PeakResult {
    double value{0.0};
    double time{0.0};
    bool at_horizon{false};
    bool degenerate{false};
};

// Locate the global maximum of a sampled series; with an evaluator, refine
// every near-maximal bracket and report the earliest refined peak within
// relative tolerance 1e-9 of the best.
template <typename F>
PeakResult locate_peak(const TimeGrid& grid, const std::vector<double>& values,
                       const F* evaluator, std::size_t first_index) {
    PeakResult out;
    const std::size_t n = values.size();
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = first_index; i < n; ++i) vmax = std::max(vmax, values[i]);
    if (!(vmax > 0.0)) {
        out.degenerate = true;
        return out;
    }
    const double band = vmax - 1e-3 * std::abs(vmax);
    std::vector<std::size_t> candidates;
    for (std::size_t i = first_index; i < n; ++i) {
        const bool local_max = (i == 0 || values[i] >= values[i - 1]) &&
                               (i + 1 == n || values[i] >= values[i + 1]);
        if (local_max && values[i] >= band) candidates.push_back(i);
    }
    std::vector<std::pair<double, double>> refined;  // (value, time) per candidate
    refined.reserve(candidates.size());
    for (const std::size_t i : candidates) {
        double v = values[i];
        double t = grid.time(i);
        if (evaluator != nullptr) {
            const double lo = grid.time(i > 0 ? i - 1 : 0);
            const double hi = grid.time(std::min(i + 1, n - 1));
            const auto [gv, gt] = golden_max(*evaluator, lo, hi, 1e-6 * grid.t_max);
            if (gv > v) {
                v = gv;
                t = gt;
            }
        }
        refined.emplace_back(v, t);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [v, t] : refined) best = std::max(best, v);
    for (std::size_t k = 0; k < refined.size(); ++k) {
        if (refined[k].first >= best - 1e-9 * std::abs(best)) {
            out.value = refined[k].first;
            out.time = refined[k].second;
            out.at_horizon = candidates[k] + 1 == n;
            return out;
        }
    }
    return out;  // unreachable
}

} // namespace detail

// Grid-level summary (no refinement)
inline ChargingSummary summarize(const ChargingTrace& trace) {
    ChargingSummary s;
    const auto e = detail::locate_peak<std::function<double(double)>>(trace.grid, trace.energy,
                                                                      nullptr, 0);
    const auto p = detail::locate_peak<std::function<double(double)>>(trace.grid, trace.power,
                                                                      nullptr, 1);
    s.e_max = e.value;
    s.t_e = e.time;
    s.p_max = p.value;
    s.t_p = p.time;
    s.at_horizon = e.at_horizon || p.at_horizon;
    s.degenerate = e.degenerate;
    return s;
}

// Refined summary; energy_at(t) must evaluate E at arbitrary t in [0, t_max]
inline ChargingSummary summarize(const ChargingTrace& trace,
                                 const std::function<double(double)>& energy_at) {
    if (!energy_at) return summarize(trace);
    ChargingSummary s;
    const auto power_at = [&](double t) { return t > 0.0 ? energy_at(t) / t : 0.0; };
    const auto e = detail::locate_peak(trace.grid, trace.energy, &energy_at, 0);
    const auto p = detail::locate_peak(trace.grid, trace.power, &power_at, 1);
    s.e_max = e.value;
    s.t_e = e.time;
    s.p_max = p.value;
    s.t_p = p.time;
    s.at_horizon = e.at_horizon || p.at_horizon;
    s.degenerate = e.degenerate;
    return s;
}

// ---------------------------- charging simulation ----------------------------

// One charging run: restricts to the reachable block, propagates on the grid
// with the configured engine, and exposes E(t) both as a sampled trace and as
// an arbitrary-time evaluator for refinement.
class ChargingSimulation {
public:
    ChargingSimulation(const HermitianOperator& h, const StateVector& psi0,
                       const std::vector<double>& weights, double omega0, const TimeGrid& grid,
                       EngineConfig cfg = {})
        : ChargingSimulation(h, MixedState({{1.0, psi0}}), weights, omega0, grid, cfg) {}

    ChargingSimulation(const HermitianOperator& h, const MixedState& mixed,
                       const std::vector<double>& weights, double omega0, const TimeGrid& grid,
                       EngineConfig cfg = {})
        : grid_(grid), omega0_(omega0) {
        if (weights.size() != h.dim()) {
            throw std::invalid_argument("ChargingSimulation: weights do not match operator");
        }
        branches_.reserve(mixed.branches.size());
        std::vector<double> exc(grid.points, 0.0);
        for (const auto& [p, psi] : mixed.branches) {
            if (p == 0.0) continue;
            branches_.push_back(std::make_unique<Branch>(h, psi, weights, p, grid, cfg));
            for (std::size_t i = 0; i < grid.points; ++i) {
                exc[i] += p * branches_.back()->series[i];
            }
        }
        trace_ = std::make_unique<ChargingTrace>(
            ChargingTrace::from_excitation(grid, exc, omega0));
    }

    const ChargingTrace& trace() const { return *trace_; }

    double energy_at(double t) const {
        double exc = 0.0, exc0 = 0.0;
        for (const auto& b : branches_) {
            exc += b->probability * b->excitation_at(t);
            exc0 += b->probability * b->initial_excitation;
        }
        return omega0_ * (exc - exc0);
    }

    ChargingSummary summary() const {
        return summarize(*trace_, [this](double t) { return energy_at(t); });
    }

private:
    struct Branch {
        double probability{1.0};
        double initial_excitation{0.0};
        std::vector<double> series;  // <n_B>(t_k)
        std::vector<double> weights;
        std::unique_ptr<SpectralEvolution> spectral;
        std::unique_ptr<KrylovPropagator> krylov;
        std::vector<std::pair<std::size_t, StateVector>> anchors;  // (grid index, state)
        TimeGrid grid;
        HermitianOperator restricted;

        Branch(const HermitianOperator& h, const StateVector& psi0,
               const std::vector<double>& full_weights, double p, const TimeGrid& grid_,
               const EngineConfig& cfg)
            : probability(p), grid(grid_) {
            require_normalized(psi0, 1e-10, "ChargingSimulation branch");
            StateVector psi = psi0;
            weights = full_weights;
            if (cfg.restrict_to_component) {
                const auto map = reachable_component(h, psi0);
                restricted = restrict_operator(h, map);
                psi = restrict_state(psi0, map);
                weights = restrict_weights(full_weights, map);
            } else {
                restricted = h;
            }
            initial_excitation = battery_excitation(psi, weights);
            series.resize(grid.points);
            if (restricted.dim() <= cfg.spectral_threshold) {
                spectral = std::make_unique<SpectralEvolution>(restricted, psi);
                for (std::size_t i = 0; i < grid.points; ++i) {
                    series[i] = battery_excitation(spectral->at(grid.time(i)), weights);
                }
            } else {
                krylov = std::make_unique<KrylovPropagator>(restricted, cfg.krylov);
                StateVector state = psi;
                series[0] = initial_excitation;
                anchors.emplace_back(0, state);
                for (std::size_t i = 1; i < grid.points; ++i) {
                    state = krylov->step(state, grid.dt());
                    series[i] = battery_excitation(state, weights);
                    if (i % cfg.krylov_anchor_stride == 0) anchors.emplace_back(i, state);
                }
            }
        }

        double excitation_at(double t) const {
            if (spectral) return battery_excitation(spectral->at(t), weights);
            // nearest cached anchor at or before t, then short Krylov steps
            const auto idx = static_cast<std::size_t>(std::min(
                std::floor(t / grid.dt()), static_cast<double>(grid.points - 1)));
            const auto it = std::upper_bound(
                anchors.begin(), anchors.end(), idx,
                [](std::size_t v, const auto& a) { return v < a.first; });
            const auto& anchor = *(it == anchors.begin() ? it : std::prev(it));
            const double dt = t - grid.time(anchor.first);
            return battery_excitation(krylov->step(anchor.second, dt), weights);
        }
    };

    TimeGrid grid_;
    double omega0_{1.0};
    std::vector<std::unique_ptr<Branch>> branches_;
    std::unique_ptr<ChargingTrace> trace_;
};

} // namespace qbat
