// qbat.cpp — command-line front end: charging simulations, figure-style
// sweeps, and the oracle validation suite, emitting plot-ready CSV or JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include "qbat/closed_forms.hpp"
#include "qbat/experiments.hpp"
#include "qbat/fullspace.hpp"
#include "qbat/hamiltonians.hpp"
#include "qbat/observables.hpp"
#include "qbat/propagation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace cf = qbat::closed_form;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------ config reading --------------------------------

class Section {
public:
    Section(const json& j, std::string path) : node_(&j), path_(std::move(path)) {
        if (!j.is_object()) throw SchemaError(path_ + ": expected an object");
    }

    static Section root(const json& j) { return Section(j, "config"); }

    Section section(const std::string& key) {
        touch(key);
        if (!node_->contains(key)) {
            static const json empty = json::object();
            return Section(empty, path_ + "." + key);
        }
        return Section(node_->at(key), path_ + "." + key);
    }

    double number(const std::string& key, double fallback,
                  double lo = -std::numeric_limits<double>::infinity(),
                  double hi = std::numeric_limits<double>::infinity()) {
        touch(key);
        double value = fallback;
        if (node_->contains(key)) {
            const json& v = node_->at(key);
            if (!v.is_number()) throw SchemaError(path_ + "." + key + ": expected a number");
            value = v.get<double>();
        }
        if (value < lo || value > hi) {
            throw SchemaError(path_ + "." + key + ": value " + std::to_string(value) +
                              " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return value;
    }

    int integer(const std::string& key, int fallback, int lo, int hi) {
        touch(key);
        int value = fallback;
        if (node_->contains(key)) {
            const json& v = node_->at(key);
            if (!v.is_number_integer()) {
                throw SchemaError(path_ + "." + key + ": expected an integer");
            }
            value = v.get<int>();
        }
        if (value < lo || value > hi) {
            throw SchemaError(path_ + "." + key + ": value " + std::to_string(value) +
                              " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return value;
    }

    std::string choice(const std::string& key, const std::string& fallback,
                       const std::vector<std::string>& allowed) {
        touch(key);
        std::string value = fallback;
        if (node_->contains(key)) {
            const json& v = node_->at(key);
            if (!v.is_string()) throw SchemaError(path_ + "." + key + ": expected a string");
            value = v.get<std::string>();
        }
        for (const auto& a : allowed) {
            if (value == a) return value;
        }
        std::string msg = path_ + "." + key + ": '" + value + "' is not one of {";
        for (std::size_t i = 0; i < allowed.size(); ++i) msg += (i ? ", " : "") + allowed[i];
        throw SchemaError(msg + "}");
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> fallback, int lo, int hi) {
        touch(key);
        if (!node_->contains(key)) return fallback;
        const json& v = node_->at(key);
        if (!v.is_array() || v.empty()) {
            throw SchemaError(path_ + "." + key + ": expected a non-empty array");
        }
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) {
                throw SchemaError(path_ + "." + key + "[" + std::to_string(i) +
                                  "]: expected an integer");
            }
            const int x = v[i].get<int>();
            if (x < lo || x > hi) {
                throw SchemaError(path_ + "." + key + "[" + std::to_string(i) + "]: value " +
                                  std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
            }
            out.push_back(x);
        }
        return out;
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> fallback,
                                    double lo, double hi) {
        touch(key);
        if (!node_->contains(key)) return fallback;
        const json& v = node_->at(key);
        if (!v.is_array() || v.empty()) {
            throw SchemaError(path_ + "." + key + ": expected a non-empty array");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw SchemaError(path_ + "." + key + "[" + std::to_string(i) +
                                  "]: expected a number");
            }
            const double x = v[i].get<double>();
            if (x < lo || x > hi) {
                throw SchemaError(path_ + "." + key + "[" + std::to_string(i) + "]: value " +
                                  std::to_string(x) + " outside range");
            }
            out.push_back(x);
        }
        return out;
    }

    void finish() const {
        for (auto it = node_->begin(); it != node_->end(); ++it) {
            if (!touched_.count(it.key())) {
                throw SchemaError(path_ + "." + it.key() + ": unknown field");
            }
        }
    }

private:
    void touch(const std::string& key) { touched_.insert(key); }

    const json* node_;
    std::string path_;
    std::set<std::string> touched_;
};

// --------------------------------- formatting ---------------------------------

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> notes;  // summary lines
};

void write_output(const std::string& command, const json& resolved, const Table& table,
                  const std::string& format, const std::string& out_path) {
    std::ostringstream body;
    if (format == "csv") {
        body << "# qbat " << command << "\n";
        body << "# config: " << resolved.dump() << "\n";
        for (const auto& [k, v] : table.notes) body << "# " << k << ": " << v << "\n";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            body << (c ? "," : "") << table.columns[c];
        }
        body << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) body << (c ? "," : "") << fmt(row[c]);
            body << "\n";
        }
    } else {
        json out;
        out["command"] = command;
        out["config"] = resolved;
        out["columns"] = table.columns;
        out["rows"] = table.rows;
        json notes = json::object();
        for (const auto& [k, v] : table.notes) notes[k] = v;
        out["summary"] = notes;
        body << out.dump(2) << "\n";
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << body.str();
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output path " + out_path);
        file << body.str();
    }
}

// ------------------------------ shared parsing --------------------------------

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format{"csv"};
    std::string tier{"ci"};
    int threads{0};
    bool threads_explicit{false};
    bool tier_explicit{false};
};

json load_config(const CommonOptions& opts) {
    if (opts.config_path.empty()) return json::object();
    std::ifstream file(opts.config_path);
    if (!file) throw SchemaError("config: cannot open " + opts.config_path);
    json j;
    try {
        file >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config: invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) throw SchemaError("config: top level must be an object");
    return j;
}

// Effective run settings: config values with command-line overrides. The
// resolved echo written into every output re-ingests bit-identically.
struct RunSettings {
    qbat::SweepConfig sweep;
    std::string tier{"ci"};
};

RunSettings sweep_from(Section& root, const CommonOptions& opts, json& resolved,
                       const std::string& scenario) {
    RunSettings out;
    qbat::SweepConfig& cfg = out.sweep;
    root.choice("scenario", scenario, {scenario});
    int threads = root.integer("threads", opts.threads, 0, 100000);
    if (opts.threads_explicit) threads = opts.threads;
    out.tier = root.choice("tier", opts.tier, {"ci", "full"});
    if (opts.tier_explicit) out.tier = opts.tier;
    Section run = root.section("run");
    cfg.omega0 = run.number("omega0", 1.0, 1e-12, 1e12);
    cfg.g = run.number("g", 0.1, 1e-12, 1e12);
    cfg.horizon_mult = run.number("horizon_mult", 1.0, 1e-6, 1e6);
    cfg.grid_points = static_cast<std::size_t>(run.integer("grid_points", 4000, 2, 2000000));
    Section engine = root.section("engine");
    cfg.engine.spectral_threshold = static_cast<std::size_t>(
        engine.integer("spectral_threshold", static_cast<int>(cfg.engine.spectral_threshold), 1,
                       1000000));
    cfg.engine.krylov.tol = engine.number("krylov_tol", 1e-10, 1e-16, 1e-2);
    cfg.engine.krylov.max_subspace = engine.integer("krylov_max_subspace", 40, 2, 500);
    engine.finish();
    run.finish();
    cfg.threads = threads;
    resolved["scenario"] = scenario;
    resolved["run"] = {{"omega0", cfg.omega0},
                       {"g", cfg.g},
                       {"horizon_mult", cfg.horizon_mult},
                       {"grid_points", cfg.grid_points}};
    resolved["engine"] = {{"spectral_threshold", cfg.engine.spectral_threshold},
                          {"krylov_tol", cfg.engine.krylov.tol},
                          {"krylov_max_subspace", cfg.engine.krylov.max_subspace}};
    resolved["threads"] = threads;
    resolved["tier"] = out.tier;
    return out;
}

const std::vector<std::string> kPointColumns = {
    "M",    "N",    "gamma", "g1_over_g",         "E_max_over_omega0",
    "P_max_over_gomega0", "P_max_over_sqrtN_gomega0", "gt_E", "gt_P", "horizon_warning"};

void append_point_row(Table& table, const qbat::LandscapePoint& pt, const qbat::SweepConfig& cfg) {
    table.rows.push_back({static_cast<double>(pt.cells), static_cast<double>(pt.chargers),
                          pt.gamma, pt.g1_over_g, pt.e_over_omega0(cfg.omega0),
                          pt.p_over_gomega0(cfg.g, cfg.omega0),
                          pt.p_over_sqrtn_gomega0(cfg.g, cfg.omega0), pt.t_e * cfg.g,
                          pt.t_p * cfg.g, pt.horizon_warning ? 1.0 : 0.0});
}

// -------------------------------- subcommands ---------------------------------

int run_simulate(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "simulate");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section model = root.section("model");
    const int cells = model.integer("M", 2, 1, 4000);
    const int chargers = model.integer("N", 4, 1, 4000);
    const double gamma = model.number("gamma", 0.0, 0.0, 1.0);
    const double g1_over_g = model.number("g1_over_g", 0.0, 0.0, 1e6);
    const std::string frame =
        model.choice("frame", gamma == 0.0 ? "rotating" : "lab", {"lab", "rotating"});
    model.finish();

    Section grid_section = root.section("grid");
    const double gt_max = grid_section.number(
        "gt_max", cfg.horizon_mult * 8.0 * M_PI / std::sqrt(double(chargers)), 1e-9, 1e9);
    const auto points =
        static_cast<std::size_t>(grid_section.integer("points", 4000, 2, 2000000));
    grid_section.finish();
    root.finish();

    qbat::ModelParams params;
    params.cells = cells;
    params.chargers = chargers;
    params.omega0 = cfg.omega0;
    params.g = cfg.g;
    params.gamma = gamma;
    params.g1 = g1_over_g * cfg.g;
    params.frame = frame == "rotating" ? qbat::Frame::Rotating : qbat::Frame::Lab;
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("config.model: ") + e.what());
    }

    resolved["model"] = {{"M", cells},
                         {"N", chargers},
                         {"gamma", gamma},
                         {"g1_over_g", g1_over_g},
                         {"frame", frame}};
    resolved["grid"] = {{"gt_max", gt_max}, {"points", points}};

    const qbat::ProductBasis basis(cells, chargers);
    const qbat::HermitianOperator h = qbat::build_spin_charger(params, basis);
    const qbat::TimeGrid grid(gt_max / cfg.g, points);
    qbat::ChargingSimulation sim(h, qbat::ideal_initial_state(basis),
                                 basis.battery_excitation_weights(), cfg.omega0, grid,
                                 cfg.engine);

    Table table;
    table.columns = {"t", "gt", "E_over_omega0", "P_over_gomega0", "P_over_sqrtN_gomega0"};
    const double sqrt_n = std::sqrt(double(chargers));
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double t = grid.time(i);
        const double e = sim.trace().energy[i] / cfg.omega0;
        const double p = sim.trace().power[i] / (cfg.g * cfg.omega0);
        table.rows.push_back({t, t * cfg.g, e, p, p / sqrt_n});
    }
    const auto summary = sim.summary();
    table.notes.emplace_back("E_max_over_omega0", fmt(summary.e_max / cfg.omega0));
    table.notes.emplace_back("gt_E", fmt(summary.t_e * cfg.g));
    table.notes.emplace_back("P_max_over_gomega0", fmt(summary.p_max / (cfg.g * cfg.omega0)));
    table.notes.emplace_back("gt_P", fmt(summary.t_p * cfg.g));
    if (summary.at_horizon) table.notes.emplace_back("warning", "optimum sits on the horizon");
    write_output("simulate", resolved, table, opts.format, opts.out_path);
    return 0;
}

int run_landscape(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "landscape");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section sweep = root.section("sweep");
    const std::vector<int> cells =
        sweep.int_list("M", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1, 2000);
    const std::vector<double> ratios = sweep.number_list("ratios", {1.0}, 1e-9, 1e6);
    const std::vector<double> gammas =
        sweep.number_list("gammas", {0.0, 0.2, 0.6, 1.0}, 0.0, 1.0);
    sweep.finish();
    root.finish();

    resolved["sweep"] = {{"M", cells}, {"ratios", ratios}, {"gammas", gammas}};

    std::vector<qbat::LandscapePoint> points;
    try {
        points = qbat::landscape(cells, ratios, gammas, cfg);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("config.sweep: ") + e.what());
    }
    Table table;
    table.columns = kPointColumns;
    for (const auto& pt : points) append_point_row(table, pt, cfg);
    write_output("landscape", resolved, table, opts.format, opts.out_path);
    return 0;
}

int run_scaling(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "scaling");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section sweep = root.section("sweep");
    std::vector<int> fallback = {1, 2, 3, 4, 5, 7, 10, 14, 20, 28, 40, 56, 80, 100};
    if (settings.tier == "full") {
        fallback.insert(fallback.end(), {140, 200, 280, 400, 560, 800, 1000});
    }
    const std::vector<int> cells = sweep.int_list("M", fallback, 1, 4000);
    const double gamma = sweep.number("gamma", 0.0, 0.0, 1.0);
    sweep.finish();
    root.finish();

    resolved["sweep"] = {{"M", cells}, {"gamma", gamma}};

    const auto fit = qbat::eta_scaling(cells, gamma, cfg);
    Table table;
    table.columns = {"M", "eta"};
    for (std::size_t i = 0; i < fit.cell_counts.size(); ++i) {
        table.rows.push_back({static_cast<double>(fit.cell_counts[i]), fit.eta[i]});
    }
    table.notes.emplace_back("beta_global", fmt(fit.beta_global));
    table.notes.emplace_back("beta_local", fmt(fit.beta_local));
    table.notes.emplace_back("fit_residual", fmt(fit.residual));
    write_output("scaling", resolved, table, opts.format, opts.out_path);
    return 0;
}

int run_crosstalk(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "crosstalk");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section sweep = root.section("sweep");
    const int cells = sweep.integer("M", 2, 1, 2000);
    const int chargers = sweep.integer("N", 4, 1, 2000);
    const std::vector<double> ratios =
        sweep.number_list("g1_over_g", {0.0, 0.1, 1.0, 7.0, 10.0}, 0.0, 1e6);
    sweep.finish();
    root.finish();

    resolved["sweep"] = {{"M", cells}, {"N", chargers}, {"g1_over_g", ratios}};

    const auto points = qbat::crosstalk_scan(cells, chargers, ratios, cfg);
    Table table;
    table.columns = kPointColumns;
    for (const auto& pt : points) append_point_row(table, pt, cfg);
    write_output("crosstalk", resolved, table, opts.format, opts.out_path);
    return 0;
}

int run_nonideal(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "nonideal");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section sweep = root.section("sweep");
    const std::string kind = sweep.choice("kind", "charger", {"charger", "battery"});
    const int cells = sweep.integer("M", 2, 1, 12);
    const int chargers = sweep.integer("N", 4, 1, 2000);
    std::vector<double> fallback;
    const std::size_t branch_count =
        kind == "charger" ? static_cast<std::size_t>(chargers) : static_cast<std::size_t>(cells);
    fallback.assign(branch_count + 1, 0.0);
    fallback[0] = 0.6;
    for (std::size_t i = 1; i < fallback.size(); ++i) {
        fallback[i] = 0.4 / static_cast<double>(branch_count);
    }
    const std::vector<double> probabilities =
        sweep.number_list("probabilities", fallback, 0.0, 1.0);
    sweep.finish();
    root.finish();

    resolved["sweep"] = {
        {"kind", kind}, {"M", cells}, {"N", chargers}, {"probabilities", probabilities}};

    qbat::NonidealResult result;
    try {
        result = kind == "charger"
                     ? qbat::charger_mixture_run(cells, chargers, probabilities, cfg)
                     : qbat::battery_mixture_run(cells, chargers, probabilities, cfg);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("config.sweep.probabilities: ") + e.what());
    }

    Table table;
    table.columns = {"degraded",
                     "E_max_over_omega0",
                     "P_max_over_gomega0",
                     "P_max_over_sqrtN_gomega0",
                     "gt_E",
                     "gt_P"};
    auto row = [&](double tag, const qbat::LandscapePoint& pt) {
        table.rows.push_back({tag, pt.e_over_omega0(cfg.omega0),
                              pt.p_over_gomega0(cfg.g, cfg.omega0),
                              pt.p_over_sqrtn_gomega0(cfg.g, cfg.omega0), pt.t_e * cfg.g,
                              pt.t_p * cfg.g});
    };
    row(0.0, result.ideal);
    row(1.0, result.degraded);
    table.notes.emplace_back("E_max_fraction_of_ideal", fmt(result.e_fraction));
    table.notes.emplace_back("P_max_fraction_of_ideal", fmt(result.p_fraction));
    write_output("nonideal", resolved, table, opts.format, opts.out_path);
    return 0;
}

int run_tc_benchmark(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "tc-benchmark");
    const qbat::SweepConfig& cfg = settings.sweep;

    Section sweep = root.section("sweep");
    const std::vector<int> cells =
        sweep.int_list("M", {1, 2, 3, 4, 5, 7, 10, 14, 20, 28, 40, 56, 80, 100}, 1, 2000);
    const double gamma = sweep.number("gamma", 0.0, 0.0, 1.0);
    sweep.finish();
    root.finish();

    resolved["sweep"] = {{"M", cells}, {"gamma", gamma}};

    const auto points = qbat::tc_reference(cells, gamma, cfg);
    Table table;
    table.columns = {"M",    "n_photons", "E_max_over_omega0", "P_max_over_gomega0",
                     "gt_E", "gt_P",      "horizon_warning"};
    for (const auto& pt : points) {
        table.rows.push_back({static_cast<double>(pt.cells), static_cast<double>(pt.chargers),
                              pt.e_over_omega0(cfg.omega0), pt.p_over_gomega0(cfg.g, cfg.omega0),
                              pt.t_e * cfg.g, pt.t_p * cfg.g, pt.horizon_warning ? 1.0 : 0.0});
    }
    if (gamma == 0.0 && cells.size() >= 3) {
        const auto fit = qbat::tc_scaling(cells, cfg);
        table.notes.emplace_back("beta_global", fmt(fit.beta_global));
        table.notes.emplace_back("beta_local", fmt(fit.beta_local));
    }
    write_output("tc-benchmark", resolved, table, opts.format, opts.out_path);
    return 0;
}

// ------------------------------- validation -----------------------------------

int run_validate(const CommonOptions& opts) {
    const json raw = load_config(opts);
    Section root = Section::root(raw);
    json resolved;
    const RunSettings settings = sweep_from(root, opts, resolved, "validate");
    const qbat::SweepConfig& cfg = settings.sweep;
    root.finish();
    const double g = cfg.g;

    int failures = 0;
    int total = 0;
    auto check = [&](const std::string& name, double error, double tol) {
        ++total;
        const bool ok = error <= tol;
        std::cout << (ok ? "ok   " : "FAIL ") << name << "  (error " << fmt(error) << ", tol "
                  << fmt(tol) << ")\n";
        if (!ok) ++failures;
    };

    {  // two-cell amplitudes against spectral propagation, N = 5
        const int n = 5;
        const qbat::ProductBasis basis(2, n);
        const auto h = qbat::build_spin_charger(qbat::sweep_params(cfg, 2, n, 0.0), basis);
        qbat::SpectralEvolution ev(h, qbat::ideal_initial_state(basis));
        double err = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double t = 0.37 * k / g;
            const auto a = cf::two_cell_amplitudes(n, g, t);
            const auto psi = ev.at(t);
            err = std::max(err,
                           std::abs(psi[static_cast<Eigen::Index>(basis.index(0, n))] - a.c4));
            err = std::max(err, std::abs(psi[static_cast<Eigen::Index>(basis.index(1, n - 1))] -
                                         std::sqrt(2.0) * a.c2));
            err = std::max(
                err, std::abs(psi[static_cast<Eigen::Index>(basis.index(2, n - 2))] - a.c1));
        }
        check("two-cell-amplitudes", err, 1e-8);
    }
    {  // capacity formula at N in {2, 4, 20}
        double err = 0.0;
        for (const int n : {2, 4, 20}) {
            const auto pt = qbat::charge_point(qbat::sweep_params(cfg, 2, n, 0.0), cfg);
            err = std::max(err, std::abs(pt.e_max - cf::two_cell_emax(n, cfg.omega0)) /
                                    cf::two_cell_emax(n, cfg.omega0));
        }
        check("capacity-formula", err, 1e-6);
    }
    {  // cavity benchmark
        const auto pt = qbat::tc_point(2, 2, 0.0, cfg);
        check("cavity-16-9", std::abs(pt.e_over_omega0(cfg.omega0) - 16.0 / 9.0), 1e-6);
    }
    {  // single-cell optimum
        const auto pt = qbat::charge_point(qbat::sweep_params(cfg, 1, 1, 0.0), cfg);
        const auto [p_ref, t_ref] = cf::single_cell_pmax(g, cfg.omega0);
        check("single-cell-power", std::abs(pt.p_max - p_ref), 1e-9);
    }
    {  // thermal mixture vs closed form
        const qbat::ProductBasis basis(2, 2);
        const auto h = qbat::build_spin_charger(qbat::sweep_params(cfg, 2, 2, 0.0), basis);
        const qbat::TimeGrid grid(6.0 / g, 301);
        qbat::ChargingSimulation sim(h, qbat::thermal_charger_mixture_collective(basis, 0.3),
                                     basis.battery_excitation_weights(), cfg.omega0, grid,
                                     cfg.engine);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.points; ++i) {
            err = std::max(err, std::abs(sim.trace().energy[i] -
                                         cf::thermal_energy(0.3, g, grid.time(i), cfg.omega0)));
        }
        check("thermal-closed-form", err, 1e-10);
    }
    {  // frame equivalence at gamma = 0
        const qbat::ProductBasis basis(3, 4);
        const qbat::TimeGrid grid(5.0 / g, 201);
        qbat::ModelParams lab_params = qbat::sweep_params(cfg, 3, 4, 0.0);
        lab_params.frame = qbat::Frame::Lab;
        qbat::ChargingSimulation rot(
            qbat::build_spin_charger(qbat::sweep_params(cfg, 3, 4, 0.0), basis),
            qbat::ideal_initial_state(basis), basis.battery_excitation_weights(), cfg.omega0,
            grid, cfg.engine);
        qbat::ChargingSimulation lab(qbat::build_spin_charger(lab_params, basis),
                                     qbat::ideal_initial_state(basis),
                                     basis.battery_excitation_weights(), cfg.omega0, grid,
                                     cfg.engine);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.points; ++i) {
            err = std::max(err, std::abs(lab.trace().energy[i] - rot.trace().energy[i]));
        }
        check("frame-equivalence", err, 1e-9);
    }
    {  // full-space vs collective on (2, 3)
        const qbat::ProductBasis collective(2, 3);
        const qbat::HybridBasis full(2, 3, qbat::SideKind::Full, qbat::SideKind::Full);
        const qbat::TimeGrid grid(4.0 / g, 201);
        qbat::ChargingSimulation a(
            qbat::build_spin_charger(qbat::sweep_params(cfg, 2, 3, 0.0), collective),
            qbat::ideal_initial_state(collective), collective.battery_excitation_weights(),
            cfg.omega0, grid, cfg.engine);
        qbat::ChargingSimulation b(
            qbat::build_full_hamiltonian(qbat::sweep_params(cfg, 2, 3, 0.0), full),
            qbat::ideal_initial_state(full), full.battery_excitation_weights(), cfg.omega0, grid,
            cfg.engine);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.points; ++i) {
            err = std::max(err, std::abs(a.trace().energy[i] - b.trace().energy[i]));
        }
        check("fullspace-equivalence", err, 1e-9);
    }
    {  // Krylov vs spectral on a dense random operator
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        qbat::HermitianOperator h(50);
        for (std::size_t r = 0; r < 50; ++r) {
            for (std::size_t c = r; c < 50; ++c) {
                if (c == r || coef(rng) > 0.6) h.add(r, c, coef(rng));
            }
        }
        qbat::StateVector psi(50);
        for (int i = 0; i < 50; ++i) psi[i] = qbat::Complex(coef(rng), coef(rng));
        psi /= psi.norm();
        const qbat::TimeGrid grid(20.0, 81);
        const auto s = qbat::spectral_propagate(h, psi, grid);
        const auto k = qbat::krylov_propagate(h, psi, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.points; ++i) err = std::max(err, (s[i] - k[i]).norm());
        check("krylov-vs-spectral", err, 1e-8);
    }

    std::cout << (failures == 0 ? "validation passed" : "validation FAILED") << " ("
              << (total - failures) << "/" << total << " checks)\n";
    return failures == 0 ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-charger quantum battery simulator"};
    app.require_subcommand(1);

    CommonOptions opts;
    app.add_option("--config", opts.config_path, "JSON scenario configuration");
    app.add_option("--out", opts.out_path, "output path (default: stdout)");
    app.add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    auto* threads_opt = app.add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    auto* tier_opt = app.add_option("--tier", opts.tier, "run tier")
                         ->check(CLI::IsMember({"ci", "full"}));

    auto* c_sim = app.add_subcommand("simulate", "charging trace for one scenario");
    auto* c_land = app.add_subcommand("landscape", "E_max / P_max over (M, N/M, gamma)");
    auto* c_scal = app.add_subcommand("scaling", "collective-vs-parallel power ratio and beta");
    auto* c_cross = app.add_subcommand("crosstalk", "charger-charger coupling scan");
    auto* c_non = app.add_subcommand("nonideal", "degraded initial-state scenarios");
    auto* c_tc = app.add_subcommand("tc-benchmark", "cavity-charger reference");
    auto* c_val = app.add_subcommand("validate", "closed-form oracle suite");
    for (auto* sub : {c_sim, c_land, c_scal, c_cross, c_non, c_tc, c_val}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            return app.exit(e);
        }
        std::cerr << e.what() << "\n";
        return kExitSchema;
    }
    opts.threads_explicit = threads_opt->count() > 0;
    opts.tier_explicit = tier_opt->count() > 0;

    try {
        if (c_sim->parsed()) return run_simulate(opts);
        if (c_land->parsed()) return run_landscape(opts);
        if (c_scal->parsed()) return run_scaling(opts);
        if (c_cross->parsed()) return run_crosstalk(opts);
        if (c_non->parsed()) return run_nonideal(opts);
        if (c_tc->parsed()) return run_tc_benchmark(opts);
        if (c_val->parsed()) return run_validate(opts);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::invalid_argument& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
