// Command-line front end: deterministic CSV tables for mode spectra,
// eigenfrequency diagnostics, and one-axis parameter sweeps, plus a fixed
// invariant suite. Every table-writing command emits a manifest with the
// fully resolved configuration; re-running from the manifest reproduces the
// table byte for byte.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dce/bogoliubov.hpp"
#include "dce/coupling.hpp"
#include "dce/geometry.hpp"
#include "dce/modes.hpp"
#include "dce/numerics.hpp"
#include "dce/observables.hpp"
#include "dce/oracle.hpp"
#include "dce/run_io.hpp"

namespace {

const double kPi = 3.14159265358979323846;

struct CommandCli {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;
    bool oracle = false;
    bool rwa = false;
    int metric_order = 1;
    int pert_order = 1;
    int nz_max = 16;
    CLI::Option* oracle_opt = nullptr;
    CLI::Option* rwa_opt = nullptr;
    CLI::Option* metric_opt = nullptr;
    CLI::Option* pert_opt = nullptr;
    CLI::Option* nz_opt = nullptr;
};

void add_common(CLI::App* cmd, CommandCli& c) {
    c.cmd = cmd;
    cmd->add_option("--config", c.config_path, "key=value configuration file");
    cmd->add_option("--set", c.sets, "override one key (repeatable)");
    cmd->add_option("--out", c.out, "output CSV path");
    c.oracle_opt = cmd->add_flag("--oracle", c.oracle, "add the exact-integrator column");
    c.rwa_opt = cmd->add_flag("--rwa", c.rwa, "drop counter-rotating drive terms");
    c.metric_opt = cmd->add_option("--metric-order", c.metric_order,
                                   "metric expansion order, 1 or 2");
    c.pert_opt = cmd->add_option("--pert-order", c.pert_order,
                                 "amplitude expansion order, 1 or 2");
    c.nz_opt = cmd->add_option("--nz-max", c.nz_max, "longitudinal truncation");
}

// Defaults resolved, file and --set overlaid, named flags applied last, and
// every key checked against the command's vocabulary.
dce::KeyValueConfig effective_config(const std::string& command,
                                     const std::map<std::string, std::string>& defaults,
                                     const CommandCli& cli) {
    dce::KeyValueConfig eff;
    eff.set("command", command);
    for (const auto& [key, value] : defaults) eff.set(key, value);
    if (!cli.config_path.empty()) {
        dce::KeyValueConfig file = dce::KeyValueConfig::load(cli.config_path);
        if (file.has("command") && file.get_string("command") != command)
            throw std::invalid_argument("config file is for command '" +
                                        file.get_string("command") +
                                        "', invoked command is '" + command + "'");
        eff.merge(file);
    }
    eff.merge(dce::KeyValueConfig::from_args(cli.sets));
    if (cli.metric_opt->count() > 0)
        eff.set("metric_order", std::to_string(cli.metric_order));
    if (cli.pert_opt->count() > 0)
        eff.set("lambda_max", std::to_string(cli.pert_order));
    if (cli.nz_opt->count() > 0) eff.set("nz_max", std::to_string(cli.nz_max));
    if (cli.oracle_opt->count() > 0) eff.set("oracle", "true");
    if (cli.rwa_opt->count() > 0) eff.set("rwa", "true");
    for (const auto& [key, value] : eff.entries())
        if (key != "command" && defaults.find(key) == defaults.end())
            throw std::invalid_argument("unknown config key '" + key +
                                        "' for command '" + command + "'");
    return eff;
}

void write_manifest(const std::string& out, const dce::KeyValueConfig& eff) {
    const std::string path = out + ".manifest";
    std::ofstream m(path);
    if (!m) throw std::runtime_error("cannot open manifest file: " + path);
    m << eff.serialize();
}

std::string require_out(const CommandCli& cli) {
    if (cli.out.empty())
        throw std::invalid_argument("--out is required for this command");
    return cli.out;
}

// Physical state shared by the table commands.
struct Setup {
    dce::CavityConfig cavity;
    dce::MetricParams metric;
    int metric_order = 1;
    int nx = 1, ny = 1, nz = 1, nz_max = 16;
    double epsilon = 0.0, varpi = 0.0;
    double t_end = 0.0, tau_p = 0.0, a_p = 0.0;
    dce::MirrorMotion motion;
};

Setup make_setup(const dce::KeyValueConfig& eff, bool with_drive) {
    Setup s;
    const double a0 = eff.get_double("a0");
    const double mass = eff.get_double("mass", 0.0);
    if (mass > 0.0) {
        const double distance = eff.get_double("distance");
        s.metric = dce::weak_field_expand(mass, distance);
        s.cavity = dce::make_cavity(a0, distance);
    } else {
        s.metric.chi = eff.get_double("chi");
        s.metric.gamma = eff.get_double("gamma");
        if (s.metric.chi < 0.0 || s.metric.chi >= 0.1)
            throw std::invalid_argument("config key 'chi': needs 0 <= chi < 0.1");
        if (s.metric.gamma < 0.0)
            throw std::invalid_argument("config key 'gamma': must not be negative");
        s.cavity = dce::make_cavity(a0);
    }
    dce::density_weight(a0, s.metric);  // rejects a degenerate metric early

    s.metric_order = eff.get_int("metric_order");
    if (s.metric_order != 1 && s.metric_order != 2)
        throw std::invalid_argument("config key 'metric_order': must be 1 or 2");
    s.nx = eff.get_int("nx");
    s.ny = eff.get_int("ny");
    s.nz = eff.get_int("nz", 1);
    s.nz_max = eff.get_int("nz_max");
    if (s.nx < 1 || s.ny < 1 || s.nz < 1 || s.nz_max < 1)
        throw std::invalid_argument("mode indices and truncation must be positive");
    if (!with_drive) return s;

    s.epsilon = eff.get_double("epsilon");
    s.varpi = eff.get_double("varpi");
    if (s.varpi <= 0.0) {
        // resonance selector: drive the pair creation of the target mode
        const dce::ModeIndex target{s.nx, s.ny, s.nz};
        s.varpi = 2.0 * dce::eigenfrequency(target, s.metric_order, s.cavity,
                                            s.metric, a0);
    }
    s.motion = dce::MirrorMotion::sine(s.epsilon, s.varpi);

    s.a_p = dce::to_proper_units(a0, 0.0, s.metric, s.metric_order).a;
    const double t_key = eff.get_double("t");
    if (t_key > 0.0) {
        s.t_end = t_key;
        const double t_p = dce::to_proper_units(a0, t_key, s.metric, s.metric_order).t;
        s.tau_p = dce::tau_parameter(s.epsilon, t_p, a0);
    } else {
        s.tau_p = eff.get_double("tau_p");
        const double t_p = 2.0 * a0 * s.tau_p / (s.epsilon * kPi);
        s.t_end = dce::from_proper_units(s.a_p, t_p, s.metric, s.metric_order).t;
    }
    if (s.t_end <= 0.0)
        throw std::invalid_argument("run duration must be positive");
    return s;
}

std::map<std::string, std::string> physical_defaults() {
    return {
        {"a0", "1"},        {"chi", "0"},      {"gamma", "0"},
        {"mass", "0"},      {"distance", "0"}, {"epsilon", "0.001"},
        {"varpi", "0"},     {"tau_p", "0.1"},  {"t", "0"},
        {"nx", "1"},        {"ny", "1"},       {"nz", "1"},
        {"nz_max", "16"},   {"metric_order", "1"},
        {"lambda_max", "1"},
        {"rwa", "false"},   {"oracle", "false"},
        {"grid_per_period", "40"},
        {"rtol", "1e-10"},  {"atol", "1e-12"},
    };
}

int run_spectrum(const CommandCli& cli) {
    const std::string out = require_out(cli);
    const dce::KeyValueConfig eff =
        effective_config("spectrum", physical_defaults(), cli);
    const Setup s = make_setup(eff, true);
    const dce::ModeSet set = dce::ModeSet::sector(s.nx, s.ny, s.nz_max);
    const bool with_oracle = eff.get_bool("oracle");

    std::vector<double> closed(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        closed[i] = dce::n_first_order(set[i], s.nz_max, s.cavity, s.metric,
                                       s.motion, s.t_end);

    dce::PerturbativeOptions po;
    po.lambda_max = eff.get_int("lambda_max");
    po.rwa = eff.get_bool("rwa");
    po.grid_per_period = eff.get_int("grid_per_period");
    const dce::PerturbativeRun run = dce::solve_perturbative(
        set, s.motion, s.cavity, s.metric, s.metric_order, {s.t_end}, po);

    std::vector<double> oracle_col;
    if (with_oracle) {
        dce::OracleOptions oo;
        oo.rtol = eff.get_double("rtol");
        oo.atol = eff.get_double("atol");
        const dce::OracleRun orun = dce::integrate_exact(
            set, s.motion, s.cavity, s.metric, s.metric_order, {s.t_end}, oo);
        oracle_col.resize(set.size());
        for (std::size_t i = 0; i < set.size(); ++i)
            oracle_col[i] = orun.mean_number(0, i);
    }

    const std::string method = "metric=" + std::to_string(s.metric_order) +
                               ";lambda=" + std::to_string(po.lambda_max) +
                               ";rwa=" + (po.rwa ? std::string("1") : std::string("0"));

    dce::CsvWriter csv(out);
    csv.metadata("schema", "dce-csv-1");
    csv.metadata("config", eff.hash());
    std::vector<std::string> cols = {"nx", "ny", "nz", "n_closed", "n_perturbative"};
    if (with_oracle) cols.push_back("n_oracle");
    cols.push_back("method");
    csv.header(cols);
    for (std::size_t i = 0; i < set.size(); ++i) {
        std::vector<std::string> cells = {
            std::to_string(set[i].nx), std::to_string(set[i].ny),
            std::to_string(set[i].nz), dce::format_sci(closed[i]),
            dce::format_sci(run.mean_number(0, i))};
        if (with_oracle) cells.push_back(dce::format_sci(oracle_col[i]));
        cells.push_back(method);
        csv.row(cells);
    }
    write_manifest(out, eff);
    return 0;
}

int run_modes(const CommandCli& cli) {
    const std::string out = require_out(cli);
    const std::map<std::string, std::string> defaults = {
        {"a0", "1"},   {"chi", "0"},  {"gamma", "0"}, {"mass", "0"},
        {"distance", "0"}, {"nx", "1"},   {"ny", "1"},    {"nz_max", "8"},
        {"metric_order", "1"}, {"lambda_max", "1"}, {"nz", "1"},
    };
    const dce::KeyValueConfig eff = effective_config("modes", defaults, cli);
    const Setup s = make_setup(eff, false);
    const double a0 = s.cavity.a0;
    const dce::ModeSet set = dce::ModeSet::sector(s.nx, s.ny, s.nz_max);
    const bool curved = s.metric.gamma > 0.0;
    const int order = curved ? 2 : 1;

    // Orthonormality of the printed block, reported as metadata.
    std::vector<dce::ModeFunction> fns;
    fns.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        fns.emplace_back(set[i], order, s.cavity, s.metric, a0);
    double gram_dev = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = 0; j < set.size(); ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            gram_dev = std::max(
                gram_dev, std::abs(dce::inner_product(fns[i], fns[j]) - expected));
        }

    dce::CsvWriter csv(out);
    csv.metadata("schema", "dce-csv-1");
    csv.metadata("config", eff.hash());
    csv.metadata("orthonormality_deviation", dce::format_sci(gram_dev));
    csv.header({"nx", "ny", "nz", "omega_first", "omega_second_approx",
                "omega_second_root", "residual", "normalization"});
    for (std::size_t i = 0; i < set.size(); ++i) {
        const dce::ModeIndex k = set[i];
        const double w1 = dce::eigenfrequency_first(k, s.cavity, s.metric, a0);
        const double west = dce::eigenfrequency_estimate(k, s.cavity, s.metric, a0);
        const double wroot = curved ? fns[i].omega() : w1;
        const double res = dce::mode_ode_residual(fns[i]);
        const double norm = fns[i].normalization();
        csv.row(std::vector<std::string>{
            std::to_string(k.nx), std::to_string(k.ny), std::to_string(k.nz),
            dce::format_sci(w1), dce::format_sci(west), dce::format_sci(wroot),
            dce::format_sci(res), dce::format_sci(norm)});
    }
    write_manifest(out, eff);
    return 0;
}

// Resolves the coordinate gamma that yields the requested proper product
// gamma * a_p for the pipeline column of the gamma_ap sweep.
double gamma_from_proper_product(double g_ap, double a0, double chi) {
    if (g_ap == 0.0) return 0.0;
    double gamma = g_ap / a0;
    for (int pass = 0; pass < 4; ++pass) {
        const dce::MetricParams p{chi, gamma};
        const double a_p = dce::to_proper_units(a0, 0.0, p, 2).a;
        gamma = g_ap / a_p;
    }
    return gamma;
}

int run_sweep(const CommandCli& cli) {
    const std::string out = require_out(cli);
    std::map<std::string, std::string> defaults = physical_defaults();
    defaults.erase("mass");
    defaults.erase("distance");
    defaults.erase("gamma");
    defaults.erase("oracle");
    defaults.erase("rtol");
    defaults.erase("atol");
    defaults["axis"] = "gamma_ap";
    defaults["start"] = "0";
    defaults["stop"] = "0.1";
    defaults["step"] = "0.01";
    defaults["gamma_ap"] = "0";
    defaults["pipeline"] = "false";
    defaults["tau_scaled"] = "false";
    const dce::KeyValueConfig eff = effective_config("sweep", defaults, cli);

    const std::string axis = eff.get_string("axis");
    const bool known = axis == "gamma_ap" || axis == "chi" || axis == "tau_p" ||
                       axis == "varpi" || axis == "n";
    if (!known)
        throw std::invalid_argument("config key 'axis': unknown sweep axis '" + axis +
                                    "'");
    const double start = eff.get_double("start");
    const double stop = eff.get_double("stop");
    const double step = eff.get_double("step");
    if (step <= 0.0)
        throw std::invalid_argument("config key 'step': must be positive");
    const bool pipeline = eff.get_bool("pipeline");

    long npoints = 0;
    if (stop >= start) npoints = long((stop - start) / step + 1e-9) + 1;

    const double chi = eff.get_double("chi");
    const double gamma_ap = eff.get_double("gamma_ap");
    const double tau_p = eff.get_double("tau_p");
    const double a0 = eff.get_double("a0");
    const double epsilon = eff.get_double("epsilon");
    const int nx = eff.get_int("nx");
    const int ny = eff.get_int("ny");
    const int nz = eff.get_int("nz");
    const int nz_max = eff.get_int("nz_max");
    const bool tau_scaled = eff.get_bool("tau_scaled");

    // Shared pipeline runner: resonant drive of the target mode, duration
    // fixed by the proper drive parameter, mean number of the target.
    auto pipeline_number = [&](const dce::MetricParams& p, int order,
                               const dce::ModeIndex& target, double tau,
                               double varpi_in) {
        const dce::CavityConfig cav = dce::make_cavity(a0);
        double varpi = varpi_in;
        if (varpi <= 0.0)
            varpi = 2.0 * dce::eigenfrequency(target, order, cav, p, a0);
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(epsilon, varpi);
        const double a_p = dce::to_proper_units(a0, 0.0, p, order).a;
        const double t_p = 2.0 * a0 * tau / (epsilon * kPi);
        const double t_end = dce::from_proper_units(a_p, t_p, p, order).t;
        dce::PerturbativeOptions po;
        po.lambda_max = eff.get_int("lambda_max");
        po.rwa = eff.get_bool("rwa");
        po.grid_per_period = eff.get_int("grid_per_period");
        const dce::ModeSet set = dce::ModeSet::sector(target.nx, target.ny, nz_max);
        const dce::PerturbativeRun run =
            dce::solve_perturbative(set, motion, cav, p, order, {t_end}, po);
        const int idx = set.find(target);
        return run.mean_number(0, std::size_t(idx));
    };

    dce::CsvWriter csv(out);
    csv.metadata("schema", "dce-csv-1");
    csv.metadata("config", eff.hash());
    std::vector<std::string> cols = {axis, "n_closed"};
    if (pipeline) cols.push_back("n_perturbative");
    csv.header(cols);

    const dce::ModeIndex target{nx, ny, nz};
    for (long i = 0; i < npoints; ++i) {
        const double v = start + double(i) * step;
        double closed = 0.0;
        double pert = 0.0;
        if (axis == "gamma_ap") {
            const dce::MetricParams p{chi, v};
            closed = dce::n_fundamental(p, 1.0, tau_p);
            if (pipeline) {
                const double gamma = gamma_from_proper_product(v, a0, chi);
                const dce::MetricParams pc{chi, gamma};
                pert = pipeline_number(pc, v > 0.0 ? 2 : 1, target, tau_p, 0.0);
            }
        } else if (axis == "chi") {
            const dce::MetricParams p{v, gamma_ap};
            closed = dce::n_fundamental(p, 1.0, tau_p);
            if (pipeline) {
                const dce::MetricParams pc{v, 0.0};
                pert = pipeline_number(pc, 1, target, tau_p, 0.0);
            }
        } else if (axis == "tau_p") {
            const dce::MetricParams p{chi, gamma_ap};
            closed = dce::n_fundamental(p, 1.0, v);
            if (pipeline) {
                const dce::MetricParams pc{chi, 0.0};
                pert = pipeline_number(pc, 1, target, v, 0.0);
            }
        } else if (axis == "varpi") {
            const dce::MetricParams p{chi, 0.0};
            const dce::CavityConfig cav = dce::make_cavity(a0);
            const dce::MirrorMotion motion = dce::MirrorMotion::sine(epsilon, v);
            const double t_p = 2.0 * a0 * tau_p / (epsilon * kPi);
            const double t_end =
                dce::from_proper_units(dce::to_proper_units(a0, 0.0, p, 1).a, t_p, p, 1)
                    .t;
            closed = dce::n_first_order(target, nz_max, cav, p, motion, t_end);
            if (pipeline) pert = pipeline_number(p, 1, target, tau_p, v);
        } else {  // axis == "n"
            const int nzi = int(std::lround(v));
            if (nzi < 1)
                throw std::invalid_argument("config key 'start': the n axis needs "
                                            "positive integer points");
            const dce::ModeIndex k{nx, ny, nzi};
            const double tau = tau_scaled ? tau_p / k.magnitude() : tau_p;
            const dce::MetricParams p{chi, gamma_ap};
            closed = dce::n_final(k, p, 1.0, tau);
            if (pipeline) {
                const dce::MetricParams pc{chi, 0.0};
                pert = pipeline_number(pc, 1, k, tau, 0.0);
            }
        }
        std::vector<double> cells = {v, closed};
        if (pipeline) cells.push_back(pert);
        csv.row(cells);
    }
    write_manifest(out, eff);
    return 0;
}

// Fixed invariant suite over all modules; prints one line per check and
// fails the run when any measured value breaks its bound.
int run_validate(const CommandCli& cli) {
    const dce::KeyValueConfig eff =
        effective_config("validate", std::map<std::string, std::string>{}, cli);
    (void)eff;

    int failures = 0;
    auto check = [&](const char* name, double measured, double bound) {
        const bool ok = measured <= bound;
        if (!ok) ++failures;
        std::printf("%s  %-34s measured=%.3e bound=%.3e\n", ok ? "PASS" : "FAIL",
                    name, measured, bound);
    };

    const dce::CavityConfig cav = dce::make_cavity(1.0);
    const dce::MetricParams flat{};

    // quadrature closes polynomials inside one panel budget
    {
        const auto r = dce::quad::integrate([](double x) { return std::pow(x, 15); },
                                            0.0, 2.0);
        check("quadrature-polynomial", std::abs(r.value - 4096.0) / 4096.0, 1e-14);
    }
    // mode block orthonormal in flat space
    {
        const dce::ModeSet set = dce::ModeSet::box(2, 2, 2);
        std::vector<dce::ModeFunction> fns;
        for (std::size_t i = 0; i < set.size(); ++i)
            fns.emplace_back(set[i], 1, cav, flat, 1.0);
        double dev = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            for (std::size_t j = 0; j < set.size(); ++j)
                dev = std::max(dev, std::abs(dce::inner_product(fns[i], fns[j]) -
                                             (i == j ? 1.0 : 0.0)));
        check("orthonormality-flat", dev, 1e-8);
    }
    // modes vanish on the walls
    {
        const dce::ModeFunction u({1, 1, 1}, 1, cav, flat, 1.0);
        check("boundary-defect", dce::boundary_defect(u), 1e-10);
    }
    // symmetric/antisymmetric split reassembles the coupling matrix
    {
        const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
        const dce::CouplingMatrix m =
            dce::coupling_matrix(set, 1, cav, flat, 1.02, 0.3);
        double dev = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            for (std::size_t j = 0; j < set.size(); ++j) {
                dev = std::max(dev, std::abs(m.sym_at(i, j) + m.anti_at(i, j) -
                                             m.full_at(i, j)));
                dev = std::max(dev, std::abs(m.sym_at(i, j) - m.sym_at(j, i)));
                dev = std::max(dev, std::abs(m.anti_at(i, j) + m.anti_at(j, i)));
            }
        check("coupling-split-identity", dev, 1e-12);
    }
    // closed kernels against amplitude differencing of the quadrature path
    {
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
        const double t = 0.4 * 2.0 * kPi / (2.0 * w1);
        const dce::KernelPair closed =
            dce::lambda_xi_closed_form({1, 1, 1}, {1, 1, 2}, cav, flat, motion, t);
        const dce::KernelPair numeric =
            dce::lambda_xi_numeric({1, 1, 1}, {1, 1, 2}, 1, 1, cav, flat, motion, t);
        const double rel = std::abs(closed.lambda - numeric.lambda) /
                           std::abs(numeric.lambda);
        check("kernel-closed-vs-numeric", rel, 1e-6);
    }
    // static mirror leaves a linear phase
    {
        const dce::MetricParams p{1e-4, 0.0};
        const double w = dce::eigenfrequency_first({1, 1, 1}, cav, p, 1.0);
        const double theta = dce::phase_theta({1, 1, 1}, 1, cav, p,
                                              dce::MirrorMotion(), 0.5, 3.5);
        check("phase-static-linear", std::abs(theta - 3.0 * w) / (3.0 * w), 1e-14);
    }
    // amplitude expansion starts from zero at the start time
    {
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
        const dce::PerturbativeRun run = dce::solve_perturbative(
            dce::ModeSet::sector(1, 1, 2), motion, cav, flat, 1, {0.0, 0.25});
        double dev = 0.0;
        for (const auto& z : run.alpha1[0]) dev = std::max(dev, std::abs(z));
        for (const auto& z : run.beta1[0]) dev = std::max(dev, std::abs(z));
        check("expansion-start-zero", dev, 1e-15);
    }
    // resonant first-order amplitude indifferent to deeper truncation
    {
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
        const double t = 4.0 * 2.0 * kPi / (2.0 * w1);
        const dce::PerturbativeRun small = dce::solve_perturbative(
            dce::ModeSet::sector(1, 1, 8), motion, cav, flat, 1, {t});
        const dce::PerturbativeRun large = dce::solve_perturbative(
            dce::ModeSet::sector(1, 1, 16), motion, cav, flat, 1, {t});
        const double rel = std::abs(small.beta1[0][0] - large.beta1[0][0]) /
                           std::abs(large.beta1[0][0]);
        check("truncation-stability", rel, 1e-8);
    }
    // static mirror fixes the exact evolution at the identity
    {
        const dce::OracleRun run = dce::integrate_exact(
            dce::ModeSet::sector(1, 1, 2), dce::MirrorMotion(), cav, flat, 1, {1.0});
        double dev = run.unitarity_defect(0);
        for (std::size_t i = 0; i < run.n; ++i)
            for (std::size_t j = 0; j < run.n; ++j)
                dev = std::max(dev, std::abs(run.alpha[0][i * run.n + j] -
                                             ((i == j) ? 1.0 : 0.0)));
        check("oracle-static-identity", dev, 1e-12);
    }
    // exact evolution keeps the Bogoliubov identity, and the perturbative
    // reconstruction error shrinks quadratically with the amplitude
    {
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
        const double eps1 = 1e-3, eps2 = 5e-4;
        const double t = 2.0 * 0.01 / (eps1 * kPi);
        const dce::PerturbativeRun pr = dce::solve_perturbative(
            set, dce::MirrorMotion::sine(eps1, 2.0 * w1), cav, flat, 1, {t});
        auto defect_at = [&](double eps) {
            const dce::OracleRun orun = dce::integrate_exact(
                set, dce::MirrorMotion::sine(eps, 2.0 * w1), cav, flat, 1, {t});
            double d = 0.0;
            for (std::size_t e = 0; e < set.size() * set.size(); ++e)
                d = std::max(d, std::abs(orun.beta[0][e] - eps * pr.beta1[0][e]));
            return std::pair<double, double>(d, orun.unitarity_defect(0));
        };
        const auto [d1, u1] = defect_at(eps1);
        const auto [d2, u2] = defect_at(eps2);
        check("oracle-unitarity-defect", std::max(u1, u2), 1e-8);
        const double slope = std::log(d1 / d2) / std::log(eps1 / eps2);
        check("amplitude-scaling-slope", std::abs(slope - 2.0), 0.2);
    }
    // grid refinement leaves the expansion where it is
    {
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
        const double t = 3.7 * 2.0 * kPi / (2.0 * w1);
        dce::PerturbativeOptions coarse, fine;
        coarse.grid_per_period = 40;
        fine.grid_per_period = 80;
        const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
        const dce::PerturbativeRun a =
            dce::solve_perturbative(set, motion, cav, flat, 1, {t}, coarse);
        const dce::PerturbativeRun b =
            dce::solve_perturbative(set, motion, cav, flat, 1, {t}, fine);
        double scale = 0.0, dev = 0.0;
        for (std::size_t e = 0; e < set.size() * set.size(); ++e) {
            scale = std::max(scale, std::abs(b.beta1[0][e]));
            dev = std::max({dev, std::abs(a.beta1[0][e] - b.beta1[0][e]),
                            std::abs(a.alpha1[0][e] - b.alpha1[0][e])});
        }
        check("time-grid-independence", dev / scale, 1e-8);
    }
    // two processes share one drive frequency in the cubic cavity
    {
        const dce::ModeSet set = dce::ModeSet::sector(1, 1, 5);
        const auto lines = dce::resonance_scan(set, cav, flat, 1);
        const double w1 = dce::eigenfrequency_first({1, 1, 1}, cav, flat, 1.0);
        const double w5 = dce::eigenfrequency_first({1, 1, 5}, cav, flat, 1.0);
        check("resonance-coincidence", std::abs((w5 - w1) - 2.0 * w1) / (2.0 * w1),
              1e-12);
        int shared_group = -1;
        bool grouped = false;
        for (const auto& line : lines)
            if (line.channel == dce::ResonanceChannel::degenerate_pair &&
                line.k.nz == 1)
                shared_group = line.group;
        for (const auto& line : lines)
            if (line.channel == dce::ResonanceChannel::scatter && line.kp.nz == 5 &&
                line.group == shared_group)
                grouped = true;
        check("resonance-scan-groups", grouped ? 0.0 : 1.0, 0.5);
    }
    // quadratic growth of the closed-form number
    {
        const double n1 = dce::n_fundamental(flat, 1.0, 0.1);
        check("closed-form-fundamental", std::abs(n1 - 0.01) / 0.01, 1e-15);
    }

    std::printf("validate: %d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean particle numbers for a vibrating cavity in a weak field"};
    app.require_subcommand(1);

    CommandCli spectrum_cli, modes_cli, validate_cli, sweep_cli;
    add_common(app.add_subcommand("spectrum",
                                  "per-mode mean numbers over one transverse sector"),
               spectrum_cli);
    add_common(app.add_subcommand("modes",
                                  "eigenfrequencies, residuals, and normalization"),
               modes_cli);
    add_common(app.add_subcommand("validate", "fixed cross-module invariant suite"),
               validate_cli);
    add_common(app.add_subcommand("sweep", "one-axis parameter sweep"), sweep_cli);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (spectrum_cli.cmd->parsed()) return run_spectrum(spectrum_cli);
        if (modes_cli.cmd->parsed()) return run_modes(modes_cli);
        if (validate_cli.cmd->parsed()) return run_validate(validate_cli);
        if (sweep_cli.cmd->parsed()) return run_sweep(sweep_cli);
    } catch (const dce::convergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
