// Copyright 2026 The SCT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `sct` command line: simulate, reconstruct, jacobian, sweep, validate.
// Results go to files and standard output; diagnostics go to standard error.

#ifndef SCT_CLI_HPP
#define SCT_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sct/error.hpp"
#include "sct/forward.hpp"
#include "sct/identify.hpp"
#include "sct/invert.hpp"
#include "sct/io.hpp"
#include "sct/protocol.hpp"
#include "sct/validate.hpp"

namespace sct::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kParseError = 2,
    kDimensionMismatch = 3,
    kNoConvergence = 4,
    kFingerprintMismatch = 5,
    kStructuralSingularity = 6,
};

inline int exit_code(Errc code) {
    switch (code) {
        case Errc::schema_error:
        case Errc::bad_label:
        case Errc::missing_unknown:
        case Errc::missing_symbol:
        case Errc::unknown_scenario:
        case Errc::invalid_range:
        case Errc::empty_region:
        case Errc::too_many_dims: return kParseError;
        case Errc::wrong_dimension:
        case Errc::dimension_mismatch: return kDimensionMismatch;
        case Errc::fingerprint_mismatch: return kFingerprintMismatch;
        case Errc::structural_singularity: return kStructuralSingularity;
        default: return kFailure;
    }
}

/// Parses an angle-like bound: a number, optionally written with `pi`
/// ("pi", "2pi", "pi/4", "3pi/4", "-pi/2").
inline double parse_bound(const std::string &text) {
    const auto pos = text.find("pi");
    auto number = [&](const std::string &s, double fallback) {
        if (s.empty()) return fallback;
        if (s == "-") return -fallback;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception &) {
            throw Error(Errc::schema_error, "bad number '" + text + "'");
        }
        if (used != s.size()) throw Error(Errc::schema_error, "bad number '" + text + "'");
        return v;
    };
    if (pos == std::string::npos) return number(text, 0.0);
    const double coeff = number(text.substr(0, pos), 1.0);
    const std::string rest = text.substr(pos + 2);
    double divisor = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw Error(Errc::schema_error, "bad number '" + text + "'");
        divisor = number(rest.substr(1), 0.0);
        if (divisor == 0.0) throw Error(Errc::schema_error, "bad number '" + text + "'");
    }
    return coeff * std::numbers::pi / divisor;
}

/// Axis text `name:lo:hi`.
inline ScanAxis parse_axis(int dim, const std::string &text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
        throw Error(Errc::schema_error, "axis '" + text + "': expected name:lo:hi");
    }
    ScanAxis axis;
    try {
        axis.param = parse_param(dim, text.substr(0, a));
    } catch (const Error &e) {
        throw Error(Errc::schema_error, "axis '" + text + "': " + e.what());
    }
    axis.lo = parse_bound(text.substr(a + 1, b - a - 1));
    axis.hi = parse_bound(text.substr(b + 1));
    return axis;
}

/// Generic base point for scans when no point file is given.
inline ParamPoint default_point(const Protocol &p) {
    ParamPoint pt;
    if (p.dim == 2) {
        pt.state = DensityParams::qubit(0.55, 0.45, 0.25, 0.3);
        pt.process = UnknownParams::qubit(1.3, 0.8);
    } else {
        pt.state = DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7});
        pt.process = UnknownParams::qutrit(1.2, 0.7);
    }
    pt.process = p.complete(pt.process);
    return pt;
}

inline void require_unknowns(const Protocol &p, const ParamPoint &pt) {
    if (pt.state.dim != p.dim || pt.process.dim != p.dim) {
        throw Error(Errc::dimension_mismatch, "point has dim " + std::to_string(pt.state.dim) + ", protocol '" +
                                                  p.name + "' has dim " + std::to_string(p.dim));
    }
    for (ParamId id : p.unknowns) {
        if (id.kind == ParamKind::lambda && !pt.process.lambda[id.index]) {
            throw Error(Errc::missing_unknown, "point lacks " + param_name(p.dim, id));
        }
    }
}

inline std::optional<std::uint64_t> parse_seed(const std::string &text, const std::string &what) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        if (text.empty() || text[0] == '-') throw std::invalid_argument("sign");
        v = std::stoull(text, &used, 10);
    } catch (const std::exception &) {
        throw Error(Errc::schema_error, what + ": expected a non-negative integer, got '" + text + "'");
    }
    if (used != text.size()) throw Error(Errc::schema_error, what + ": expected a non-negative integer");
    return v;
}

struct Environment {
    std::optional<std::string> seed;  // SCT_SEED

    static Environment from_process() {
        Environment e;
        if (const char *s = std::getenv("SCT_SEED")) e.seed = s;
        return e;
    }
};

// ---------------------------------------------------------------------------
// Commands.

struct SimulateArgs {
    std::string config, out;
    std::optional<std::uint64_t> seed;
};

inline int cmd_simulate(const SimulateArgs &a, const Environment &env, std::ostream &out) {
    io::Experiment e = io::experiment_from_json(io::parse_text(io::read_file(a.config), a.config));
    if (env.seed) e.noise.seed = *parse_seed(*env.seed, "SCT_SEED");
    if (a.seed) e.noise.seed = *a.seed;
    const auto records = simulate_counts(e.truth_state, e.truth_unknowns, e.protocol, e.noise);
    io::write_file(a.out, io::dump(io::counts_to_json({e.protocol.name, io::fingerprint(e.protocol), records})));
    out << "setting\tlabel\tvalue\tshots\n";
    for (const auto &r : records) {
        out << r.setting_index << '\t' << e.protocol.settings[static_cast<std::size_t>(r.setting_index)].label << '\t'
            << format_g17(r.value) << '\t' << r.shots << '\n';
    }
    return kOk;
}

struct ReconstructArgs {
    std::string counts, protocol, objective = "least_squares", out, method = "joint";
    int max_iterations = SolverOptions{}.max_iterations;
};

inline int cmd_reconstruct(const ReconstructArgs &a, std::ostream &out, std::ostream &err) {
    const io::CountsFile counts = io::counts_from_json(io::parse_text(io::read_file(a.counts), a.counts));
    const Protocol p = io::load_protocol(a.protocol);
    const std::string fp = io::fingerprint(p);
    if (counts.fingerprint != fp) {
        throw Error(Errc::fingerprint_mismatch, "counts fingerprint " + counts.fingerprint + " does not match protocol '" +
                                                    p.name + "' (" + fp + ")");
    }
    SolverOptions opt;
    opt.objective = parse_objective(a.objective);
    opt.max_iterations = a.max_iterations;
    const ReconstructionResult res =
        a.method == "block" ? block_solve_v(counts.records, p, opt) : reconstruct(counts.records, p, opt);
    io::write_file(a.out, io::dump(io::result_to_json(res, p)));
    const ParamPoint pt{res.state, res.unknowns};
    for (ParamId id : all_params(p.dim)) {
        if (id.kind != ParamKind::lambda) out << param_name(p.dim, id) << '\t' << format_g17(get_param(pt, id)) << '\n';
    }
    for (int k = 0; k < 2; ++k) {
        if (p.has_unknown({ParamKind::lambda, k})) {
            out << param_name(p.dim, {ParamKind::lambda, k}) << '\t' << format_g17(*res.unknowns.lambda[k]) << '\n';
        }
    }
    out << "residual\t" << format_g17(res.residual) << '\n';
    out << "jacobian_abs_det\t" << format_g17(res.jacobian_abs_det) << '\n';
    out << "condition_number\t" << format_g17(res.condition_number) << '\n';
    out << "min_eigenvalue\t" << format_g17(res.min_eigenvalue) << '\n';
    out << "converged\t" << (res.converged ? "true" : "false") << '\n';
    if (res.singular_at_solution) err << "warning: Jacobian is near-singular at the solution\n";
    if (!res.converged) {
        err << "NoConvergence: solver did not reach the gradient tolerance (gradient norm "
            << format_g17(res.gradient_norm) << "); result written and flagged\n";
        return kNoConvergence;
    }
    return kOk;
}

struct JacobianArgs {
    std::string protocol, point;
    bool pattern = false;
};

inline int cmd_jacobian(const JacobianArgs &a, std::ostream &out) {
    const Protocol p = io::load_protocol(a.protocol);
    ParamPoint pt = io::point_from_json(io::parse_text(io::read_file(a.point), a.point));
    require_unknowns(p, pt);
    pt.process = p.complete(pt.process);
    const JacobianReport j = numeric_jacobian(p, pt);
    out << "abs_det\t" << format_g17(j.abs_det) << '\n';
    if (j.determinant) out << "determinant\t" << format_g17(*j.determinant) << '\n';
    out << "min_singular_value\t" << format_g17(j.min_singular_value) << '\n';
    out << "condition_number\t" << format_g17(j.condition_number) << '\n';
    if (a.pattern) {
        const auto order = block_column_order(p);
        out << "pattern (X nonzero, . below 1e-10) columns:";
        for (int c : order) out << ' ' << param_name(p.dim, p.unknowns[static_cast<std::size_t>(c)]);
        out << '\n';
        const auto mask = near_zero_mask(j.matrix, 1e-10);
        for (Eigen::Index r = 0; r < j.matrix.rows(); ++r) {
            for (int c : order) out << (mask(r, c) ? '.' : 'X');
            out << '\n';
        }
    }
    return kOk;
}

struct SweepArgs {
    std::string protocol, point, out;
    std::vector<std::string> axes;
    int grid = 64;
};

inline int cmd_sweep(const SweepArgs &a, std::ostream &out) {
    const Protocol p = io::load_protocol(a.protocol);
    std::vector<ScanAxis> axes;
    for (const auto &text : a.axes) axes.push_back(parse_axis(p.dim, text));
    ParamPoint base = default_point(p);
    if (!a.point.empty()) {
        base = io::point_from_json(io::parse_text(io::read_file(a.point), a.point));
        for (const auto &axis : axes) {
            if (axis.param.kind == ParamKind::lambda && base.process.dim == p.dim &&
                !base.process.lambda[axis.param.index]) {
                base.process.lambda[axis.param.index] = axis.lo;
            }
        }
        require_unknowns(p, base);
        base.process = p.complete(base.process);
    }
    const ScanResult scan = singularity_scan(p, base, axes, a.grid);
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    io::write_file(a.out, csv.str());
    const auto flagged = std::count_if(scan.rows.begin(), scan.rows.end(), [](const ScanRow &r) { return r.near_singular; });
    out << "rows\t" << scan.rows.size() << '\n';
    out << "median_abs_det\t" << format_g17(scan.median_abs_det) << '\n';
    out << "near_singular\t" << flagged << '\n';
    return kOk;
}

struct ValidateArgs {
    std::string suite = "quick", report = "CONVENTIONS.txt";
    std::optional<std::uint64_t> seed;
    std::vector<int> only;
};

inline int cmd_validate(const ValidateArgs &a, const Environment &env, std::ostream &out) {
    validation::SuiteOptions opt;
    opt.full = a.suite == "full";
    if (env.seed) opt.seed = *parse_seed(*env.seed, "SCT_SEED");
    if (a.seed) opt.seed = *a.seed;
    std::vector<int> ids = a.only;
    if (ids.empty()) {
        for (int i = 1; i <= validation::kNumCriteria; ++i) ids.push_back(i);
    }
    bool all = true;
    for (int id : ids) {
        std::ostringstream conventions;
        const validation::CriterionResult r = validation::run_criterion(id, opt, &conventions);
        if (id == 2 && !a.report.empty()) io::write_file(a.report, conventions.str());
        validation::print(out, r);
        all = all && (r.passed || r.skipped);
    }
    out << "suite " << a.suite << " seed " << opt.seed << ": " << (all ? "PASS" : "FAIL") << '\n';
    return all ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
               const Environment &env = Environment::from_process()) {
    CLI::App app{"Self-calibrating quantum state tomography", "sct"};
    app.require_subcommand(1);

    SimulateArgs sim;
    std::uint64_t sim_seed = 0;
    auto *simulate = app.add_subcommand("simulate", "simulate count records from an experiment config");
    simulate->add_option("--config", sim.config, "experiment config (JSON)")->required();
    simulate->add_option("--out", sim.out, "counts file to write")->required();
    auto *sim_seed_opt = simulate->add_option("--seed", sim_seed, "noise seed; overrides SCT_SEED and the config");

    ReconstructArgs rec;
    auto *reconstruct_cmd = app.add_subcommand("reconstruct", "estimate state and process unknowns from counts");
    reconstruct_cmd->add_option("--counts", rec.counts, "counts file")->required();
    reconstruct_cmd->add_option("--protocol", rec.protocol, "scenario name or protocol file")->required();
    reconstruct_cmd->add_option("--objective", rec.objective, "least_squares or poisson_mle")
        ->check(CLI::IsMember({"least_squares", "poisson_mle"}));
    reconstruct_cmd->add_option("--method", rec.method, "joint or block (V-type only)")
        ->check(CLI::IsMember({"joint", "block"}));
    reconstruct_cmd->add_option("--max-iterations", rec.max_iterations, "iteration cap per start")
        ->check(CLI::Range(1, 100000));
    reconstruct_cmd->add_option("--out", rec.out, "result file to write")->required();

    JacobianArgs jac;
    auto *jacobian = app.add_subcommand("jacobian", "Jacobian determinant and conditioning at a point");
    jacobian->add_option("--protocol", jac.protocol, "scenario name or protocol file")->required();
    jacobian->add_option("--point", jac.point, "point file")->required();
    jacobian->add_flag("--pattern", jac.pattern, "print the near-zero mask in block column order");

    SweepArgs sw;
    auto *sweep = app.add_subcommand("sweep", "scan |det J| over a grid and write CSV");
    sweep->add_option("--protocol", sw.protocol, "scenario name or protocol file")->required();
    sweep->add_option("--point", sw.point, "base point file (default: a generic point)");
    sweep->add_option("--axis", sw.axes, "name:lo:hi, repeatable; bounds accept pi, 2pi, pi/4")->required();
    sweep->add_option("--grid", sw.grid, "points per axis");
    sweep->add_option("--out", sw.out, "CSV file to write")->required();

    ValidateArgs val;
    std::uint64_t val_seed = 0;
    auto *validate_cmd = app.add_subcommand("validate", "run the acceptance suite");
    validate_cmd->add_option("--suite", val.suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    auto *val_seed_opt = validate_cmd->add_option("--seed", val_seed, "suite seed; overrides SCT_SEED");
    validate_cmd->add_option("--report", val.report, "conventions report path (empty to skip)");
    validate_cmd->add_option("--criterion", val.only, "run only these criteria")->check(CLI::Range(1, validation::kNumCriteria));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (simulate->parsed()) {
            if (*sim_seed_opt) sim.seed = sim_seed;
            return cmd_simulate(sim, env, out);
        }
        if (reconstruct_cmd->parsed()) return cmd_reconstruct(rec, out, err);
        if (jacobian->parsed()) return cmd_jacobian(jac, out);
        if (sweep->parsed()) return cmd_sweep(sw, out);
        if (*val_seed_opt) val.seed = val_seed;
        return cmd_validate(val, env, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace sct::cli

#endif  // SCT_CLI_HPP
