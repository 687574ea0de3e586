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

// Joint estimation of state and process unknowns from count records:
// linear inversion, least squares and Poisson likelihood fits by projected
// Levenberg-Marquardt with deterministic multi-start, the block-sequential
// V-type solve and an exhaustive grid oracle.

#ifndef SCT_INVERT_HPP
#define SCT_INVERT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sct/error.hpp"
#include "sct/forward.hpp"
#include "sct/identify.hpp"
#include "sct/protocol.hpp"

namespace sct {

enum class Objective { least_squares, poisson_mle };

inline std::string to_string(Objective o) { return o == Objective::least_squares ? "least_squares" : "poisson_mle"; }

inline Objective parse_objective(std::string_view s) {
    if (s == "least_squares") return Objective::least_squares;
    if (s == "poisson_mle") return Objective::poisson_mle;
    throw Error(Errc::schema_error, "unknown objective '" + std::string(s) + "'");
}

struct SolverOptions {
    Objective objective = Objective::least_squares;
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-12;
    int phase_starts = 8;   // phases k 2pi / phase_starts
    int lambda_starts = 8;  // lambdas (k + 1/2) lambda_max / lambda_starts
    /// Upper bound on every lambda. Rotations by lambda and 2pi - lambda
    /// differ only by a pi shift of the coherence phases, so (0, pi] is
    /// the identifiable range.
    double lambda_max = std::numbers::pi;
    /// Inverse condition number below which the solution is flagged singular.
    double singular_threshold = 1e-8;
    /// Local fits are run from the `max_starts` grid starts with the lowest
    /// objective (all when 0); extra starts always run.
    int max_starts = 16;
    /// Additional start points, tried before the grid starts.
    std::vector<ParamPoint> extra_starts;
    /// Values of state parameters that are not unknowns of the protocol.
    std::optional<DensityParams> fixed_state;
};

struct ReconstructionResult {
    DensityParams state;  // gauge fixed, PSD clipped when needed
    UnknownParams unknowns;
    Objective objective = Objective::least_squares;
    double residual = 0.0;  // sum of squares, or Poisson deviance / 2
    double jacobian_abs_det = 0.0;
    double condition_number = 0.0;
    bool singular_at_solution = false;
    int n_starts = 0;
    int best_start = -1;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    double min_eigenvalue = 0.0;  // of the normalized estimate before clipping
    double clip_magnitude = 0.0;
    std::array<bool, 3> phase_undefined{};
    std::optional<int> failed_block;
};

// ---------------------------------------------------------------------------
// Observations and the Cartesian linear design.

/// Values of `records` in protocol order; records must cover every setting
/// exactly once with strictly increasing indices.
inline Eigen::VectorXd observations(const std::vector<CountRecord> &records, const Protocol &protocol) {
    if (records.size() != protocol.settings.size()) {
        throw Error(Errc::dimension_mismatch, "counts have " + std::to_string(records.size()) + " records, protocol '" +
                                                  protocol.name + "' has " +
                                                  std::to_string(protocol.settings.size()) + " settings");
    }
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].setting_index != static_cast<int>(k)) {
            throw Error(Errc::schema_error, "record setting_index must run 0.." + std::to_string(records.size() - 1));
        }
    }
    return record_values(records);
}

/// Number of real Cartesian coordinates of a dim x dim Hermitian matrix in
/// the layout (populations, then x_k, y_k per pair) with rho_ij = x - i y.
inline int cartesian_size(int dim) { return dim + 2 * num_pairs(dim); }

/// A with n = A c, c the Cartesian coordinates of the state.
inline Eigen::MatrixXd linear_design(const Protocol &protocol, const UnknownParams &process) {
    const UnknownParams complete = protocol.complete(process);
    const int dim = protocol.dim;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(protocol.settings.size()), cartesian_size(dim));
    for (std::size_t r = 0; r < protocol.settings.size(); ++r) {
        const auto &setting = protocol.settings[r];
        const CMatrix m = measurement_operator(resolve(setting, complete), setting.label);
        const auto row = static_cast<Eigen::Index>(r);
        for (int i = 0; i < dim; ++i) a(row, i) = m(i, i).real();
        for (int k = 0; k < num_pairs(dim); ++k) {
            const auto [i, j] = kPairs[k];
            a(row, dim + 2 * k) = 2.0 * m(i, j).real();
            a(row, dim + 2 * k + 1) = -2.0 * m(i, j).imag();
        }
    }
    return a;
}

inline Eigen::VectorXd to_cartesian(const DensityParams &s) {
    Eigen::VectorXd c(cartesian_size(s.dim));
    for (int i = 0; i < s.dim; ++i) c(i) = s.population[i];
    for (int k = 0; k < num_pairs(s.dim); ++k) {
        c(s.dim + 2 * k) = s.coherence[k] * std::cos(s.phase[k]);
        c(s.dim + 2 * k + 1) = s.coherence[k] * std::sin(s.phase[k]);
    }
    return c;
}

inline DensityParams from_cartesian(int dim, const Eigen::VectorXd &c) {
    DensityParams s;
    s.dim = dim;
    for (int i = 0; i < dim; ++i) s.population[i] = c(i);
    for (int k = 0; k < num_pairs(dim); ++k) {
        const double x = c(dim + 2 * k), y = c(dim + 2 * k + 1);
        s.coherence[k] = std::hypot(x, y);
        s.phase[k] = wrap_phase(std::atan2(y, x));
    }
    return s;
}

namespace detail {

/// Cartesian columns that carry unknowns, or nullopt when some pair has only
/// one of (magnitude, phase) unknown and the problem is not linear.
inline std::optional<std::vector<int>> linear_columns(const Protocol &p) {
    std::vector<int> cols;
    for (int i = 0; i < p.dim; ++i) {
        if (p.has_unknown({ParamKind::population, i})) cols.push_back(i);
    }
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        const bool mag = p.has_unknown({ParamKind::coherence, k});
        const bool ph = p.has_unknown({ParamKind::phase, k});
        if (mag != ph) return std::nullopt;
        if (mag) {
            cols.push_back(p.dim + 2 * k);
            cols.push_back(p.dim + 2 * k + 1);
        }
    }
    return cols;
}

struct LinearSolve {
    DensityParams state;
    double residual = 0.0;
    int rank = 0;
};

/// Least-squares Cartesian solve for the unknown state coordinates with the
/// process parameters and the remaining state coordinates held at `base`.
inline LinearSolve linear_solve(const Protocol &p, const Eigen::VectorXd &obs, const ParamPoint &base,
                                const std::vector<int> &cols) {
    const Eigen::MatrixXd a = linear_design(p, base.process);
    Eigen::VectorXd c = to_cartesian(base.state);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
        c(cols[k]) = 0.0;
    }
    const Eigen::VectorXd rhs = obs - a * c;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    qr.setThreshold(1e-12);
    const Eigen::VectorXd sol = qr.solve(rhs);
    for (std::size_t k = 0; k < cols.size(); ++k) c(cols[k]) = sol(static_cast<Eigen::Index>(k));
    LinearSolve out;
    out.rank = static_cast<int>(qr.rank());
    out.residual = (sub * sol - rhs).squaredNorm();
    out.state = from_cartesian(p.dim, c);
    return out;
}

inline double observation_scale(const Eigen::VectorXd &obs) {
    const double m = obs.size() > 0 ? obs.cwiseAbs().maxCoeff() : 0.0;
    return m > 0.0 ? m : 1.0;
}

/// Coherence magnitudes at or below this fraction of the trace have no
/// meaningful phase.
inline constexpr double kPhaseUndefined = 1e-12;

inline std::array<bool, 3> undefined_phases(const DensityParams &s) {
    std::array<bool, 3> out{};
    const double scale = std::max(std::abs(s.scale()), 1e-300);
    for (int k = 0; k < num_pairs(s.dim); ++k) out[k] = s.coherence[k] <= kPhaseUndefined * scale;
    return out;
}

}  // namespace detail

struct LinearInversion {
    DensityParams state;
    std::array<bool, 3> phase_undefined{};
    double residual = 0.0;
};

/// Cartesian least squares for protocols whose unitaries are fully known.
inline LinearInversion linear_invert(const std::vector<CountRecord> &counts, const Protocol &protocol) {
    validate(protocol);
    if (protocol.has_process_unknowns()) {
        throw Error(Errc::invalid_range, "linear inversion needs fully known unitaries; '" + protocol.name +
                                             "' has process unknowns");
    }
    const auto cols = detail::linear_columns(protocol);
    if (!cols || static_cast<int>(cols->size()) != cartesian_size(protocol.dim)) {
        throw Error(Errc::invalid_range, "linear inversion needs every state parameter to be unknown");
    }
    const Eigen::VectorXd obs = observations(counts, protocol);
    ParamPoint base;
    base.state.dim = protocol.dim;
    base.process.dim = protocol.dim;
    const detail::LinearSolve ls = detail::linear_solve(protocol, obs, base, *cols);
    if (ls.rank < static_cast<int>(cols->size())) {
        throw Error(Errc::rank_deficient, "design matrix rank " + std::to_string(ls.rank) + " < " +
                                              std::to_string(cols->size()) + " unknowns");
    }
    LinearInversion out;
    out.state = ls.state;
    out.residual = ls.residual;
    out.phase_undefined = detail::undefined_phases(out.state);
    for (int k = 0; k < num_pairs(protocol.dim); ++k) {
        if (out.phase_undefined[k]) out.state.phase[k] = 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Objective.

namespace detail {

/// Residual vector whose squared norm is the objective: plain differences
/// for least squares, signed deviance residuals for the Poisson likelihood.
inline Eigen::VectorXd residuals(const Eigen::VectorXd &model, const Eigen::VectorXd &obs, Objective kind) {
    if (kind == Objective::least_squares) return model - obs;
    Eigen::VectorXd r(model.size());
    for (Eigen::Index k = 0; k < model.size(); ++k) {
        const double m = model(k), o = obs(k);
        if (!(m > 0.0)) throw Error(Errc::nonpositive_model, "model statistic is not positive");
        double d = m;
        if (o > 0.0) {
            // o (u - ln(1 + u)) with u = m / o - 1, by series near u = 0.
            const double u = (m - o) / o;
            const double g = std::abs(u) < 1e-3 ? u * u * (0.5 - u * (1.0 / 3.0 - u * (0.25 - u / 5.0)))
                                                : u - std::log1p(u);
            d = o * g;
        }
        r(k) = std::copysign(std::sqrt(2.0 * std::max(d, 0.0)), m - o);
    }
    return r;
}

}  // namespace detail

struct ObjectiveValue {
    double value = 0.0;
    Eigen::VectorXd gradient;
};

/// least_squares: sum (n_model - n_obs)^2; poisson_mle: sum n_model -
/// n_obs ln n_model. Gradient by central differences with the Jacobian step
/// rule. A nonpositive model statistic under poisson_mle yields +infinity.
inline double objective_value(const Eigen::VectorXd &x, const Eigen::VectorXd &obs, const Protocol &protocol,
                              const ParamPoint &base, Objective kind) {
    const Eigen::VectorXd model = predict(protocol, unpack(protocol, x, base));
    if (kind == Objective::least_squares) return (model - obs).squaredNorm();
    double f = 0.0;
    for (Eigen::Index k = 0; k < model.size(); ++k) {
        if (!(model(k) > 0.0)) return std::numeric_limits<double>::infinity();
        f += model(k) - obs(k) * std::log(model(k));
    }
    return f;
}

inline ObjectiveValue objective_eval(const Eigen::VectorXd &x, const std::vector<CountRecord> &counts,
                                     const Protocol &protocol, const ParamPoint &base, Objective kind) {
    const Eigen::VectorXd obs = observations(counts, protocol);
    ObjectiveValue out;
    out.value = objective_value(x, obs, protocol, base, kind);
    out.gradient.resize(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = fd_step(x(k));
        Eigen::VectorXd plus = x, minus = x;
        plus(k) += h;
        minus(k) -= h;
        out.gradient(k) = (objective_value(plus, obs, protocol, base, kind) -
                           objective_value(minus, obs, protocol, base, kind)) /
                          (2.0 * h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Projected Levenberg-Marquardt.

namespace detail {

/// Feasible representative: magnitudes reflected into [0, inf) with the
/// matching pi phase shift, populations clamped at 0, phases wrapped,
/// lambdas clamped into (0, lambda_max].
inline void project(const Protocol &p, Eigen::VectorXd &x, double lambda_max) {
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) {
        const ParamId id = p.unknowns[k];
        const auto i = static_cast<Eigen::Index>(k);
        if (id.kind == ParamKind::coherence && x(i) < 0.0) {
            x(i) = -x(i);
            for (std::size_t q = 0; q < p.unknowns.size(); ++q) {
                if (p.unknowns[q] == ParamId{ParamKind::phase, id.index}) {
                    x(static_cast<Eigen::Index>(q)) += std::numbers::pi;
                }
            }
        }
    }
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        switch (p.unknowns[k].kind) {
            case ParamKind::population: x(i) = std::max(x(i), 0.0); break;
            case ParamKind::coherence: break;
            case ParamKind::phase: x(i) = wrap_phase(x(i)); break;
            case ParamKind::lambda: x(i) = std::clamp(x(i), 1e-9, lambda_max); break;
        }
    }
}

/// Infinity norm of the gradient with components that push against an
/// active bound removed.
inline double projected_gradient_norm(const Protocol &p, const Eigen::VectorXd &x, const Eigen::VectorXd &grad,
                                      double lambda_max) {
    double norm = 0.0;
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const ParamKind kind = p.unknowns[k].kind;
        const bool at_lower = (kind == ParamKind::population && x(i) <= 0.0) ||
                              (kind == ParamKind::lambda && x(i) <= 1e-9);
        const bool at_upper = kind == ParamKind::lambda && x(i) >= lambda_max;
        if ((at_lower && grad(i) > 0.0) || (at_upper && grad(i) < 0.0)) continue;
        norm = std::max(norm, std::abs(grad(i)));
    }
    return norm;
}

struct LmResult {
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::infinity();
    double gradient_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

struct Problem {
    const Protocol &protocol;
    const Eigen::VectorXd &obs;
    const ParamPoint &base;
    const SolverOptions &options;
    double scale;

    /// Residuals at x, or nullopt where the model is not admissible.
    std::optional<Eigen::VectorXd> residual(const Eigen::VectorXd &x) const {
        try {
            return residuals(predict(protocol, unpack(protocol, x, base)), obs, options.objective);
        } catch (const Error &e) {
            if (e.code() == Errc::nonpositive_model) return std::nullopt;
            throw;
        }
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd &x, const Eigen::VectorXd &r0) const {
        Eigen::MatrixXd j(r0.size(), x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double h = fd_step(x(k));
            Eigen::VectorXd plus = x, minus = x;
            plus(k) += h;
            minus(k) -= h;
            const auto rp = residual(plus), rm = residual(minus);
            if (rp && rm) {
                j.col(k) = (*rp - *rm) / (2.0 * h);
            } else if (rp) {
                j.col(k) = (*rp - r0) / h;
            } else if (rm) {
                j.col(k) = (r0 - *rm) / h;
            } else {
                j.col(k).setZero();
            }
        }
        return j;
    }
};

inline LmResult levenberg_marquardt(const Problem &prob, Eigen::VectorXd x) {
    const SolverOptions &opt = prob.options;
    project(prob.protocol, x, opt.lambda_max);
    LmResult out;
    auto r = prob.residual(x);
    if (!r) return out;
    double f = r->squaredNorm();
    double mu = 1e-3;
    const double floor = 1e-30 * prob.scale * prob.scale;
    for (int it = 0; it < opt.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd j = prob.jacobian(x, *r);
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * *r;
        out.gradient_norm = 2.0 * projected_gradient_norm(prob.protocol, x, g, opt.lambda_max);
        if (f <= floor || out.gradient_norm == 0.0) {
            out.converged = true;
            break;
        }
        const double diag_floor = std::max(1e-12 * jtj.diagonal().maxCoeff(), 1e-300);
        bool accepted = false;
        bool tiny_step = false;
        while (mu < 1e20) {
            Eigen::MatrixXd lhs = jtj;
            for (Eigen::Index k = 0; k < lhs.rows(); ++k) lhs(k, k) += mu * std::max(jtj(k, k), diag_floor);
            const Eigen::VectorXd step = lhs.ldlt().solve(-g);
            if (step.norm() <= opt.step_tolerance * (x.norm() + opt.step_tolerance)) {
                tiny_step = true;
                break;
            }
            Eigen::VectorXd trial = x + step;
            project(prob.protocol, trial, opt.lambda_max);
            const auto rt = prob.residual(trial);
            const double ft = rt ? rt->squaredNorm() : std::numeric_limits<double>::infinity();
            if (ft < f) {
                x = trial;
                r = rt;
                f = ft;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted || tiny_step) {
            out.converged = out.gradient_norm <= opt.gradient_tolerance * prob.scale;
            break;
        }
    }
    if (out.iterations == opt.max_iterations && !out.converged) {
        const Eigen::VectorXd g = prob.jacobian(x, *r).transpose() * *r;
        out.gradient_norm = 2.0 * projected_gradient_norm(prob.protocol, x, g, opt.lambda_max);
        out.converged = out.gradient_norm <= opt.gradient_tolerance * prob.scale;
    }
    out.x = x;
    out.objective = f;
    return out;
}

/// Deterministic start points: for each lambda grid point, the Cartesian
/// least-squares state, followed (when there is at most one unknown phase)
/// by the same magnitudes with the phase at each grid value.
inline std::vector<ParamPoint> start_points(const Protocol &p, const Eigen::VectorXd &obs, const ParamPoint &base,
                                            const SolverOptions &opt) {
    std::vector<ParamPoint> starts = opt.extra_starts;
    std::vector<int> lambda_slots;
    for (ParamId id : p.unknowns) {
        if (id.kind == ParamKind::lambda) lambda_slots.push_back(id.index);
    }
    std::vector<ParamId> phases;
    for (ParamId id : p.unknowns) {
        if (id.kind == ParamKind::phase) phases.push_back(id);
    }
    const auto cols = linear_columns(p);
    const int n_lambda_points = lambda_slots.empty() ? 1 : opt.lambda_starts;
    std::vector<int> idx(lambda_slots.size(), 0);
    for (;;) {
        ParamPoint seed = base;
        for (std::size_t a = 0; a < lambda_slots.size(); ++a) {
            seed.process.lambda[lambda_slots[a]] = (idx[a] + 0.5) * opt.lambda_max / opt.lambda_starts;
        }
        if (cols && !cols->empty()) {
            seed.state = linear_solve(p, obs, seed, *cols).state;
        } else {
            const double guess = observation_scale(obs) / p.dim;
            for (ParamId id : p.unknowns) {
                if (id.kind == ParamKind::population) set_param(seed, id, guess);
                if (id.kind == ParamKind::coherence) set_param(seed, id, guess / 2.0);
            }
        }
        starts.push_back(seed);
        if (phases.size() == 1) {
            for (int k = 0; k < opt.phase_starts; ++k) {
                ParamPoint s = seed;
                set_param(s, phases[0], kTwoPi * k / opt.phase_starts);
                starts.push_back(s);
            }
        }
        std::size_t a = 0;
        while (a < idx.size() && ++idx[a] == n_lambda_points) idx[a++] = 0;
        if (a == idx.size()) break;
    }
    return starts;
}

inline ParamPoint default_base(const Protocol &p, const SolverOptions &opt) {
    ParamPoint base;
    base.state.dim = p.dim;
    base.process.dim = p.dim;
    if (opt.fixed_state) {
        if (opt.fixed_state->dim != p.dim) throw Error(Errc::dimension_mismatch, "fixed state dimension differs");
        base.state = *opt.fixed_state;
    }
    return base;
}

struct MultiStart {
    LmResult best;
    int best_start = -1;
    int n_starts = 0;
    bool any_converged = false;
};

inline MultiStart multi_start(const Protocol &p, const Eigen::VectorXd &obs, const ParamPoint &base,
                              const SolverOptions &opt) {
    const Problem prob{p, obs, base, opt, observation_scale(obs)};
    std::vector<ParamPoint> starts = start_points(p, obs, base, opt);
    const std::size_t n_extra = opt.extra_starts.size();
    if (opt.max_starts > 0 && starts.size() > n_extra + static_cast<std::size_t>(opt.max_starts)) {
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t k = n_extra; k < starts.size(); ++k) {
            const auto r = prob.residual(pack(p, starts[k]));
            ranked.emplace_back(r ? r->squaredNorm() : std::numeric_limits<double>::infinity(), k);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });
        ranked.resize(static_cast<std::size_t>(opt.max_starts));
        std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) { return a.second < b.second; });
        std::vector<ParamPoint> kept(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(n_extra));
        for (const auto &r : ranked) kept.push_back(starts[r.second]);
        starts = std::move(kept);
    }
    MultiStart out;
    out.n_starts = static_cast<int>(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        LmResult r = levenberg_marquardt(prob, pack(p, starts[k]));
        if (r.x.size() == 0) continue;
        out.any_converged = out.any_converged || r.converged;
        // Converged minima outrank unconverged ones; then (objective, index).
        const bool better = out.best_start < 0 || (r.converged && !out.best.converged) ||
                            (r.converged == out.best.converged && r.objective < out.best.objective);
        if (better) {
            out.best = std::move(r);
            out.best_start = static_cast<int>(k);
        }
    }
    return out;
}

/// Gauge fixing, PSD clipping and diagnostics for a solved point.
inline ReconstructionResult finish(const Protocol &p, const Eigen::VectorXd &obs, const ParamPoint &solution,
                                   const SolverOptions &opt) {
    ReconstructionResult res;
    res.objective = opt.objective;
    // Control phases are measured from the fitted reference (offset 0); apply
    // V(-offset) so that the reference couplings are real and positive.
    GeneratorParams reference;
    reference.dim = p.dim;
    reference.coupling = {1.0, p.dim == 3 ? 1.0 : 0.0};
    reference.phi = {solution.process.phase_offset[0], solution.process.phase_offset[1]};
    const GaugePair fixed = gauge_fix(solution.state, reference);
    res.state = fixed.state;
    res.unknowns = solution.process;
    res.unknowns.phase_offset = {0.0, 0.0};

    const JacobianReport jac = numeric_jacobian(p, {res.state, res.unknowns});
    res.jacobian_abs_det = jac.abs_det;
    res.condition_number = jac.condition_number;
    res.singular_at_solution = !(1.0 / jac.condition_number >= opt.singular_threshold);

    const double trace = res.state.scale();
    const CMatrix m = detail::hermitian_from(res.state);
    res.min_eigenvalue = trace > 0.0 ? min_eigenvalue(m) / trace : min_eigenvalue(m);
    if (res.min_eigenvalue < -1e-10) {
        const PsdClip clip = psd_clip(m);
        res.clip_magnitude = trace > 0.0 ? clip.clipped / trace : clip.clipped;
        DensityParams clipped = extract_state(clip.matrix);
        res.state = clipped;
    }
    res.phase_undefined = detail::undefined_phases(res.state);
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        if (res.phase_undefined[k]) res.state.phase[k] = 0.0;
    }
    const Eigen::VectorXd model = predict(p, {res.state, res.unknowns});
    res.residual = opt.objective == Objective::least_squares
                       ? (model - obs).squaredNorm()
                       : 0.5 * detail::residuals(model, obs, opt.objective).squaredNorm();
    return res;
}

inline void require_identifiable(const Protocol &p) {
    if (structural_check(p).singular) {
        std::string msg = "protocol '" + p.name + "' is structurally singular: its Jacobian is rank deficient at "
                                                 "every probe point";
        if (p.name == "C") msg += "; use 'C-alt'";
        throw Error(Errc::structural_singularity, msg);
    }
}

}  // namespace detail

/// Multi-start fit of every unknown of `protocol` to `counts`.
inline ReconstructionResult reconstruct(const std::vector<CountRecord> &counts, const Protocol &protocol,
                                        const SolverOptions &options = {}) {
    validate(protocol);
    detail::require_identifiable(protocol);
    const Eigen::VectorXd obs = observations(counts, protocol);
    const ParamPoint base = detail::default_base(protocol, options);
    const detail::MultiStart ms = detail::multi_start(protocol, obs, base, options);
    if (ms.best_start < 0) throw Error(Errc::nonpositive_model, "no start point admits a positive model");
    ReconstructionResult res = detail::finish(protocol, obs, unpack(protocol, ms.best.x, base), options);
    res.n_starts = ms.n_starts;
    res.best_start = ms.best_start;
    res.iterations = ms.best.iterations;
    res.converged = ms.best.converged;
    res.gradient_norm = ms.best.gradient_norm;
    return res;
}

/// Single local fit from `start` (no multi-start).
inline ReconstructionResult polish(const std::vector<CountRecord> &counts, const Protocol &protocol,
                                   const ParamPoint &start, const SolverOptions &options = {}) {
    validate(protocol);
    const Eigen::VectorXd obs = observations(counts, protocol);
    const detail::Problem prob{protocol, obs, start, options, detail::observation_scale(obs)};
    const detail::LmResult lm = detail::levenberg_marquardt(prob, pack(protocol, start));
    if (lm.x.size() == 0) throw Error(Errc::nonpositive_model, "start point does not admit a positive model");
    ReconstructionResult res = detail::finish(protocol, obs, unpack(protocol, lm.x, start), options);
    res.n_starts = 1;
    res.best_start = 0;
    res.iterations = lm.iterations;
    res.converged = lm.converged;
    res.gradient_norm = lm.gradient_norm;
    return res;
}

/// Sub-protocol made of one block's settings and unknowns.
inline Protocol block_protocol(const Protocol &p, std::size_t b) {
    const ProtocolBlock &blk = p.blocks.at(b);
    Protocol sub;
    sub.name = p.name + "/block" + std::to_string(b + 1);
    sub.dim = p.dim;
    sub.settings.assign(p.settings.begin() + blk.first_setting,
                        p.settings.begin() + blk.first_setting + blk.num_settings);
    sub.unknowns = blk.unknowns;
    sub.phase_known = p.phase_known;
    return sub;
}

/// Solves the V-type blocks in sequence, each with the earlier estimates
/// held fixed, then reports diagnostics for the full protocol.
inline ReconstructionResult block_solve_v(const std::vector<CountRecord> &counts, const Protocol &protocol,
                                          const SolverOptions &options = {}) {
    validate(protocol);
    if (protocol.dim != 3 || protocol.blocks.size() != 3) {
        throw Error(Errc::invalid_range, "block solve needs the three-block V-type protocol");
    }
    const Eigen::VectorXd obs = observations(counts, protocol);
    ParamPoint point = detail::default_base(protocol, options);
    SolverOptions sub_opt = options;
    sub_opt.extra_starts.clear();
    sub_opt.fixed_state.reset();
    bool converged = true;
    int starts = 0, iterations = 0;
    std::optional<int> failed;
    for (std::size_t b = 0; b < protocol.blocks.size(); ++b) {
        const Protocol sub = block_protocol(protocol, b);
        const Eigen::VectorXd sub_obs = obs.segment(protocol.blocks[b].first_setting, protocol.blocks[b].num_settings);
        detail::MultiStart ms;
        try {
            ms = detail::multi_start(sub, sub_obs, point, sub_opt);
        } catch (const Error &e) {
            throw Error(e.code(), "block " + std::to_string(b + 1) + ": " + e.what());
        }
        if (ms.best_start < 0) {
            throw Error(Errc::nonpositive_model, "block " + std::to_string(b + 1) + ": no admissible start");
        }
        point = unpack(sub, ms.best.x, point);
        starts += ms.n_starts;
        iterations += ms.best.iterations;
        if (!ms.best.converged && !failed) failed = static_cast<int>(b + 1);
        converged = converged && ms.best.converged;
    }
    ReconstructionResult res = detail::finish(protocol, obs, point, options);
    res.n_starts = starts;
    res.iterations = iterations;
    res.converged = converged;
    res.failed_block = failed;
    return res;
}

// ---------------------------------------------------------------------------
// Grid oracle.

struct GridOracleResult {
    ParamPoint point;
    double objective = 0.0;
    std::size_t evaluations = 0;
    bool profiled = false;  // state coordinates solved exactly at each node
};

/// Exhaustive least-squares search followed by `refine_levels` zooms to +-1
/// grid spacing around the incumbent. When the state unknowns enter
/// linearly (Cartesian coordinates), the grid spans only the lambdas and the
/// state is solved exactly at every node; otherwise every unknown is
/// gridded, with magnitudes in [0, magnitude_bound] (coherences half that).
inline GridOracleResult grid_oracle(const std::vector<CountRecord> &counts, const Protocol &protocol, int grid,
                                    int refine_levels, double lambda_max = std::numbers::pi,
                                    std::optional<double> magnitude_bound = std::nullopt) {
    validate(protocol);
    if (protocol.unknowns.size() > 6) {
        throw Error(Errc::too_many_dims, "grid oracle supports at most 6 unknowns, '" + protocol.name + "' has " +
                                             std::to_string(protocol.unknowns.size()));
    }
    if (grid < 2) throw Error(Errc::empty_region, "grid must have at least 2 points per axis");
    const Eigen::VectorXd obs = observations(counts, protocol);
    const auto cols = detail::linear_columns(protocol);
    const bool profiled = cols.has_value() && !cols->empty();
    const double mag = magnitude_bound.value_or(2.0 * detail::observation_scale(obs));

    std::vector<std::size_t> axes;
    for (std::size_t k = 0; k < protocol.unknowns.size(); ++k) {
        if (!profiled || protocol.unknowns[k].kind == ParamKind::lambda) axes.push_back(k);
    }
    std::vector<double> lo(axes.size()), hi(axes.size());
    std::vector<bool> periodic(axes.size(), false);
    for (std::size_t a = 0; a < axes.size(); ++a) {
        switch (protocol.unknowns[axes[a]].kind) {
            case ParamKind::population: lo[a] = 0.0; hi[a] = mag; break;
            case ParamKind::coherence: lo[a] = 0.0; hi[a] = mag / 2.0; break;
            case ParamKind::phase: lo[a] = 0.0; hi[a] = kTwoPi; periodic[a] = true; break;
            case ParamKind::lambda: lo[a] = lambda_max / (grid + 1); hi[a] = lambda_max; break;
        }
    }

    ParamPoint base;
    base.state.dim = protocol.dim;
    base.process.dim = protocol.dim;
    GridOracleResult out;
    out.profiled = profiled;
    out.objective = std::numeric_limits<double>::infinity();
    ParamPoint best = base;
    Eigen::VectorXd best_x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(protocol.unknowns.size()));

    auto coord = [&](std::size_t a, int i) {
        const double denom = periodic[a] ? grid : grid - 1;
        return lo[a] + (hi[a] - lo[a]) * i / denom;
    };
    for (int level = 0; level <= refine_levels; ++level) {
        std::vector<int> idx(axes.size(), 0);
        for (;;) {
            Eigen::VectorXd x = best_x;
            for (std::size_t a = 0; a < axes.size(); ++a) x(static_cast<Eigen::Index>(axes[a])) = coord(a, idx[a]);
            ParamPoint node = unpack(protocol, x, base);
            double f = 0.0;
            if (profiled) {
                const detail::LinearSolve ls = detail::linear_solve(protocol, obs, node, *cols);
                node.state = ls.state;
                f = ls.residual;
            } else {
                f = (predict(protocol, node) - obs).squaredNorm();
            }
            ++out.evaluations;
            if (f < out.objective) {
                out.objective = f;
                best_x = x;
                best = node;
            }
            std::size_t a = 0;
            while (a < idx.size() && ++idx[a] == grid) idx[a++] = 0;
            if (a == idx.size()) break;
        }
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double spacing = (hi[a] - lo[a]) / (periodic[a] ? grid : grid - 1);
            const double c = best_x(static_cast<Eigen::Index>(axes[a]));
            lo[a] = c - spacing;
            hi[a] = c + spacing;
            periodic[a] = false;
            switch (protocol.unknowns[axes[a]].kind) {
                case ParamKind::population:
                case ParamKind::coherence: lo[a] = std::max(lo[a], 0.0); break;
                case ParamKind::lambda:
                    lo[a] = std::max(lo[a], 1e-9);
                    hi[a] = std::min(hi[a], lambda_max);
                    break;
                case ParamKind::phase: break;
            }
        }
    }
    best.state.canonicalize();
    out.point = best;
    return out;
}

}  // namespace sct

#endif  // SCT_INVERT_HPP
