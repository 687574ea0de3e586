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

// Identifiability analysis. A protocol identifies its unknowns at a point
// when the Jacobian d(statistics)/d(unknowns) has full column rank there.
// Central differences of the exact forward model are authoritative; the
// reference determinant formulas are evaluated literally for comparison.

#ifndef SCT_IDENTIFY_HPP
#define SCT_IDENTIFY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sct/error.hpp"
#include "sct/forward.hpp"
#include "sct/protocol.hpp"

namespace sct {

/// Central-difference step for a parameter currently at `x`.
inline double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

struct JacobianReport {
    Eigen::MatrixXd matrix;  // rows: settings, columns: protocol unknowns
    std::optional<double> determinant;
    double abs_det = 0.0;  // |det| when square, product of singular values otherwise
    double min_singular_value = 0.0;
    double condition_number = 0.0;
    Eigen::VectorXd point;
    Eigen::VectorXd steps;
};

/// Determinant/SVD diagnostics of an already computed Jacobian.
inline void summarize(JacobianReport &r) {
    const auto &m = r.matrix;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    r.min_singular_value = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    const double max_sv = sv.size() > 0 ? sv(0) : 0.0;
    r.condition_number =
        r.min_singular_value > 0.0 ? max_sv / r.min_singular_value : std::numeric_limits<double>::infinity();
    if (m.rows() == m.cols()) {
        r.determinant = m.fullPivLu().determinant();
        r.abs_det = std::abs(*r.determinant);
    } else {
        r.determinant.reset();
        r.abs_det = sv.prod();
    }
}

inline JacobianReport numeric_jacobian(const Protocol &protocol, const ParamPoint &point) {
    if (point.state.dim != protocol.dim || point.process.dim != protocol.dim) {
        throw Error(Errc::dimension_mismatch, "point dimension does not match protocol '" + protocol.name + "'");
    }
    JacobianReport r;
    const Eigen::VectorXd x = pack(protocol, point);
    const auto n_rows = static_cast<Eigen::Index>(protocol.settings.size());
    r.matrix.resize(n_rows, x.size());
    r.steps.resize(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = fd_step(x(k));
        Eigen::VectorXd plus = x, minus = x;
        plus(k) += h;
        minus(k) -= h;
        r.matrix.col(k) =
            (predict(protocol, unpack(protocol, plus, point)) - predict(protocol, unpack(protocol, minus, point))) /
            (2.0 * h);
        r.steps(k) = h;
    }
    r.point = x;
    summarize(r);
    return r;
}

/// |J| < tol, entrywise.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> near_zero_mask(const Eigen::MatrixXd &m,
                                                                          double tol = 1e-10) {
    return m.cwiseAbs().array() < tol;
}

// ---------------------------------------------------------------------------
// Reference determinant formulas.

enum class ClosedForm { A, B, C, J1, J2, J3, Vtotal };

inline std::string to_string(ClosedForm f) {
    switch (f) {
        case ClosedForm::A: return "A";
        case ClosedForm::B: return "B";
        case ClosedForm::C: return "C";
        case ClosedForm::J1: return "J1";
        case ClosedForm::J2: return "J2";
        case ClosedForm::J3: return "J3";
        case ClosedForm::Vtotal: return "Vtotal";
    }
    return "?";
}

using SymbolTable = std::map<std::string, double>;

/// Parameter values of `pt` keyed by parameter name (rho01, gamma, lambda_c, ...).
inline SymbolTable symbols_of(const ParamPoint &pt) {
    SymbolTable t;
    const int dim = pt.state.dim;
    for (ParamId id : all_params(dim)) {
        if (id.kind == ParamKind::lambda && !pt.process.lambda[id.index]) continue;
        t[param_name(dim, id)] = get_param(pt, id);
    }
    return t;
}

namespace detail {

inline double symbol(const SymbolTable &t, const std::string &name) {
    auto it = t.find(name);
    if (it == t.end()) throw Error(Errc::missing_symbol, "closed form needs '" + name + "'");
    return it->second;
}

inline double pow_int(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// 64 rho^2 sin^6(l/2) cos^4(l/2) (sin g - cos g)
inline double pair_determinant(double rho, double lambda, double gamma) {
    return 64.0 * rho * rho * pow_int(std::sin(lambda / 2.0), 6) * pow_int(std::cos(lambda / 2.0), 4) *
           (std::sin(gamma) - std::cos(gamma));
}

}  // namespace detail

/// Literal evaluation of the reference determinant expressions.
inline double closed_form_jacobian(ClosedForm form, const SymbolTable &t) {
    using detail::pow_int;
    using detail::symbol;
    switch (form) {
        case ClosedForm::A: return symbol(t, "rho01");
        case ClosedForm::B:
            return detail::pair_determinant(symbol(t, "rho01"), symbol(t, "lambda_c"), symbol(t, "gamma"));
        case ClosedForm::C: {
            const double lz = symbol(t, "lambda_z");
            return 6.0 * lz * lz * symbol(t, "rho00") * closed_form_jacobian(ClosedForm::B, t);
        }
        case ClosedForm::J1:
            return detail::pair_determinant(symbol(t, "rho01"), symbol(t, "lambda1"), symbol(t, "gamma01"));
        case ClosedForm::J2: {
            const double l2 = symbol(t, "lambda2"), rho = symbol(t, "rho02"), g = symbol(t, "gamma02");
            return 2.0 * pow_int(std::sin(l2), 4) * std::cos(l2) * rho * rho * (std::cos(g) - std::sin(g));
        }
        case ClosedForm::J3: {
            const double l1 = symbol(t, "lambda1"), l2 = symbol(t, "lambda2"), rho = symbol(t, "rho12");
            const double omega = std::hypot(l1, l2);
            const double bracket = l1 * l1 + l2 * l2 * std::cos(omega / 2.0);
            return -16.0 * l1 * l1 * l2 * l2 * pow_int(std::sin(omega / 4.0), 4) * rho * bracket * bracket /
                   pow_int(omega, 8);
        }
        case ClosedForm::Vtotal:
            return closed_form_jacobian(ClosedForm::J1, t) * closed_form_jacobian(ClosedForm::J2, t) *
                   closed_form_jacobian(ClosedForm::J3, t);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Structural checks.

/// Deterministic generic evaluation points for `protocol` (random states with
/// coherences >= 0.05 N, lambdas in [0.5, 2.5]).
inline std::vector<ParamPoint> probe_points(const Protocol &protocol, int count, std::uint64_t seed = 7) {
    std::vector<ParamPoint> out;
    auto rng = make_stream(seed, 0);
    for (int k = 0; k < count; ++k) {
        ParamPoint pt;
        pt.state = random_state(rng, protocol.dim, 1.0, 0.05);
        pt.process.dim = protocol.dim;
        pt.process.lambda = {uniform(rng, 0.5, 2.5), uniform(rng, 0.5, 2.5)};
        out.push_back(pt);
    }
    return out;
}

struct StructuralCheck {
    bool singular = false;
    double best_inverse_condition = 0.0;  // max over probes of sigma_min / sigma_max
};

/// A protocol is structurally singular when its Jacobian is rank deficient
/// at every probe point.
inline StructuralCheck structural_check(const Protocol &protocol, int probes = 3) {
    StructuralCheck out;
    for (const ParamPoint &pt : probe_points(protocol, probes)) {
        const JacobianReport r = numeric_jacobian(protocol, pt);
        out.best_inverse_condition = std::max(out.best_inverse_condition, 1.0 / r.condition_number);
    }
    out.singular = out.best_inverse_condition < 1e-9;
    return out;
}

// ---------------------------------------------------------------------------
// Singularity scans.

struct ScanAxis {
    ParamId param;
    double lo = 0.0;
    double hi = 0.0;
};

struct ScanRow {
    std::vector<double> values;
    double abs_det = 0.0;
    bool near_singular = false;
};

struct ScanResult {
    std::vector<std::string> axis_names;
    std::vector<ScanRow> rows;
    double median_abs_det = 0.0;
};

/// Grid coordinates of one axis. Phase axes are periodic and sampled on the
/// half-open interval [lo, hi); all others include both end points.
inline std::vector<double> axis_points(const ScanAxis &axis, int grid) {
    std::vector<double> v(static_cast<std::size_t>(grid));
    const bool periodic = axis.param.kind == ParamKind::phase;
    const double denom = periodic ? grid : std::max(grid - 1, 1);
    for (int k = 0; k < grid; ++k) v[static_cast<std::size_t>(k)] = axis.lo + (axis.hi - axis.lo) * k / denom;
    return v;
}

/// Evaluates |det J| on the Cartesian grid spanned by `axes` around `base`;
/// points with |det| < 1e-8 * median |det| are flagged.
inline ScanResult singularity_scan(const Protocol &protocol, const ParamPoint &base, const std::vector<ScanAxis> &axes,
                                   int grid) {
    if (axes.empty()) throw Error(Errc::empty_region, "no scan axes given");
    if (grid < 2) throw Error(Errc::empty_region, "grid must have at least 2 points per axis");
    for (const auto &a : axes) {
        if (!(a.hi > a.lo)) throw Error(Errc::empty_region, "empty interval for " + param_name(protocol.dim, a.param));
    }
    ScanResult out;
    std::vector<std::vector<double>> coords;
    for (const auto &a : axes) {
        out.axis_names.push_back(param_name(protocol.dim, a.param));
        coords.push_back(axis_points(a, grid));
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        ParamPoint pt = base;
        ScanRow row;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double v = coords[a][idx[a]];
            set_param(pt, axes[a].param, v);
            row.values.push_back(v);
        }
        row.abs_det = numeric_jacobian(protocol, pt).abs_det;
        out.rows.push_back(std::move(row));
        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == coords[a].size()) idx[a++] = 0;
        if (a == axes.size()) break;
    }
    std::vector<double> dets;
    for (const auto &r : out.rows) dets.push_back(r.abs_det);
    std::nth_element(dets.begin(), dets.begin() + static_cast<std::ptrdiff_t>(dets.size() / 2), dets.end());
    out.median_abs_det = dets[dets.size() / 2];
    const double scale = out.median_abs_det > 0.0 ? out.median_abs_det : *std::max_element(dets.begin(), dets.end());
    for (auto &r : out.rows) r.near_singular = r.abs_det < 1e-8 * scale;
    return out;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV with header `param1,...,paramK,abs_det,flag`.
inline void write_scan_csv(std::ostream &os, const ScanResult &scan) {
    for (const auto &name : scan.axis_names) os << name << ',';
    os << "abs_det,flag\n";
    for (const auto &row : scan.rows) {
        for (double v : row.values) os << format_g17(v) << ',';
        os << format_g17(row.abs_det) << ',' << (row.near_singular ? 1 : 0) << '\n';
    }
}

}  // namespace sct

#endif  // SCT_IDENTIFY_HPP
