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

// Acceptance suite: ten numbered criteria covering the forward model, the
// closed-form cross-checks, identifiability, gauge handling, inversion and
// noise behavior. Each criterion returns a pass flag plus detail lines.

#ifndef SCT_VALIDATE_HPP
#define SCT_VALIDATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sct/forward.hpp"
#include "sct/identify.hpp"
#include "sct/invert.hpp"
#include "sct/protocol.hpp"
#include "sct/sampling.hpp"

namespace sct::validation {

inline constexpr int kNumCriteria = 10;

struct SuiteOptions {
    bool full = true;         // full draw counts; quick scales them down
    std::uint64_t seed = 20240601;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    bool skipped = false;
    std::vector<std::string> details;
};

namespace detail {

inline std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

inline int draws(const SuiteOptions &o, int full, int quick) { return o.full ? full : quick; }

/// Maximum parameter error between two points over the protocol unknowns;
/// phases compared modulo 2 pi.
inline double point_error(const Protocol &p, const ParamPoint &a, const ParamPoint &b) {
    const Eigen::VectorXd xa = pack(p, a), xb = pack(p, b);
    double e = 0.0;
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double d = p.unknowns[k].kind == ParamKind::phase ? phase_distance(xa(i), xb(i)) : std::abs(xa(i) - xb(i));
        e = std::max(e, d);
    }
    return e;
}

/// Random truth for `p`, rejected until the Jacobian inverse condition
/// number exceeds `min_inverse_condition`. Coherences are at least 0.05 and
/// lambdas lie in [0.5, 2.5].
inline ParamPoint generic_truth(const Protocol &p, std::mt19937_64 &rng, double min_inverse_condition = 1e-4) {
    for (;;) {
        ParamPoint pt;
        pt.state = p.dim == 2 ? random_qubit_state(rng, 1.0, 0.1, 0.95) : random_qutrit_state(rng, 1.0, 0.05);
        pt.process.dim = p.dim;
        for (int k = 0; k < 2; ++k) {
            if (p.has_unknown({ParamKind::lambda, k})) pt.process.lambda[k] = uniform(rng, 0.5, 2.5);
        }
        const JacobianReport j = numeric_jacobian(p, pt);
        if (1.0 / j.condition_number >= min_inverse_condition) return pt;
    }
}

inline std::vector<CountRecord> exact_counts(const Protocol &p, const ParamPoint &pt) {
    return simulate_counts(pt.state, pt.process, p, {});
}

/// Determinants implied by the numeric Jacobian under this library's
/// parametrization. Reference forms differ by sin g - cos g versus sin g + cos g
/// and, for J3, by the placement of lambda1 and lambda2.
inline double mirrored_pair(double rho, double lambda, double gamma) {
    return 64.0 * rho * rho * std::pow(std::sin(lambda / 2.0), 6) * std::pow(std::cos(lambda / 2.0), 4) *
           (std::sin(gamma) + std::cos(gamma));
}

inline double mirrored_j2(double rho, double lambda, double gamma) {
    return 2.0 * std::pow(std::sin(lambda), 4) * std::cos(lambda) * rho * rho * (std::sin(gamma) + std::cos(gamma));
}

inline double mirrored_j3(double l1, double l2, double rho) {
    const double omega = std::hypot(l1, l2);
    const double bracket = l1 * l1 * std::cos(omega / 2.0) + l2 * l2;
    return 16.0 * std::pow(std::sin(omega / 4.0), 4) * l1 * l1 * l2 * l2 * bracket * bracket * rho / std::pow(omega, 8);
}

/// Zero pattern of the V-type Jacobian in block column order, derived from
/// which matrix elements each rotated projector can reach: the unrotated
/// projector sees rho11 only; the |0>-|1> rotations see block 1; the
/// |0>-|2> rotations see rho00 and block 2; the two-field rotations see all.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> expected_v_mask() {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> zero(11, 11);
    zero.setConstant(true);
    zero(0, 1) = false;
    for (int r = 1; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) zero(r, c) = false;
    }
    for (int r = 5; r < 9; ++r) {
        zero(r, 0) = false;
        for (int c = 5; c < 9; ++c) zero(r, c) = false;
    }
    for (int r = 9; r < 11; ++r) {
        for (int c = 0; c < 11; ++c) zero(r, c) = false;
    }
    return zero;
}

inline Eigen::MatrixXd block_ordered(const Protocol &p, const Eigen::MatrixXd &m) {
    const auto order = block_column_order(p);
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t k = 0; k < order.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(order[k]);
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult completeness(const SuiteOptions &o) {
    CriterionResult r{1, "statistics over all labels sum to the trace", true, false, {}};
    const int n = detail::draws(o, 1000, 200);
    for (int dim : {2, 3}) {
        auto rng = make_stream(o.seed, 100 + static_cast<std::uint64_t>(dim));
        double worst = 0.0;
        for (int d = 0; d < n; ++d) {
            const double scale = uniform(rng, 0.5, 2.0);
            const DensityParams s = random_state(rng, dim, scale);
            const GeneratorParams g = random_generator(rng, dim, 3.0 * std::numbers::pi);
            double total = 0.0;
            for (int j = 0; j < dim; ++j) total += probability(s, g, j);
            worst = std::max(worst, std::abs(total - s.scale()));
        }
        r.passed = r.passed && worst <= 1e-12;
        r.details.push_back("dim " + std::to_string(dim) + ": " + std::to_string(n) + " draws, max |sum - N| = " +
                            detail::sci(worst));
    }
    return r;
}

/// Writes the convention resolution of both dimensions to `report`.
inline CriterionResult closed_forms(const SuiteOptions &o, std::ostream *report = nullptr) {
    CriterionResult r{2, "closed-form coefficients reproduce the direct trace", true, false, {}};
    const int n = detail::draws(o, 1000, 200);
    if (report) {
        *report << "Closed-form coefficient conventions\n";
        *report << "Direct statistic: n^j = Re tr(rho' U^dag |j><j| U), U = exp(-i G).\n";
        *report << "Candidates: beta -> beta_sign * beta; square roots read as principal values or as products\n"
                   "of the signed rotation amplitudes. A draw disagrees when |closed form - direct| > 1e-10.\n\n";
    }
    for (int dim : {2, 3}) {
        const ConventionReport rep = resolve_convention(dim, n, o.seed);
        const auto best = std::find_if(rep.candidates.begin(), rep.candidates.end(),
                                       [&](const ConventionScore &s) { return s.convention == rep.resolved; });
        const bool ok = best->disagreement == 0.0 && best->max_abs_error <= 1e-10;
        r.passed = r.passed && ok;
        r.details.push_back("dim " + std::to_string(dim) + ": resolved " + to_string(rep.resolved) +
                            ", max error " + detail::sci(best->max_abs_error) + " over " + std::to_string(n) +
                            " draws");
        if (report) {
            *report << "dim " << dim << " (" << n << " draws, seed " << o.seed << ")\n";
            for (const auto &s : rep.candidates) {
                *report << "  " << to_string(s.convention) << "  disagreement " << detail::fmt("%.4f", s.disagreement)
                        << "  max_abs_error " << detail::sci(s.max_abs_error)
                        << (s.convention == rep.resolved ? "  <- resolved" : "") << "\n";
            }
        }
    }
    if (report) {
        *report << "\nThe two dimensions resolve to different readings; each dimension uses its own resolved\n"
                   "convention. The direct trace remains the authoritative forward model.\n";
    }
    return r;
}

inline CriterionResult jacobian_formulas(const SuiteOptions &o) {
    CriterionResult r{3, "numeric Jacobian determinants match the reference formulas", true, false, {}};
    const int n = detail::draws(o, 200, 50);
    auto rng = make_stream(o.seed, 300);

    // J_A = rho01.
    {
        const Protocol a = scenario("A");
        double worst = 0.0;
        for (int d = 0; d < n; ++d) {
            ParamPoint pt{random_qubit_state(rng), UnknownParams::qubit(std::nullopt)};
            worst = std::max(worst, std::abs(numeric_jacobian(a, pt).abs_det - pt.state.coherence[0]));
        }
        const bool ok = worst <= 1e-6;
        r.passed = r.passed && ok;
        r.details.push_back(std::string(ok ? "pass" : "FAIL") + " |J_A| vs rho01: max abs error " + detail::sci(worst));
    }
    // J_B.
    const Protocol b = scenario("B");
    {
        double worst = 0.0, worst_mirror = 0.0;
        for (int d = 0; d < n; ++d) {
            const ParamPoint pt = detail::generic_truth(b, rng);
            const double num = numeric_jacobian(b, pt).abs_det;
            const SymbolTable t = symbols_of(pt);
            const double reference = std::abs(closed_form_jacobian(ClosedForm::B, t));
            worst = std::max(worst, std::abs(num - reference) / num);
            const double mirror = std::abs(detail::mirrored_pair(pt.state.coherence[0], *pt.process.lambda[0],
                                                                 pt.state.phase[0]));
            worst_mirror = std::max(worst_mirror, std::abs(num - mirror) / num);
        }
        const bool ok = worst <= 1e-4;
        r.passed = r.passed && ok;
        r.details.push_back(std::string(ok ? "pass" : "FAIL") + " |J_B| reference form: max rel error " +
                            detail::sci(worst) + " at " + std::to_string(n) + " points");
        r.details.push_back("diagnostic: |J_B| with (sin g + cos g) in place of (sin g - cos g): max rel error " +
                            detail::sci(worst_mirror));
    }
    // J1 J2 J3 against the 11 x 11 determinant.
    {
        const Protocol v = scenario("V");
        const int nv = detail::draws(o, 50, 10);
        double worst = 0.0, worst_mirror = 0.0;
        for (int d = 0; d < nv; ++d) {
            const ParamPoint pt = detail::generic_truth(v, rng);
            const double num = numeric_jacobian(v, pt).abs_det;
            const double reference = std::abs(closed_form_jacobian(ClosedForm::Vtotal, symbols_of(pt)));
            worst = std::max(worst, std::abs(num - reference) / num);
            const auto &s = pt.state;
            const double l1 = *pt.process.lambda[0], l2 = *pt.process.lambda[1];
            const double mirror = std::abs(detail::mirrored_pair(s.coherence[0], l1, s.phase[0]) *
                                           detail::mirrored_j2(s.coherence[1], l2, s.phase[1]) *
                                           detail::mirrored_j3(l1, l2, s.coherence[2]));
            worst_mirror = std::max(worst_mirror, std::abs(num - mirror) / num);
        }
        const bool ok = worst <= 1e-3;
        r.passed = r.passed && ok;
        r.details.push_back(std::string(ok ? "pass" : "FAIL") + " |J1 J2 J3| reference forms vs 11x11 determinant: "
                                                                "max rel error " +
                            detail::sci(worst) + " at " + std::to_string(nv) + " points");
        r.details.push_back("diagnostic: blocks with (sin + cos) phase factors and J3 bracket (l1^2 cos(W/2) + "
                            "l2^2): max rel error " +
                            detail::sci(worst_mirror));
    }
    // Zero loci of J_B.
    {
        const ParamPoint base{DensityParams::qubit(0.55, 0.45, 0.25, 0.3), UnknownParams::qubit(1.3)};
        const double generic = numeric_jacobian(b, base).abs_det;
        auto det_with = [&](ParamId id, double value) {
            ParamPoint pt = base;
            set_param(pt, id, value);
            return numeric_jacobian(b, pt).abs_det;
        };
        const ParamId rho01{ParamKind::coherence, 0}, lam{ParamKind::lambda, 0}, gam{ParamKind::phase, 0};
        const double pi = std::numbers::pi;
        struct Locus {
            std::string name;
            double det;
            bool expect_zero;
        };
        const std::vector<Locus> loci{
            {"rho01 = 0", det_with(rho01, 0.0), true},
            {"lambda_c = 0", det_with(lam, 0.0), true},
            {"lambda_c = pi (zero of the reference |J_B|)", det_with(lam, pi), true},
            {"gamma = pi/4", det_with(gam, pi / 4.0), true},
        };
        for (const auto &l : loci) {
            const bool zero = l.det <= 1e-8 * generic;
            const bool ok = zero == l.expect_zero;
            r.passed = r.passed && ok;
            r.details.push_back(std::string(ok ? "pass" : "FAIL") + " zero locus " + l.name + ": |det| = " +
                                detail::sci(l.det) + " (generic " + detail::sci(generic) + ")");
        }
        r.details.push_back("report: listed locus lambda_c = pi/2 gives |det| = " + detail::sci(det_with(lam, pi / 2.0)) +
                            " (not a zero); the reference |J_B| vanishes at lambda_c = pi instead");
        r.details.push_back("report: numeric phase zeros at gamma = 3pi/4: |det| = " +
                            detail::sci(det_with(gam, 0.75 * pi)) + ", gamma = 7pi/4: |det| = " +
                            detail::sci(det_with(gam, 1.75 * pi)));
    }
    return r;
}

inline CriterionResult v_structure(const SuiteOptions &o) {
    CriterionResult r{4, "V-type Jacobian zero pattern is block triangular", true, false, {}};
    const Protocol v = scenario("V");
    const auto expected = detail::expected_v_mask();
    auto rng = make_stream(o.seed, 400);
    const int n = detail::draws(o, 50, 10);
    int mismatches = 0;
    double largest_masked = 0.0, smallest_kept = std::numeric_limits<double>::infinity();
    for (int d = 0; d < n; ++d) {
        const ParamPoint pt = detail::generic_truth(v, rng, 1e-6);
        const Eigen::MatrixXd m = detail::block_ordered(v, numeric_jacobian(v, pt).matrix);
        const auto mask = near_zero_mask(m, 1e-10);
        if (mask != expected) ++mismatches;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (expected(i, j)) {
                    largest_masked = std::max(largest_masked, std::abs(m(i, j)));
                } else {
                    smallest_kept = std::min(smallest_kept, std::abs(m(i, j)));
                }
            }
        }
    }
    r.passed = mismatches == 0;
    r.details.push_back(std::to_string(n - mismatches) + "/" + std::to_string(n) +
                        " points match the 5/4/2 block pattern; largest expected-zero entry " +
                        detail::sci(largest_masked) + ", smallest expected-nonzero entry " + detail::sci(smallest_kept));
    return r;
}

/// Scenario B with the control reference phase as an uncalibrated offset.
inline Protocol uncalibrated(Protocol p) {
    p.name += "-uncalibrated";
    p.phase_known = false;
    return p;
}

inline CriterionResult gauge(const SuiteOptions &o) {
    CriterionResult r{5, "gauge invariance and gauge fixing", true, false, {}};
    const int n = detail::draws(o, 1000, 200);
    auto rng = make_stream(o.seed, 500);
    double worst_stat = 0.0;
    bool idempotent = true;
    for (int d = 0; d < n; ++d) {
        const int dim = d % 2 == 0 ? 2 : 3;
        const DensityParams s = random_state(rng, dim);
        const GeneratorParams g = random_generator(rng, dim, 3.0 * std::numbers::pi);
        const std::array<double, 2> eta{uniform(rng, 0.0, kTwoPi), uniform(rng, 0.0, kTwoPi)};
        const GaugePair t = gauge_transform(s, g, eta);
        for (int j = 0; j < dim; ++j) {
            worst_stat = std::max(worst_stat, std::abs(probability(s, g, j) - probability(t.state, t.generator, j)));
        }
        const GaugePair f1 = gauge_fix(s, g);
        const GaugePair f2 = gauge_fix(f1.state, f1.generator);
        const GaugePair f3 = gauge_fix(t.state, t.generator);
        for (int k = 0; k < num_pairs(dim); ++k) {
            idempotent = idempotent && phase_distance(f1.state.phase[k], f2.state.phase[k]) <= 1e-12 &&
                         phase_distance(f1.state.phase[k], f3.state.phase[k]) <= 1e-12;
        }
    }
    const bool stats_ok = worst_stat <= 1e-12;
    r.details.push_back(std::string(stats_ok ? "pass" : "FAIL") + " statistics under V(eta): max change " +
                        detail::sci(worst_stat) + " over " + std::to_string(n) + " draws");
    r.details.push_back(std::string(idempotent ? "pass" : "FAIL") +
                        " gauge_fix idempotent and constant on gauge orbits");

    // Gauge-related truths under uncalibrated control phases.
    double worst_pair = 0.0, worst_truth = 0.0;
    const int m = detail::draws(o, 10, 3);
    for (const char *name : {"B", "V"}) {
        const Protocol p = uncalibrated(scenario(name));
        for (int d = 0; d < m; ++d) {
            const ParamPoint truth = detail::generic_truth(scenario(name), rng);
            const std::array<double, 2> eta{uniform(rng, 0.0, kTwoPi), p.dim == 3 ? uniform(rng, 0.0, kTwoPi) : 0.0};
            const GeneratorParams offsets =
                p.dim == 2 ? GeneratorParams::qubit(0.0, 0.0, 0.0) : GeneratorParams::qutrit(0.0, 0.0, 0.0, 0.0);
            ParamPoint moved = truth;
            moved.state = gauge_transform(truth.state, offsets, eta).state;
            moved.process.phase_offset = eta;
            const ReconstructionResult ra = reconstruct(detail::exact_counts(p, truth), p);
            const ReconstructionResult rb = reconstruct(detail::exact_counts(p, moved), p);
            const Protocol fit = scenario(name);
            worst_pair = std::max(worst_pair, detail::point_error(fit, {ra.state, ra.unknowns}, {rb.state, rb.unknowns}));
            worst_truth = std::max(worst_truth, detail::point_error(fit, {ra.state, ra.unknowns}, truth));
        }
    }
    const bool pair_ok = worst_pair <= 1e-6 && worst_truth <= 1e-6;
    r.details.push_back(std::string(pair_ok ? "pass" : "FAIL") +
                        " reconstruct on gauge-related truths (B, V): max difference " + detail::sci(worst_pair) +
                        ", max distance to the gauge-fixed truth " + detail::sci(worst_truth));
    r.passed = stats_ok && idempotent && pair_ok;
    return r;
}

inline CriterionResult noiseless_identifiability(const SuiteOptions &o) {
    CriterionResult r{6, "noiseless round trip recovers every unknown", true, false, {}};
    const int n = detail::draws(o, 100, 10);
    auto rng = make_stream(o.seed, 600);
    for (const char *name : {"A", "B", "V"}) {
        const Protocol p = scenario(name);
        double worst = 0.0, worst_block = 0.0;
        int unconverged = 0;
        for (int d = 0; d < n; ++d) {
            const ParamPoint truth = detail::generic_truth(p, rng);
            const auto counts = detail::exact_counts(p, truth);
            const ReconstructionResult res = reconstruct(counts, p);
            if (!res.converged) ++unconverged;
            worst = std::max(worst, detail::point_error(p, truth, {res.state, res.unknowns}));
            if (p.dim == 3) {
                const ReconstructionResult blk = block_solve_v(counts, p);
                worst_block = std::max(worst_block,
                                       detail::point_error(p, {res.state, res.unknowns}, {blk.state, blk.unknowns}));
            }
        }
        const bool ok = worst < 1e-5 && unconverged == 0 && worst_block <= 1e-6;
        r.passed = r.passed && ok;
        std::string line = std::string(ok ? "pass" : "FAIL") + " scenario " + name + ": " + std::to_string(n) +
                           " truths, max error " + detail::sci(worst) + ", unconverged " + std::to_string(unconverged);
        if (p.dim == 3) line += ", block vs joint " + detail::sci(worst_block);
        r.details.push_back(line);
    }
    return r;
}

inline CriterionResult oracle_equivalence(const SuiteOptions &o) {
    CriterionResult r{7, "grid oracle plus polish reaches the multi-start minimum", true, false, {}};
    const int n = detail::draws(o, 25, 5);
    const Protocol b = scenario("B");
    auto rng = make_stream(o.seed, 700);
    double worst_obj = 0.0, worst_oracle = 0.0;
    for (int d = 0; d < n; ++d) {
        const ParamPoint truth = detail::generic_truth(b, rng);
        const auto counts = detail::exact_counts(b, truth);
        const GridOracleResult g = grid_oracle(counts, b, 15, 4);
        worst_oracle = std::max(worst_oracle, detail::point_error(b, truth, g.point));
        const ReconstructionResult polished = polish(counts, b, g.point);
        const ReconstructionResult multi = reconstruct(counts, b);
        worst_obj = std::max(worst_obj, std::abs(polished.residual - multi.residual));
    }
    r.passed = worst_obj < 1e-10;
    r.details.push_back(std::to_string(n) + " instances: max objective difference " + detail::sci(worst_obj) +
                        ", max oracle distance to truth before polish " + detail::sci(worst_oracle));
    return r;
}

inline CriterionResult noise_behavior(const SuiteOptions &o) {
    CriterionResult r{8, "Poisson noise: fidelity and shot scaling", true, false, {}};
    if (!o.full) {
        r.skipped = true;
        r.details.push_back("skipped in the quick suite");
        return r;
    }
    const Protocol b = scenario("B");
    auto rng = make_stream(o.seed, 800);
    std::vector<double> fid_hi, err_hi, err_lo;
    int physical = 0;
    const int n = 50;
    for (int d = 0; d < n; ++d) {
        const ParamPoint truth = detail::generic_truth(b, rng);
        const CMatrix target = assemble_state(truth.state) / truth.state.scale();
        for (std::uint64_t shots : {std::uint64_t{10000}, std::uint64_t{1000000}}) {
            const NoiseModel noise{NoiseKind::poisson, shots, 0.0, o.seed + 1000 * static_cast<std::uint64_t>(d) + shots};
            const ReconstructionResult res = reconstruct(simulate_counts(truth.state, truth.process, b, noise), b);
            CMatrix est = sct::detail::hermitian_from(res.state);
            est /= est.trace().real();
            const double f = fidelity(target, est);
            if (shots == 1000000) {
                fid_hi.push_back(f);
                err_hi.push_back(1.0 - f);
                if (res.min_eigenvalue >= -0.02) ++physical;
            } else {
                err_lo.push_back(1.0 - f);
            }
        }
    }
    const double med_fid = detail::median(fid_hi);
    const double ratio = detail::median(err_lo) / std::max(detail::median(err_hi), 1e-300);
    r.passed = med_fid >= 0.99 && ratio >= 5.0;
    r.details.push_back("median fidelity at S=1e6: " + detail::fmt("%.6f", med_fid));
    r.details.push_back("median infidelity S=1e4 / S=1e6: " + detail::fmt("%.1f", ratio));
    r.details.push_back("estimates with min eigenvalue >= -0.02 at S=1e6: " + std::to_string(physical) + "/" +
                        std::to_string(n));
    return r;
}

inline CriterionResult scenario_c(const SuiteOptions &o) {
    CriterionResult r{9, "scenario C structural check", true, false, {}};
    const Protocol c = scenario("C");
    const StructuralCheck sc = structural_check(c);
    const ParamPoint probe{DensityParams::qubit(0.55, 0.45, 0.25, 0.3), UnknownParams::qubit(1.3, 0.8)};
    const JacobianReport jc = numeric_jacobian(c, probe);
    const double lz_column = jc.matrix.col(5).cwiseAbs().maxCoeff();
    if (!sc.singular) {
        r.details.push_back("C is nonsingular: best inverse condition " + detail::sci(sc.best_inverse_condition));
        return r;
    }
    r.details.push_back("C is structurally singular: best inverse condition " +
                        detail::sci(sc.best_inverse_condition) + ", max |dn/dlambda_z| = " + detail::sci(lz_column));
    const Protocol alt = scenario("C-alt");
    const StructuralCheck sa = structural_check(alt);
    auto rng = make_stream(o.seed, 900);
    const int n = detail::draws(o, 20, 5);
    double worst = 0.0;
    for (int d = 0; d < n; ++d) {
        const ParamPoint truth = detail::generic_truth(alt, rng);
        const ReconstructionResult res = reconstruct(detail::exact_counts(alt, truth), alt);
        worst = std::max(worst, detail::point_error(alt, truth, {res.state, res.unknowns}));
    }
    r.passed = !sa.singular && worst < 1e-5;
    r.details.push_back(std::string(r.passed ? "pass" : "FAIL") + " C-alt: inverse condition " +
                        detail::sci(sa.best_inverse_condition) + ", round trip max error " + detail::sci(worst) +
                        " over " + std::to_string(n) + " truths");
    return r;
}

inline CriterionResult v_spectrum(const SuiteOptions &o) {
    CriterionResult r{10, "V-type generator spectrum is {-W/2, 0, W/2}", true, false, {}};
    const int n = detail::draws(o, 500, 100);
    auto rng = make_stream(o.seed, 1000);
    double worst = 0.0;
    for (int d = 0; d < n; ++d) {
        const GeneratorParams g = random_generator(rng, 3, 3.0 * std::numbers::pi);
        const RVector ev = eigenvalues(assemble_generator(g));
        const double w = g.omega();
        worst = std::max({worst, std::abs(ev(0) + w / 2.0), std::abs(ev(1)), std::abs(ev(2) - w / 2.0)});
    }
    r.passed = worst <= 1e-12;
    r.details.push_back(std::to_string(n) + " draws, max eigenvalue error " + detail::sci(worst));
    return r;
}

/// Runs criterion `id` (1-based).
inline CriterionResult run_criterion(int id, const SuiteOptions &o, std::ostream *conventions = nullptr) {
    switch (id) {
        case 1: return completeness(o);
        case 2: return closed_forms(o, conventions);
        case 3: return jacobian_formulas(o);
        case 4: return v_structure(o);
        case 5: return gauge(o);
        case 6: return noiseless_identifiability(o);
        case 7: return oracle_equivalence(o);
        case 8: return noise_behavior(o);
        case 9: return scenario_c(o);
        case 10: return v_spectrum(o);
        default: throw Error(Errc::invalid_range, "no criterion " + std::to_string(id));
    }
}

inline void print(std::ostream &os, const CriterionResult &r) {
    os << "criterion " << r.id << ": " << (r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL") << " " << r.title << "\n";
    for (const auto &d : r.details) os << "  " << d << "\n";
}

}  // namespace sct::validation

#endif  // SCT_VALIDATE_HPP
