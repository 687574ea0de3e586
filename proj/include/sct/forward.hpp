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

// Forward measurement model. The statistic of setting (G, j) is
//
//   n^j = tr(rho' U^dag |j><j| U),   U = exp(-i G),
//
// i.e. the state is rotated and then projected on |j>. This direct trace is
// the only path used for estimation; the closed-form coefficient families
// below are kept as an independent cross-check.

#ifndef SCT_FORWARD_HPP
#define SCT_FORWARD_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sct/error.hpp"
#include "sct/model.hpp"
#include "sct/protocol.hpp"
#include "sct/sampling.hpp"
#include "sct/smallmat.hpp"

namespace sct {

inline CMatrix unitary(const GeneratorParams &gen) { return expi_neg(assemble_generator(gen)); }

inline CMatrix evolve(const CMatrix &rho, const GeneratorParams &gen) {
    if (rho.rows() != gen.dim || rho.cols() != gen.dim) {
        throw Error(Errc::dimension_mismatch, "state and generator dimensions differ");
    }
    const CMatrix u = unitary(gen);
    return u * rho * u.adjoint();
}

/// Rotated projector U^dag |j><j| U, so that n^j = Re tr(rho' P).
inline CMatrix measurement_operator(const GeneratorParams &gen, int label) {
    if (label < 0 || label >= gen.dim) throw Error(Errc::bad_label, "label " + std::to_string(label));
    const CMatrix u = unitary(gen);
    return u.row(label).adjoint() * u.row(label);
}

/// Statistic of a Hermitian matrix against a precomputed measurement operator.
inline double expectation(const CMatrix &rho, const CMatrix &op) { return trace_product(rho, op).real(); }

/// Exact statistic n^label. Magnitudes and couplings are not range-checked
/// here so that finite differences may step across zero.
inline double probability(const DensityParams &state, const GeneratorParams &gen, int label) {
    check_dim(state.dim);
    if (state.dim != gen.dim) throw Error(Errc::dimension_mismatch, "state and generator dimensions differ");
    if (label < 0 || label >= state.dim) throw Error(Errc::bad_label, "label " + std::to_string(label));
    if (gen.omega() == 0.0) return state.population[label];
    check_dim(gen.dim);
    const CMatrix rho = detail::hermitian_from(state);
    const CMatrix u = expi_neg(detail::generator_from(gen));
    // sum_kl U_jk rho_kl conj(U_jl)
    const Complex value = (u.row(label) * rho * u.row(label).adjoint())(0, 0);
    return value.real();
}

// ---------------------------------------------------------------------------
// Closed-form coefficient families.

enum class RootBranch {
    principal,         // sqrt(f_ii f_jj) >= 0
    signed_amplitude,  // product of the signed rotation amplitudes
};

/// How the reference closed forms are read: `beta_sign` replaces every beta by
/// beta_sign * beta and `root` picks the branch of the square roots.
struct Convention {
    int beta_sign = 1;
    RootBranch root = RootBranch::signed_amplitude;

    bool operator==(const Convention &) const = default;
};

inline std::string to_string(const Convention &c) {
    return std::string("beta_sign=") + (c.beta_sign > 0 ? "+1" : "-1") +
           " root=" + (c.root == RootBranch::principal ? "principal" : "signed_amplitude");
}

/// Coefficients c_ij (i <= j) of n^label = sum_{i<=j} c_ij rho_ij, where
/// rho_ij are populations (i == j) and coherence magnitudes (i < j).
struct CoefficientSet {
    int dim = 2;
    int label = 0;
    std::array<double, 3> diagonal{};
    std::array<double, 3> off_diagonal{};  // by pair_index
    bool degenerate = false;               // Omega == 0: identity-limit values

    double at(int i, int j) const {
        if (i > j) std::swap(i, j);
        return i == j ? diagonal[i] : off_diagonal[pair_index(i, j)];
    }
};

namespace detail {

inline double root(RootBranch branch, double signed_amplitude) {
    return branch == RootBranch::principal ? std::abs(signed_amplitude) : signed_amplitude;
}

}  // namespace detail

/// Evaluates the reference closed forms. Qubit: label 0 is the f family, label 1
/// the g family. Qutrit: label 1 is the f family and label 2 the g family;
/// label 0 is the ground-state family built from the same amplitudes
/// (c, s h1/Omega, s h2/Omega), which is not part of the reference set.
inline CoefficientSet coefficients(const GeneratorParams &gen, const DerivedAngles &a, int label,
                                   const Convention &conv) {
    if (label < 0 || label >= gen.dim) throw Error(Errc::bad_label, "label " + std::to_string(label));
    CoefficientSet out;
    out.dim = gen.dim;
    out.label = label;
    if (gen.omega() == 0.0) {
        out.degenerate = true;
        out.diagonal[label] = 1.0;
        return out;
    }
    const double c = a.c, s = a.s;
    const double sb = conv.beta_sign;
    auto r = [&](double amplitude) { return detail::root(conv.root, amplitude); };

    if (gen.dim == 2) {
        const double hz = a.h_z_unit, hc = a.h_unit[0];
        const double b = sb * a.beta[0];
        const double core = 2.0 * (c * std::sin(b) + s * std::cos(b) * hz) * r(s * hc);
        const double pole = c * c + s * s * hz * hz;
        const double flip = s * s * hc * hc;
        if (label == 0) {
            out.diagonal = {pole, flip, 0.0};
            out.off_diagonal[0] = core;
        } else {
            out.diagonal = {flip, pole, 0.0};
            out.off_diagonal[0] = -core;
        }
        return out;
    }

    const double h1 = a.h_unit[0], h2 = a.h_unit[1];
    const double b01 = sb * a.beta[0], b02 = sb * a.beta[1], b12 = sb * a.beta[2];
    // Signed amplitudes of U^dag |label> on |0>, |1>, |2> (phases stripped).
    std::array<double, 3> amp{};
    double sin_sign = 1.0;
    switch (label) {
        case 1: amp = {s * h1, h1 * h1 * c + h2 * h2, h1 * h2 * (c - 1.0)}; break;
        case 2: amp = {s * h2, h1 * h2 * (c - 1.0), h1 * h1 + h2 * h2 * c}; break;
        default:
            amp = {c, s * h1, s * h2};
            sin_sign = -1.0;
            break;
    }
    for (int i = 0; i < 3; ++i) out.diagonal[i] = amp[i] * amp[i];
    out.off_diagonal[0] = sin_sign * 2.0 * std::sin(b01) * r(amp[0]) * r(amp[1]);
    out.off_diagonal[1] = sin_sign * 2.0 * std::sin(b02) * r(amp[0]) * r(amp[2]);
    out.off_diagonal[2] = 2.0 * std::cos(b12) * r(amp[1]) * r(amp[2]);
    return out;
}

inline CoefficientSet coefficients(const GeneratorParams &gen, const DensityParams &state, int label,
                                   const Convention &conv) {
    return coefficients(gen, DerivedAngles::of(state, gen), label, conv);
}

/// sum_{i<=j} c_ij rho_ij.
inline double contract(const CoefficientSet &coeffs, const DensityParams &state) {
    double n = 0.0;
    for (int i = 0; i < state.dim; ++i) n += coeffs.diagonal[i] * state.population[i];
    for (int k = 0; k < num_pairs(state.dim); ++k) n += coeffs.off_diagonal[k] * state.coherence[k];
    return n;
}

/// Labels with reference coefficient families.
inline std::vector<int> reference_labels(int dim) { return dim == 2 ? std::vector<int>{0, 1} : std::vector<int>{1, 2}; }

struct ConventionScore {
    Convention convention;
    double max_abs_error = 0.0;
    double disagreement = 0.0;  // fraction of draws off by more than 1e-10
};

struct ConventionReport {
    int dim = 2;
    int draws = 0;
    Convention resolved;
    std::vector<ConventionScore> candidates;
};

inline std::vector<Convention> candidate_conventions() {
    return {{+1, RootBranch::principal},
            {-1, RootBranch::principal},
            {+1, RootBranch::signed_amplitude},
            {-1, RootBranch::signed_amplitude}};
}

/// Scores every candidate reading of the reference families against the direct
/// trace over random (state, generator, label) draws and picks the one with
/// the least disagreement (ties: smaller max error, then candidate order).
/// Couplings range up to 3 pi so that c, s and the qutrit amplitudes take
/// both signs.
inline ConventionReport resolve_convention(int dim, int draws, std::uint64_t seed) {
    check_dim(dim);
    ConventionReport report;
    report.dim = dim;
    report.draws = draws;
    const auto candidates = candidate_conventions();
    for (const Convention &conv : candidates) report.candidates.push_back({conv, 0.0, 0.0});
    auto rng = make_stream(seed, static_cast<std::uint64_t>(dim));
    const auto labels = reference_labels(dim);
    for (int d = 0; d < draws; ++d) {
        const DensityParams state = random_state(rng, dim);
        const GeneratorParams gen = random_generator(rng, dim, 3.0 * std::numbers::pi);
        const int label = labels[static_cast<std::size_t>(d) % labels.size()];
        const double direct = probability(state, gen, label);
        for (ConventionScore &score : report.candidates) {
            const double err = std::abs(contract(coefficients(gen, state, label, score.convention), state) - direct);
            score.max_abs_error = std::max(score.max_abs_error, err);
            if (err > 1e-10) score.disagreement += 1.0;
        }
    }
    for (ConventionScore &score : report.candidates) score.disagreement /= std::max(draws, 1);
    const auto best = std::min_element(report.candidates.begin(), report.candidates.end(),
                                       [](const ConventionScore &a, const ConventionScore &b) {
                                           if (a.disagreement != b.disagreement) return a.disagreement < b.disagreement;
                                           return a.max_abs_error < b.max_abs_error;
                                       });
    report.resolved = best->convention;
    return report;
}

// ---------------------------------------------------------------------------
// Count simulation.

enum class NoiseKind { exact, poisson, gaussian };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::exact: return "exact";
        case NoiseKind::poisson: return "poisson";
        case NoiseKind::gaussian: return "gaussian";
    }
    return "?";
}

inline NoiseKind parse_noise_kind(std::string_view s) {
    if (s == "exact") return NoiseKind::exact;
    if (s == "poisson") return NoiseKind::poisson;
    if (s == "gaussian") return NoiseKind::gaussian;
    throw Error(Errc::schema_error, "noise.kind must be exact, poisson or gaussian");
}

/// Poisson: counts ~ Poisson(S n / N), reported as counts * N / S.
/// Gaussian: n + N sigma z, truncated at 0.
struct NoiseModel {
    NoiseKind kind = NoiseKind::exact;
    std::uint64_t shots = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const NoiseModel &) const = default;
};

struct CountRecord {
    int setting_index = 0;
    double value = 0.0;
    std::uint64_t shots = 0;
    NoiseKind noise = NoiseKind::exact;

    bool operator==(const CountRecord &) const = default;
};

/// Exact statistics of every setting of `protocol` at `pt`.
inline Eigen::VectorXd predict(const Protocol &protocol, const ParamPoint &pt) {
    if (pt.state.dim != protocol.dim || pt.process.dim != protocol.dim) {
        throw Error(Errc::dimension_mismatch, "point dimension does not match protocol '" + protocol.name + "'");
    }
    const UnknownParams process = protocol.complete(pt.process);
    Eigen::VectorXd out(static_cast<Eigen::Index>(protocol.settings.size()));
    for (std::size_t k = 0; k < protocol.settings.size(); ++k) {
        const auto &setting = protocol.settings[k];
        out(static_cast<Eigen::Index>(k)) = probability(pt.state, resolve(setting, process), setting.label);
    }
    return out;
}

/// Draws one record from the exact statistic `n` of a state with trace `scale`.
inline double sample_statistic(double n, double scale, const NoiseModel &noise, std::mt19937_64 &rng) {
    switch (noise.kind) {
        case NoiseKind::exact: return n;
        case NoiseKind::poisson: {
            if (noise.shots == 0) throw Error(Errc::invalid_range, "poisson noise needs shots > 0");
            const double shots = static_cast<double>(noise.shots);
            const double mean = std::max(0.0, shots * n / scale);
            if (mean == 0.0) return 0.0;
            const auto k = std::poisson_distribution<std::int64_t>(mean)(rng);
            return static_cast<double>(k) * scale / shots;
        }
        case NoiseKind::gaussian: {
            const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
            return std::max(0.0, n + noise.sigma * scale * z);
        }
    }
    return n;
}

/// One record per setting; record k draws from stream (seed, k), so the
/// output does not depend on evaluation order.
inline std::vector<CountRecord> simulate_counts(const DensityParams &truth_state, const UnknownParams &truth_unknowns,
                                                const Protocol &protocol, const NoiseModel &noise) {
    validate(protocol);
    if (truth_state.dim != protocol.dim || truth_unknowns.dim != protocol.dim) {
        throw Error(Errc::dimension_mismatch, "truth dimension does not match protocol '" + protocol.name + "'");
    }
    if (protocol.phase_known && (truth_unknowns.phase_offset[0] != 0.0 || truth_unknowns.phase_offset[1] != 0.0)) {
        throw Error(Errc::invalid_range, "protocol '" + protocol.name + "' declares calibrated control phases");
    }
    const Eigen::VectorXd exact = predict(protocol, {truth_state, truth_unknowns});
    const double scale = truth_state.scale();
    std::vector<CountRecord> records;
    records.reserve(protocol.settings.size());
    for (std::size_t k = 0; k < protocol.settings.size(); ++k) {
        auto rng = make_stream(noise.seed, k);
        CountRecord rec;
        rec.setting_index = static_cast<int>(k);
        rec.value = sample_statistic(exact(static_cast<Eigen::Index>(k)), scale, noise, rng);
        rec.shots = noise.kind == NoiseKind::exact ? 0 : noise.shots;
        rec.noise = noise.kind;
        records.push_back(rec);
    }
    return records;
}

inline Eigen::VectorXd record_values(const std::vector<CountRecord> &records) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(records.size()));
    for (std::size_t k = 0; k < records.size(); ++k) v(static_cast<Eigen::Index>(k)) = records[k].value;
    return v;
}

}  // namespace sct

#endif  // SCT_FORWARD_HPP
