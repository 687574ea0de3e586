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

// Measurement protocols: ordered lists of control settings, the declared set
// of unknowns, and the mapping between a flat unknown vector and the
// (state, process) parameters it stands for.

#ifndef SCT_PROTOCOL_HPP
#define SCT_PROTOCOL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sct/error.hpp"
#include "sct/model.hpp"

namespace sct {

enum class ParamKind { population, coherence, phase, lambda };

/// One member of the unknown set. `index` is the level for populations, the
/// pair index for coherences and phases, and the coupling slot for lambdas
/// (dim 2: 0 = lambda_c, 1 = lambda_z; dim 3: 0 = lambda1, 1 = lambda2).
struct ParamId {
    ParamKind kind = ParamKind::population;
    int index = 0;

    bool operator==(const ParamId &) const = default;
};

inline std::string param_name(int dim, ParamId id) {
    switch (id.kind) {
        case ParamKind::population:
            return "rho" + std::to_string(id.index) + std::to_string(id.index);
        case ParamKind::coherence: {
            const auto [i, j] = kPairs[id.index];
            return "rho" + std::to_string(i) + std::to_string(j);
        }
        case ParamKind::phase: {
            if (dim == 2) return "gamma";
            const auto [i, j] = kPairs[id.index];
            return "gamma" + std::to_string(i) + std::to_string(j);
        }
        case ParamKind::lambda:
            if (dim == 2) return id.index == 0 ? "lambda_c" : "lambda_z";
            return "lambda" + std::to_string(id.index + 1);
    }
    return "?";
}

/// All parameter names valid for `dim`, in canonical listing order.
inline std::vector<ParamId> all_params(int dim) {
    check_dim(dim);
    std::vector<ParamId> out;
    for (int i = 0; i < dim; ++i) out.push_back({ParamKind::population, i});
    for (int k = 0; k < num_pairs(dim); ++k) out.push_back({ParamKind::coherence, k});
    for (int k = 0; k < num_pairs(dim); ++k) out.push_back({ParamKind::phase, k});
    out.push_back({ParamKind::lambda, 0});
    out.push_back({ParamKind::lambda, 1});
    return out;
}

inline ParamId parse_param(int dim, std::string_view name) {
    for (ParamId id : all_params(dim)) {
        if (param_name(dim, id) == name) return id;
    }
    throw Error(Errc::schema_error, "unknown parameter name '" + std::string(name) + "' for dim " +
                                        std::to_string(dim));
}

/// Process-side parameters. Lambdas are optional so that a protocol can tell
/// which ones the caller actually supplied. `phase_offset` is an additive
/// offset on each control phase (the unknown reference phase when the
/// protocol declares phase_known = false); it is zero for calibrated phases.
struct UnknownParams {
    int dim = 2;
    std::array<std::optional<double>, 2> lambda{};
    std::array<double, 2> phase_offset{};

    static UnknownParams qubit(std::optional<double> lambda_c, std::optional<double> lambda_z = std::nullopt) {
        UnknownParams u;
        u.dim = 2;
        u.lambda = {lambda_c, lambda_z};
        return u;
    }

    static UnknownParams qutrit(std::optional<double> lambda1, std::optional<double> lambda2) {
        UnknownParams u;
        u.dim = 3;
        u.lambda = {lambda1, lambda2};
        return u;
    }

    bool operator==(const UnknownParams &) const = default;
};

struct MeasurementSetting {
    std::array<double, 2> multiplier{};     // m_c (dim 2) or m_1, m_2 (dim 3)
    std::array<double, 2> control_phase{};  // theta per coupling
    double m_z = 0.0;                       // dim 2 only: h_z = m_z * lambda_z
    int label = 0;                          // projector |label><label| after the rotation

    bool operator==(const MeasurementSetting &) const = default;
};

/// Sub-problem of a block-triangular protocol: which settings determine
/// which unknowns once the earlier blocks are solved.
struct ProtocolBlock {
    int first_setting = 0;
    int num_settings = 0;
    std::vector<ParamId> unknowns;

    bool operator==(const ProtocolBlock &) const = default;
};

struct Protocol {
    std::string name;
    int dim = 2;
    std::vector<MeasurementSetting> settings;
    std::vector<ParamId> unknowns;  // canonical order; defines Jacobian columns
    /// Calibrated coupling constants for lambdas that are not unknowns.
    std::array<std::optional<double>, 2> known_lambda{};
    bool phase_known = true;
    /// Set on protocols that are not part of the published catalog.
    bool artifact_extension = false;
    std::vector<ProtocolBlock> blocks;

    bool operator==(const Protocol &) const = default;

    std::size_t num_unknowns() const { return unknowns.size(); }

    bool has_unknown(ParamId id) const { return std::find(unknowns.begin(), unknowns.end(), id) != unknowns.end(); }

    bool has_process_unknowns() const {
        return std::any_of(unknowns.begin(), unknowns.end(),
                           [](ParamId id) { return id.kind == ParamKind::lambda; });
    }

    /// Merges the calibrated lambdas into `u`.
    UnknownParams complete(UnknownParams u) const {
        for (int k = 0; k < 2; ++k) {
            if (known_lambda[k] && !has_unknown({ParamKind::lambda, k})) u.lambda[k] = known_lambda[k];
        }
        return u;
    }
};

inline void validate(const Protocol &p) {
    check_dim(p.dim);
    if (p.settings.size() < p.unknowns.size()) {
        throw Error(Errc::invalid_range, "protocol '" + p.name + "' has fewer settings than unknowns");
    }
    for (const auto &s : p.settings) {
        if (s.label < 0 || s.label >= p.dim) throw Error(Errc::bad_label, "setting label out of range");
        for (double m : s.multiplier) {
            if (!(m >= 0.0)) throw Error(Errc::invalid_range, "multipliers must be non-negative");
        }
        if (p.dim == 3 && s.m_z != 0.0) throw Error(Errc::invalid_range, "m_z is a qubit-only control");
    }
    for (std::size_t a = 0; a < p.unknowns.size(); ++a) {
        const ParamId id = p.unknowns[a];
        const int limit = id.kind == ParamKind::population ? p.dim
                          : id.kind == ParamKind::lambda   ? 2
                                                           : num_pairs(p.dim);
        if (id.index < 0 || id.index >= limit) throw Error(Errc::invalid_range, "unknown index out of range");
        for (std::size_t b = 0; b < a; ++b) {
            if (p.unknowns[b] == id) throw Error(Errc::invalid_range, "duplicate unknown " + param_name(p.dim, id));
        }
    }
}

/// h_j = m_j lambda_j, phi_j = theta_j + phase offset, h_z = m_z lambda_z.
inline GeneratorParams resolve(const MeasurementSetting &setting, const UnknownParams &unknowns) {
    auto lambda_for = [&](int slot, double multiplier) -> double {
        if (multiplier == 0.0) return 0.0;
        if (!unknowns.lambda[slot]) {
            throw Error(Errc::missing_unknown, "setting needs " + param_name(unknowns.dim, {ParamKind::lambda, slot}));
        }
        return multiplier * *unknowns.lambda[slot];
    };
    if (unknowns.dim == 2) {
        return GeneratorParams::qubit(lambda_for(1, setting.m_z), lambda_for(0, setting.multiplier[0]),
                                      setting.control_phase[0] + unknowns.phase_offset[0]);
    }
    check_dim(unknowns.dim);
    return GeneratorParams::qutrit(lambda_for(0, setting.multiplier[0]), lambda_for(1, setting.multiplier[1]),
                                   setting.control_phase[0] + unknowns.phase_offset[0],
                                   setting.control_phase[1] + unknowns.phase_offset[1]);
}

/// A full evaluation point: state plus process parameters.
struct ParamPoint {
    DensityParams state;
    UnknownParams process;

    bool operator==(const ParamPoint &) const = default;
};

inline double get_param(const ParamPoint &pt, ParamId id) {
    switch (id.kind) {
        case ParamKind::population: return pt.state.population[id.index];
        case ParamKind::coherence: return pt.state.coherence[id.index];
        case ParamKind::phase: return pt.state.phase[id.index];
        case ParamKind::lambda:
            if (!pt.process.lambda[id.index]) {
                throw Error(Errc::missing_unknown, param_name(pt.state.dim, id) + " is not set");
            }
            return *pt.process.lambda[id.index];
    }
    return 0.0;
}

/// Writes a raw value; no wrapping or sign folding.
inline void set_param(ParamPoint &pt, ParamId id, double value) {
    switch (id.kind) {
        case ParamKind::population: pt.state.population[id.index] = value; break;
        case ParamKind::coherence: pt.state.coherence[id.index] = value; break;
        case ParamKind::phase: pt.state.phase[id.index] = value; break;
        case ParamKind::lambda: pt.process.lambda[id.index] = value; break;
    }
}

inline Eigen::VectorXd pack(const Protocol &p, const ParamPoint &pt) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(p.unknowns.size()));
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) x(static_cast<Eigen::Index>(k)) = get_param(pt, p.unknowns[k]);
    return x;
}

/// Overwrites the unknowns of `base` with `x`; everything else is kept.
inline ParamPoint unpack(const Protocol &p, const Eigen::VectorXd &x, ParamPoint base) {
    for (std::size_t k = 0; k < p.unknowns.size(); ++k) set_param(base, p.unknowns[k], x(static_cast<Eigen::Index>(k)));
    return base;
}

namespace detail {

inline MeasurementSetting qubit_setting(double m_c, double theta, int label, double m_z = 0.0) {
    MeasurementSetting s;
    s.multiplier = {m_c, 0.0};
    s.control_phase = {theta, 0.0};
    s.m_z = m_z;
    s.label = label;
    return s;
}

inline MeasurementSetting qutrit_setting(double m1, double m2, double theta1, double theta2, int label) {
    MeasurementSetting s;
    s.multiplier = {m1, m2};
    s.control_phase = {theta1, theta2};
    s.label = label;
    return s;
}

inline std::vector<ParamId> qubit_state_unknowns() {
    return {{ParamKind::population, 0}, {ParamKind::coherence, 0}, {ParamKind::population, 1}};
}

}  // namespace detail

inline const std::vector<std::string> &scenario_names() {
    static const std::vector<std::string> names{"A", "B", "C", "C-alt", "V"};
    return names;
}

/// Published measurement catalog. "A": four calibrated projections; "B": one
/// unknown retardance lambda_c; "C": B plus U(lambda_z, 0, 0); "C-alt": B plus
/// U(lambda_z, lambda_c, 0) (not in the published catalog, see identify); "V":
/// eleven settings on the V-type qutrit with unknown lambda1, lambda2.
inline Protocol scenario(std::string_view name) {
    using detail::qubit_setting;
    using detail::qutrit_setting;
    constexpr double half_pi = std::numbers::pi / 2.0;
    Protocol p;
    p.name = std::string(name);
    if (name == "A") {
        p.dim = 2;
        p.known_lambda = {half_pi, std::nullopt};
        p.settings = {qubit_setting(0, 0, 0), qubit_setting(0, 0, 1), qubit_setting(1, 0, 1),
                      qubit_setting(1, half_pi, 1)};
        p.unknowns = detail::qubit_state_unknowns();
        p.unknowns.push_back({ParamKind::phase, 0});
        return p;
    }
    if (name == "B" || name == "C" || name == "C-alt") {
        p.dim = 2;
        p.settings = {qubit_setting(0, 0, 1), qubit_setting(1, 0, 1), qubit_setting(2, 0, 1),
                      qubit_setting(1, half_pi, 1), qubit_setting(2, half_pi, 1)};
        p.unknowns = detail::qubit_state_unknowns();
        p.unknowns.push_back({ParamKind::lambda, 0});
        p.unknowns.push_back({ParamKind::phase, 0});
        if (name == "C") {
            p.settings.push_back(qubit_setting(0, 0, 1, 1.0));
            p.unknowns.push_back({ParamKind::lambda, 1});
        } else if (name == "C-alt") {
            p.settings.push_back(qubit_setting(1, 0, 1, 1.0));
            p.unknowns.push_back({ParamKind::lambda, 1});
            p.artifact_extension = true;
        }
        return p;
    }
    if (name == "V") {
        p.dim = 3;
        p.settings = {
            // |0>-|1> pair
            qutrit_setting(0, 0, 0, 0, 1),
            qutrit_setting(1, 0, 0, 0, 1),
            qutrit_setting(1, 0, half_pi, 0, 1),
            qutrit_setting(2, 0, 0, 0, 1),
            qutrit_setting(2, 0, half_pi, 0, 1),
            // |0>-|2> pair
            qutrit_setting(0, 1, 0, 0, 2),
            qutrit_setting(0, 1, 0, half_pi, 2),
            qutrit_setting(0, 2, 0, 0, 2),
            qutrit_setting(0, 2, 0, half_pi, 2),
            // both fields
            qutrit_setting(1, 1, 0, 0, 1),
            qutrit_setting(1, 1, 0, half_pi, 1),
        };
        const ParamId r00{ParamKind::population, 0}, r11{ParamKind::population, 1}, r22{ParamKind::population, 2};
        const ParamId r01{ParamKind::coherence, 0}, r02{ParamKind::coherence, 1}, r12{ParamKind::coherence, 2};
        const ParamId g01{ParamKind::phase, 0}, g02{ParamKind::phase, 1}, g12{ParamKind::phase, 2};
        const ParamId l1{ParamKind::lambda, 0}, l2{ParamKind::lambda, 1};
        p.unknowns = {r00, r11, r22, r01, r02, r12, g01, g02, g12, l1, l2};
        p.blocks = {{0, 5, {r00, r11, r01, g01, l1}}, {5, 4, {r22, r02, g02, l2}}, {9, 2, {r12, g12}}};
        return p;
    }
    throw Error(Errc::unknown_scenario, "no scenario named '" + std::string(name) + "'");
}

inline bool is_scenario_name(std::string_view name) {
    const auto &names = scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

/// Column permutation that lists the unknowns block by block (identity when
/// the protocol declares no blocks).
inline std::vector<int> block_column_order(const Protocol &p) {
    std::vector<int> order;
    if (p.blocks.empty()) {
        for (std::size_t k = 0; k < p.unknowns.size(); ++k) order.push_back(static_cast<int>(k));
        return order;
    }
    for (const auto &b : p.blocks) {
        for (ParamId id : b.unknowns) {
            auto it = std::find(p.unknowns.begin(), p.unknowns.end(), id);
            if (it == p.unknowns.end()) throw Error(Errc::invalid_range, "block unknown missing from protocol");
            order.push_back(static_cast<int>(it - p.unknowns.begin()));
        }
    }
    return order;
}

}  // namespace sct

#endif  // SCT_PROTOCOL_HPP
