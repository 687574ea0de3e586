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

// Magnitude/phase parametrizations of qubit and V-type qutrit states and of
// the rotation generators acting on them, plus the diagonal-phase gauge
// freedom V(eta) = |0><0| + sum_j exp(i eta_j) |j><j| that relates
// (state, generator) pairs with identical statistics.

#ifndef SCT_MODEL_HPP
#define SCT_MODEL_HPP

#include <array>
#include <cmath>
#include <numbers>

#include "sct/error.hpp"
#include "sct/smallmat.hpp"

namespace sct {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2pi).
inline double wrap_phase(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

/// Shortest signed distance between two angles, in [-pi, pi].
inline double phase_distance(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    return std::abs(d);
}

inline void check_dim(int dim) {
    if (dim != 2 && dim != 3) {
        throw Error(Errc::wrong_dimension, "dimension must be 2 or 3, got " + std::to_string(dim));
    }
}

/// Index of the coherence pair (i, j), i < j: (0,1) -> 0, (0,2) -> 1, (1,2) -> 2.
constexpr int pair_index(int i, int j) { return i + j - 1; }

constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

constexpr int num_pairs(int dim) { return dim == 2 ? 1 : 3; }

/// Unnormalized density matrix rho' = N rho in magnitude/phase form. Entry
/// (i, j), i < j, is coherence[k] * exp(-i phase[k]) with k = pair_index(i, j).
struct DensityParams {
    int dim = 2;
    std::array<double, 3> population{};
    std::array<double, 3> coherence{};
    std::array<double, 3> phase{};

    static DensityParams qubit(double rho00, double rho11, double rho01, double gamma) {
        DensityParams p;
        p.dim = 2;
        p.population = {rho00, rho11, 0.0};
        p.coherence = {rho01, 0.0, 0.0};
        p.phase = {gamma, 0.0, 0.0};
        p.canonicalize();
        return p;
    }

    static DensityParams qutrit(std::array<double, 3> populations, std::array<double, 3> coherences,
                                std::array<double, 3> phases) {
        DensityParams p;
        p.dim = 3;
        p.population = populations;
        p.coherence = coherences;
        p.phase = phases;
        p.canonicalize();
        return p;
    }

    /// Trace N of the unnormalized matrix.
    double scale() const {
        double n = 0.0;
        for (int i = 0; i < dim; ++i) n += population[i];
        return n;
    }

    /// Folds negative coherence magnitudes into phase + pi and wraps phases.
    void canonicalize() {
        for (int k = 0; k < num_pairs(dim); ++k) {
            if (coherence[k] < 0.0) {
                coherence[k] = -coherence[k];
                phase[k] += std::numbers::pi;
            }
            phase[k] = wrap_phase(phase[k]);
        }
    }

    bool operator==(const DensityParams &) const = default;
};

/// Rotation generator. dim 2: G = 1/2 [[h_z, e^{-i phi} h_c], [e^{i phi} h_c, -h_z]]
/// with coupling[0] = h_c. dim 3 (V-type): ground state |0> coupled to |1>
/// and |2> with strengths coupling[0..1]; the |1>-|2> element is zero.
struct GeneratorParams {
    int dim = 2;
    double h_z = 0.0;
    std::array<double, 2> coupling{};
    std::array<double, 2> phi{};

    static GeneratorParams qubit(double h_z, double h_c, double phi) {
        GeneratorParams g;
        g.dim = 2;
        g.h_z = h_z;
        g.coupling = {h_c, 0.0};
        g.phi = {wrap_phase(phi), 0.0};
        return g;
    }

    static GeneratorParams qutrit(double h1, double h2, double phi1, double phi2) {
        GeneratorParams g;
        g.dim = 3;
        g.coupling = {h1, h2};
        g.phi = {wrap_phase(phi1), wrap_phase(phi2)};
        return g;
    }

    int num_couplings() const { return dim == 2 ? 1 : 2; }

    /// Rotation angle: sqrt(h_c^2 + h_z^2) or sqrt(h1^2 + h2^2).
    double omega() const {
        if (dim == 2) return std::hypot(coupling[0], h_z);
        return std::hypot(coupling[0], coupling[1]);
    }

    bool operator==(const GeneratorParams &) const = default;
};

inline void validate(const DensityParams &p) {
    check_dim(p.dim);
    for (int i = 0; i < p.dim; ++i) {
        if (!(p.population[i] >= 0.0)) {
            throw Error(Errc::invalid_range, "population must be non-negative");
        }
    }
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        if (!(p.coherence[k] >= 0.0)) {
            throw Error(Errc::invalid_range, "coherence magnitude must be non-negative");
        }
    }
}

inline void validate(const GeneratorParams &g) {
    check_dim(g.dim);
    for (int k = 0; k < g.num_couplings(); ++k) {
        if (!(g.coupling[k] >= 0.0)) {
            throw Error(Errc::invalid_range, "coupling magnitude must be non-negative");
        }
    }
    if (!std::isfinite(g.h_z)) throw Error(Errc::invalid_range, "h_z must be finite");
}

namespace detail {

/// Hermitian matrix of `p` without range checks. Negative magnitudes are
/// allowed and act as phase + pi; the forward map is linear in them.
inline CMatrix hermitian_from(const DensityParams &p) {
    CMatrix m = CMatrix::Zero(p.dim, p.dim);
    for (int i = 0; i < p.dim; ++i) m(i, i) = p.population[i];
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        const auto [i, j] = kPairs[k];
        const Complex entry(p.coherence[k] * std::cos(p.phase[k]), -p.coherence[k] * std::sin(p.phase[k]));
        m(i, j) = entry;
        m(j, i) = std::conj(entry);
    }
    return m;
}

}  // namespace detail

inline CMatrix assemble_state(const DensityParams &p) {
    validate(p);
    return detail::hermitian_from(p);
}

/// Smallest eigenvalue of the assembled matrix divided by N. Negative values
/// flag a non-physical (but still usable) parameter set.
inline double positivity_margin(const DensityParams &p) {
    const double n = p.scale();
    return min_eigenvalue(assemble_state(p)) / (n > 0.0 ? n : 1.0);
}

inline bool is_physical(const DensityParams &p) { return positivity_margin(p) >= -1e-10; }

/// Inverse of assemble_state for a Hermitian 2x2 or 3x3 matrix.
inline DensityParams extract_state(const CMatrix &m) {
    check_dim(static_cast<int>(m.rows()));
    DensityParams p;
    p.dim = static_cast<int>(m.rows());
    for (int i = 0; i < p.dim; ++i) p.population[i] = m(i, i).real();
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        const auto [i, j] = kPairs[k];
        p.coherence[k] = std::abs(m(i, j));
        p.phase[k] = p.coherence[k] > 0.0 ? wrap_phase(-std::arg(m(i, j))) : 0.0;
    }
    return p;
}

namespace detail {

/// Generator matrix without range checks; a negative coupling acts as
/// phi + pi.
inline CMatrix generator_from(const GeneratorParams &g) {
    CMatrix m = CMatrix::Zero(g.dim, g.dim);
    if (g.dim == 2) {
        m(0, 0) = 0.5 * g.h_z;
        m(1, 1) = -0.5 * g.h_z;
        m(0, 1) = Complex(0.5 * g.coupling[0] * std::cos(g.phi[0]), -0.5 * g.coupling[0] * std::sin(g.phi[0]));
        m(1, 0) = std::conj(m(0, 1));
    } else {
        for (int k = 0; k < 2; ++k) {
            m(0, k + 1) = Complex(0.5 * g.coupling[k] * std::cos(g.phi[k]), -0.5 * g.coupling[k] * std::sin(g.phi[k]));
            m(k + 1, 0) = std::conj(m(0, k + 1));
        }
    }
    return m;
}

}  // namespace detail

inline CMatrix assemble_generator(const GeneratorParams &g) {
    validate(g);
    return detail::generator_from(g);
}

using Bloch = std::array<double, 3>;

inline Bloch bloch(const DensityParams &p) {
    if (p.dim != 2) throw Error(Errc::wrong_dimension, "Bloch vectors are defined for qubits only");
    return {2.0 * p.coherence[0] * std::cos(p.phase[0]), 2.0 * p.coherence[0] * std::sin(p.phase[0]),
            p.population[0] - p.population[1]};
}

inline Bloch bloch(const GeneratorParams &g) {
    if (g.dim != 2) throw Error(Errc::wrong_dimension, "Bloch vectors are defined for qubits only");
    return {g.coupling[0] * std::cos(g.phi[0]), g.coupling[0] * std::sin(g.phi[0]), g.h_z};
}

inline double norm(const Bloch &v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Phase combinations the statistics actually depend on, together with the
/// half-angle trigonometry of the rotation.
struct DerivedAngles {
    std::array<double, 3> beta{};  // dim 2: beta[0] = phi - gamma
    double c = 1.0;
    double s = 0.0;
    std::array<double, 2> h_unit{};  // h_c / Omega or h_j / Omega
    double h_z_unit = 0.0;
    double omega = 0.0;

    static DerivedAngles of(const DensityParams &p, const GeneratorParams &g) {
        if (p.dim != g.dim) throw Error(Errc::dimension_mismatch, "state and generator dimensions differ");
        DerivedAngles a;
        a.omega = g.omega();
        a.c = std::cos(a.omega / 2.0);
        a.s = std::sin(a.omega / 2.0);
        if (a.omega > 0.0) {
            a.h_unit = {g.coupling[0] / a.omega, g.coupling[1] / a.omega};
            a.h_z_unit = g.h_z / a.omega;
        }
        if (g.dim == 2) {
            a.beta[0] = g.phi[0] - p.phase[0];
        } else {
            a.beta[0] = g.phi[0] - p.phase[0];
            a.beta[1] = g.phi[1] - p.phase[1];
            a.beta[2] = p.phase[2] + g.phi[0] - g.phi[1];
        }
        return a;
    }
};

struct GaugePair {
    DensityParams state;
    GeneratorParams generator;
    /// Set for every coupling whose magnitude is zero; its phase is then
    /// unconstrained and pinned to 0.
    std::array<bool, 2> undefined{};
};

/// Applies V(eta) to both the state and the generator. For qubits only eta[0]
/// is used; for qutrits eta[k] is the phase on excited level k + 1.
inline GaugePair gauge_transform(const DensityParams &state, const GeneratorParams &gen,
                                 std::array<double, 2> eta) {
    if (state.dim != gen.dim) throw Error(Errc::dimension_mismatch, "state and generator dimensions differ");
    GaugePair out{state, gen, {}};
    if (state.dim == 2) {
        out.state.phase[0] = wrap_phase(state.phase[0] + eta[0]);
        out.generator.phi[0] = wrap_phase(gen.phi[0] + eta[0]);
    } else {
        out.state.phase[0] = wrap_phase(state.phase[0] + eta[0]);
        out.state.phase[1] = wrap_phase(state.phase[1] + eta[1]);
        out.state.phase[2] = wrap_phase(state.phase[2] + eta[1] - eta[0]);
        out.generator.phi[0] = wrap_phase(gen.phi[0] + eta[0]);
        out.generator.phi[1] = wrap_phase(gen.phi[1] + eta[1]);
    }
    return out;
}

inline GaugePair gauge_transform(const DensityParams &state, const GeneratorParams &gen, double eta) {
    return gauge_transform(state, gen, {eta, 0.0});
}

/// Chooses the gauge in which every nonzero coupling of the generator is real
/// and positive, i.e. applies V(-phi).
inline GaugePair gauge_fix(const DensityParams &state, const GeneratorParams &gen) {
    std::array<double, 2> eta{};
    std::array<bool, 2> undefined{};
    GeneratorParams pinned = gen;
    for (int k = 0; k < gen.num_couplings(); ++k) {
        if (gen.coupling[k] > 0.0) {
            eta[k] = -gen.phi[k];
        } else {
            undefined[k] = true;
            pinned.phi[k] = 0.0;
        }
    }
    GaugePair out = gauge_transform(state, pinned, eta);
    for (int k = 0; k < gen.num_couplings(); ++k) {
        // Exact zero, not a wrapped 2pi - epsilon.
        out.generator.phi[k] = 0.0;
    }
    out.undefined = undefined;
    return out;
}

}  // namespace sct

#endif  // SCT_MODEL_HPP
