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

// Seedable random number streams and generators of random physical states
// and generators, used by the noise simulator, the convention resolver and
// the validation suites.

#ifndef SCT_SAMPLING_HPP
#define SCT_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "sct/model.hpp"

namespace sct {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for stream `stream` of the family identified by `seed`.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform point of the Bloch ball scaled to trace `n`, with coherence
/// magnitude at least `min_coherence * n`.
inline DensityParams random_qubit_state(std::mt19937_64 &rng, double n = 1.0, double min_coherence = 0.0,
                                        double max_purity_radius = 1.0) {
    for (;;) {
        const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1), z = uniform(rng, -1, 1);
        const double r2 = x * x + y * y + z * z;
        if (r2 > max_purity_radius * max_purity_radius) continue;
        const double rho01 = 0.5 * n * std::hypot(x, y);
        if (rho01 < min_coherence * n) continue;
        return DensityParams::qubit(0.5 * n * (1 + z), 0.5 * n * (1 - z), rho01, std::atan2(y, x));
    }
}

/// Rejection sample over the magnitude/phase parametrization: populations
/// uniform on the simplex, coherences uniform in [min, sqrt(rho_ii rho_jj)],
/// phases uniform; accepted when the assembled matrix is PSD.
inline DensityParams random_qutrit_state(std::mt19937_64 &rng, double n = 1.0, double min_coherence = 0.0) {
    for (;;) {
        std::array<double, 3> e{};
        double total = 0.0;
        for (double &v : e) {
            v = -std::log(uniform(rng, 1e-300, 1.0));
            total += v;
        }
        std::array<double, 3> pops{};
        for (int i = 0; i < 3; ++i) pops[i] = n * e[i] / total;
        std::array<double, 3> coh{};
        std::array<double, 3> ph{};
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
            const auto [i, j] = kPairs[k];
            const double bound = std::sqrt(pops[i] * pops[j]);
            if (bound <= min_coherence * n) {
                ok = false;
                break;
            }
            coh[k] = uniform(rng, min_coherence * n, bound);
            ph[k] = uniform(rng, 0.0, kTwoPi);
        }
        if (!ok) continue;
        DensityParams p = DensityParams::qutrit(pops, coh, ph);
        if (positivity_margin(p) >= 0.0) return p;
    }
}

/// Random generator with couplings in [0, h_max], phases uniform and, for
/// qubits, h_z in [-h_max, h_max].
inline GeneratorParams random_generator(std::mt19937_64 &rng, int dim, double h_max) {
    if (dim == 2) {
        return GeneratorParams::qubit(uniform(rng, -h_max, h_max), uniform(rng, 0.0, h_max),
                                      uniform(rng, 0.0, kTwoPi));
    }
    return GeneratorParams::qutrit(uniform(rng, 0.0, h_max), uniform(rng, 0.0, h_max), uniform(rng, 0.0, kTwoPi),
                                   uniform(rng, 0.0, kTwoPi));
}

inline DensityParams random_state(std::mt19937_64 &rng, int dim, double n = 1.0, double min_coherence = 0.0) {
    return dim == 2 ? random_qubit_state(rng, n, min_coherence) : random_qutrit_state(rng, n, min_coherence);
}

}  // namespace sct

#endif  // SCT_SAMPLING_HPP
