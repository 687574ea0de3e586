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


#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sct/model.hpp"

namespace sct {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(AssembleState, GroundState) {
    const CMatrix m = assemble_state(DensityParams::qubit(1.0, 0.0, 0.0, 0.0));
    EXPECT_NEAR(m(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(m(0, 1)) + std::abs(m(1, 1)), 0.0, 1e-15);
}

TEST(AssembleState, PlusProjector) {
    const CMatrix m = assemble_state(DensityParams::qubit(0.5, 0.5, 0.5, 0.0));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(m(i, j) - 0.5), 1e-15);
    }
}

TEST(AssembleState, MaximallyMixedQutrit) {
    const double t = 1.0 / 3.0;
    const CMatrix m = assemble_state(DensityParams::qutrit({t, t, t}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}));
    EXPECT_LT((m - identity(3) * t).norm(), 1e-15);
}

TEST(AssembleState, CoherencePhaseConvention) {
    const CMatrix m = assemble_state(DensityParams::qubit(0.5, 0.5, 0.3, 0.7));
    EXPECT_LT(std::abs(m(0, 1) - 0.3 * std::exp(Complex(0.0, -0.7))), 1e-15);
    EXPECT_LT(std::abs(m(1, 0) - std::conj(m(0, 1))), 1e-15);
}

TEST(AssembleState, NegativeMagnitudeRejected) {
    DensityParams p = DensityParams::qubit(0.5, 0.5, 0.1, 0.0);
    p.population[0] = -0.1;
    EXPECT_THROW(assemble_state(p), Error);
}

TEST(AssembleGenerator, HalfTurnAboutX) {
    const CMatrix g = assemble_generator(GeneratorParams::qubit(0.0, kPi, 0.0));
    EXPECT_NEAR(g(0, 1).real(), kPi / 2.0, 1e-15);
    EXPECT_NEAR(g(1, 0).real(), kPi / 2.0, 1e-15);
    EXPECT_NEAR(std::abs(g(0, 0)) + std::abs(g(1, 1)), 0.0, 1e-15);
}

TEST(AssembleGenerator, VTypeSpectrum) {
    const RVector ev = eigenvalues(assemble_generator(GeneratorParams::qutrit(3.0, 4.0, 0.0, 0.0)));
    EXPECT_NEAR(ev(0), -2.5, 1e-12);
    EXPECT_NEAR(ev(1), 0.0, 1e-12);
    EXPECT_NEAR(ev(2), 2.5, 1e-12);
}

TEST(AssembleGenerator, VTypeHasNoExcitedCoupling) {
    const CMatrix g = assemble_generator(GeneratorParams::qutrit(1.0, 2.0, 0.3, 0.9));
    EXPECT_EQ(std::abs(g(1, 2)), 0.0);
}

TEST(AssembleGenerator, DiagonalGenerator) {
    const CMatrix g = assemble_generator(GeneratorParams::qubit(1.0, 0.0, 2.4));
    EXPECT_NEAR(g(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(g(1, 1).real(), -0.5, 1e-15);
    EXPECT_NEAR(std::abs(g(0, 1)), 0.0, 1e-15);
}

TEST(AssembleGenerator, NegativeCouplingRejected) {
    EXPECT_THROW(assemble_generator(GeneratorParams::qubit(0.0, -1.0, 0.0)), Error);
}

TEST(Bloch, MixedStateAtOrigin) {
    const Bloch b = bloch(DensityParams::qubit(0.5, 0.5, 0.0, 0.0));
    EXPECT_NEAR(norm(b), 0.0, 1e-15);
}

TEST(Bloch, PlusStateOnXAxis) {
    const Bloch b = bloch(DensityParams::qubit(0.5, 0.5, 0.5, 0.0));
    EXPECT_NEAR(b[0], 1.0, 1e-15);
    EXPECT_NEAR(b[1], 0.0, 1e-15);
    EXPECT_NEAR(b[2], 0.0, 1e-15);
}

TEST(Bloch, GeneratorVector) {
    const GeneratorParams g = GeneratorParams::qubit(1.0, 2.0, kPi / 2.0);
    const Bloch b = bloch(g);
    EXPECT_NEAR(b[0], 0.0, 1e-15);
    EXPECT_NEAR(b[1], 2.0, 1e-15);
    EXPECT_NEAR(b[2], 1.0, 1e-15);
    EXPECT_NEAR(g.omega(), std::sqrt(5.0), 1e-15);
}

TEST(Bloch, QutritRejected) {
    try {
        bloch(GeneratorParams::qutrit(1.0, 1.0, 0.0, 0.0));
        FAIL() << "expected WrongDimension";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::wrong_dimension);
    }
}

TEST(GaugeTransform, ShiftsBothPhasesAndKeepsBeta) {
    const DensityParams s = DensityParams::qubit(0.6, 0.4, 0.2, 0.2);
    const GeneratorParams g = GeneratorParams::qubit(0.3, 1.0, 0.5);
    const GaugePair t = gauge_transform(s, g, 0.7);
    EXPECT_NEAR(t.state.phase[0], 0.9, 1e-15);
    EXPECT_NEAR(t.generator.phi[0], 1.2, 1e-15);
    EXPECT_NEAR(DerivedAngles::of(t.state, t.generator).beta[0], 0.3, 1e-15);
}

TEST(GaugeTransform, ZeroIsIdentity) {
    const DensityParams s = DensityParams::qubit(0.6, 0.4, 0.2, 0.2);
    const GeneratorParams g = GeneratorParams::qubit(0.3, 1.0, 0.5);
    const GaugePair t = gauge_transform(s, g, 0.0);
    EXPECT_EQ(t.state, s);
    EXPECT_EQ(t.generator, g);
}

TEST(GaugeTransform, WrapsModuloTwoPi) {
    const GaugePair t = gauge_transform(DensityParams::qubit(0.6, 0.4, 0.2, 6.0), GeneratorParams::qubit(0.0, 1.0, 6.0), 1.0);
    EXPECT_NEAR(t.state.phase[0], 7.0 - kTwoPi, 1e-12);
    EXPECT_NEAR(t.generator.phi[0], 0.71681, 1e-5);
}

TEST(GaugeTransform, QutritExcitedCoherenceShiftsByDifference) {
    const DensityParams s = DensityParams::qutrit({0.4, 0.3, 0.3}, {0.1, 0.1, 0.1}, {0.1, 0.2, 0.3});
    const GeneratorParams g = GeneratorParams::qutrit(1.0, 1.0, 0.0, 0.0);
    const GaugePair t = gauge_transform(s, g, {0.5, 0.9});
    EXPECT_NEAR(t.state.phase[0], 0.6, 1e-15);
    EXPECT_NEAR(t.state.phase[1], 1.1, 1e-15);
    EXPECT_NEAR(t.state.phase[2], 0.7, 1e-15);
}

TEST(GaugeFix, MakesCouplingRealPositive) {
    const GaugePair f = gauge_fix(DensityParams::qubit(0.6, 0.4, 0.2, 0.4), GeneratorParams::qubit(0.0, 1.0, 1.1));
    EXPECT_NEAR(f.generator.phi[0], 0.0, 1e-15);
    EXPECT_NEAR(f.state.phase[0], 5.58319, 1e-5);
    EXPECT_FALSE(f.undefined[0]);
}

TEST(GaugeFix, Idempotent) {
    const GaugePair f = gauge_fix(DensityParams::qubit(0.6, 0.4, 0.2, 0.4), GeneratorParams::qubit(0.2, 1.0, 1.1));
    const GaugePair g = gauge_fix(f.state, f.generator);
    EXPECT_NEAR(phase_distance(f.state.phase[0], g.state.phase[0]), 0.0, 1e-15);
    EXPECT_NEAR(g.generator.phi[0], 0.0, 1e-15);
}

TEST(GaugeFix, ZeroCouplingPinsPhase) {
    const DensityParams s = DensityParams::qubit(0.6, 0.4, 0.2, 0.4);
    const GaugePair f = gauge_fix(s, GeneratorParams::qubit(1.0, 0.0, 1.1));
    EXPECT_TRUE(f.undefined[0]);
    EXPECT_EQ(f.generator.phi[0], 0.0);
    EXPECT_EQ(f.state, s);
}

}  // namespace
}  // namespace sct
