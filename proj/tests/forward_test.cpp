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
#include <random>

#include <gtest/gtest.h>

#include "sct/forward.hpp"
#include "sct/sampling.hpp"

namespace sct {
namespace {

constexpr double kPi = std::numbers::pi;
const Convention kQubitConvention{-1, RootBranch::signed_amplitude};
const Convention kQutritConvention{1, RootBranch::signed_amplitude};

TEST(Evolve, ZeroGeneratorLeavesStateUnchanged) {
    const CMatrix rho = assemble_state(DensityParams::qubit(0.6, 0.4, 0.3, 1.0));
    EXPECT_LT((evolve(rho, GeneratorParams::qubit(0.0, 0.0, 0.0)) - rho).norm(), 1e-15);
}

TEST(Evolve, PiPulseTransfersPopulation) {
    const CMatrix out = evolve(assemble_state(DensityParams::qubit(1.0, 0.0, 0.0, 0.0)), GeneratorParams::qubit(0.0, kPi, 0.0));
    EXPECT_NEAR(out(0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 1.0, 1e-15);
}

TEST(Evolve, MaximallyMixedIsInvariant) {
    const CMatrix out = evolve(identity(2) * 0.5, GeneratorParams::qubit(0.4, 2.1, 0.8));
    EXPECT_LT((out - identity(2) * 0.5).norm(), 1e-15);
}

TEST(Evolve, DimensionMismatch) {
    try {
        evolve(identity(3), GeneratorParams::qubit(0.0, 1.0, 0.0));
        FAIL() << "expected DimensionMismatch";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
}

TEST(Probability, PureGroundStateWithoutRotation) {
    EXPECT_NEAR(probability(DensityParams::qubit(1.0, 0.0, 0.0, 0.0), GeneratorParams::qubit(0.0, 0.0, 0.0), 0), 1.0,
                1e-15);
}

TEST(Probability, MixedStateIsotropy) {
    const DensityParams s = DensityParams::qubit(0.5, 0.5, 0.0, 0.0);
    for (int label = 0; label < 2; ++label) {
        EXPECT_NEAR(probability(s, GeneratorParams::qubit(1.3, 0.7, 2.2), label), 0.5, 1e-15);
    }
}

TEST(Probability, PiPulseReadsExcitedPopulation) {
    EXPECT_NEAR(probability(DensityParams::qubit(0.3, 0.7, 0.0, 0.0), GeneratorParams::qubit(0.0, kPi, 0.0), 0), 0.7,
                1e-15);
}

TEST(Probability, MatchesTraceWithMeasurementOperator) {
    const DensityParams s = DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7});
    const GeneratorParams g = GeneratorParams::qutrit(1.1, 0.6, 0.2, 1.9);
    for (int label = 0; label < 3; ++label) {
        EXPECT_NEAR(probability(s, g, label), expectation(assemble_state(s), measurement_operator(g, label)), 1e-14);
    }
}

TEST(Probability, BadLabel) {
    try {
        probability(DensityParams::qubit(0.5, 0.5, 0.0, 0.0), GeneratorParams::qubit(0.0, 1.0, 0.0), 2);
        FAIL() << "expected BadLabel";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::bad_label);
    }
}

TEST(Coefficients, QubitPiPulse) {
    const DensityParams s = DensityParams::qubit(0.3, 0.7, 0.2, 0.4);
    const CoefficientSet c = coefficients(GeneratorParams::qubit(0.0, kPi, 0.0), s, 0, kQubitConvention);
    EXPECT_NEAR(c.at(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(c.at(1, 1), 1.0, 1e-15);
    EXPECT_NEAR(c.at(0, 1), 0.0, 1e-15);
}

TEST(Coefficients, QutritPiPulseOnFirstLeg) {
    const DensityParams s = DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7});
    const CoefficientSet c = coefficients(GeneratorParams::qutrit(kPi, 0.0, 0.0, 0.0), s, 1, kQutritConvention);
    EXPECT_NEAR(c.at(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(c.at(1, 1), 0.0, 1e-15);
    EXPECT_NEAR(c.at(2, 2), 0.0, 1e-15);
    EXPECT_NEAR(c.at(1, 2), 0.0, 1e-15);
    EXPECT_NEAR(contract(c, s), probability(s, GeneratorParams::qutrit(kPi, 0.0, 0.0, 0.0), 1), 1e-15);
}

TEST(Coefficients, QubitLabelsSumToIdentity) {
    auto rng = make_stream(11, 0);
    for (int d = 0; d < 50; ++d) {
        const DensityParams s = random_state(rng, 2);
        const GeneratorParams g = random_generator(rng, 2, 3.0 * kPi);
        const CoefficientSet c0 = coefficients(g, s, 0, kQubitConvention);
        const CoefficientSet c1 = coefficients(g, s, 1, kQubitConvention);
        EXPECT_NEAR(c0.at(0, 0) + c1.at(0, 0), 1.0, 1e-12);
        EXPECT_NEAR(c0.at(1, 1) + c1.at(1, 1), 1.0, 1e-12);
        EXPECT_NEAR(c0.at(0, 1) + c1.at(0, 1), 0.0, 1e-12);
    }
}

TEST(Coefficients, DegenerateRotationGivesIdentityLimit) {
    const DensityParams s = DensityParams::qubit(0.3, 0.7, 0.2, 0.4);
    const CoefficientSet c = coefficients(GeneratorParams::qubit(0.0, 0.0, 0.0), s, 1, kQubitConvention);
    EXPECT_TRUE(c.degenerate);
    EXPECT_EQ(c.at(1, 1), 1.0);
    EXPECT_EQ(c.at(0, 0), 0.0);
    EXPECT_EQ(c.at(0, 1), 0.0);
}

TEST(Coefficients, ResolvedConventionsReproduceDirectTrace) {
    for (int dim : {2, 3}) {
        const ConventionReport r = resolve_convention(dim, 300, 5);
        EXPECT_EQ(r.resolved, dim == 2 ? kQubitConvention : kQutritConvention);
        for (const auto &c : r.candidates) {
            if (c.convention == r.resolved) {
                EXPECT_EQ(c.disagreement, 0.0);
                EXPECT_LT(c.max_abs_error, 1e-10);
            }
        }
    }
}

TEST(SimulateCounts, MixedStateGivesHalfEverywhere) {
    const Protocol a = scenario("A");
    const auto recs = simulate_counts(DensityParams::qubit(0.5, 0.5, 0.0, 0.0), UnknownParams::qubit(std::nullopt), a, {});
    ASSERT_EQ(recs.size(), a.settings.size());
    for (const auto &r : recs) EXPECT_NEAR(r.value, 0.5, 1e-15);
}

TEST(SimulateCounts, SameSeedSameRecords) {
    const Protocol b = scenario("B");
    const NoiseModel noise{NoiseKind::poisson, 1000, 0.0, 99};
    const DensityParams s = DensityParams::qubit(0.55, 0.45, 0.2, 2.0);
    const auto r1 = simulate_counts(s, UnknownParams::qubit(1.3), b, noise);
    const auto r2 = simulate_counts(s, UnknownParams::qubit(1.3), b, noise);
    ASSERT_EQ(r1.size(), r2.size());
    for (std::size_t k = 0; k < r1.size(); ++k) EXPECT_EQ(r1[k].value, r2[k].value);
}

TEST(SimulateCounts, DimensionMismatch) {
    try {
        simulate_counts(DensityParams::qutrit({0.4, 0.3, 0.3}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}),
                        UnknownParams::qutrit(1.0, 1.0), scenario("B"), {});
        FAIL() << "expected DimensionMismatch";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
}

TEST(SampleStatistic, PoissonMeanWithinFourSigma) {
    const NoiseModel noise{NoiseKind::poisson, 1000000, 0.0, 0};
    auto rng = make_stream(2024, 0);
    const double n = 0.25, scale = 1.0;
    const int reps = 1000;
    double sum = 0.0;
    for (int k = 0; k < reps; ++k) sum += sample_statistic(n, scale, noise, rng);
    const double sigma = std::sqrt(n * scale / static_cast<double>(noise.shots) / reps);
    EXPECT_LT(std::abs(sum / reps - n), 4.0 * sigma);
}

TEST(SampleStatistic, PoissonScalesWithTrace) {
    const NoiseModel noise{NoiseKind::poisson, 1000000, 0.0, 0};
    auto rng = make_stream(2025, 0);
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) sum += sample_statistic(250.0, 1000.0, noise, rng);
    EXPECT_NEAR(sum / 200.0, 250.0, 4.0 * std::sqrt(250.0 * 1000.0 / 1e6 / 200.0));
}

}  // namespace
}  // namespace sct
