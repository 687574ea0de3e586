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

#include "sct/invert.hpp"
#include "sct/sampling.hpp"
#include "sct/validate.hpp"

namespace sct {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<CountRecord> exact(const Protocol &p, const ParamPoint &pt) { return simulate_counts(pt.state, pt.process, p, {}); }

double max_error(const Protocol &p, const ParamPoint &a, const ReconstructionResult &r) {
    return validation::detail::point_error(p, a, {r.state, r.unknowns});
}

const ParamPoint kBTruth{DensityParams::qubit(0.55, 0.45, 0.2, 2.0), UnknownParams::qubit(1.3)};

ParamPoint v_truth() {
    return {DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7}), UnknownParams::qutrit(1.2, 0.7)};
}

TEST(LinearInvert, RecoversScenarioA) {
    const Protocol a = scenario("A");
    const DensityParams truth = DensityParams::qubit(0.6, 0.4, 0.3, 1.0);
    const LinearInversion li = linear_invert(exact(a, {truth, UnknownParams::qubit(std::nullopt)}), a);
    EXPECT_NEAR(li.state.population[0], 0.6, 1e-10);
    EXPECT_NEAR(li.state.population[1], 0.4, 1e-10);
    EXPECT_NEAR(li.state.coherence[0], 0.3, 1e-10);
    EXPECT_NEAR(li.state.phase[0], 1.0, 1e-10);
}

TEST(LinearInvert, ZeroCoherenceFlagsPhase) {
    const Protocol a = scenario("A");
    const LinearInversion li =
        linear_invert(exact(a, {DensityParams::qubit(0.6, 0.4, 0.0, 1.0), UnknownParams::qubit(std::nullopt)}), a);
    EXPECT_NEAR(li.state.coherence[0], 0.0, 1e-12);
    EXPECT_EQ(li.state.phase[0], 0.0);
    EXPECT_TRUE(li.phase_undefined[0]);
}

TEST(LinearInvert, ScaledCountsGiveSameNormalizedState) {
    const Protocol a = scenario("A");
    const LinearInversion li =
        linear_invert(exact(a, {DensityParams::qubit(600.0, 400.0, 300.0, 1.0), UnknownParams::qubit(std::nullopt)}), a);
    const double n = li.state.scale();
    EXPECT_NEAR(n, 1000.0, 1e-9);
    EXPECT_NEAR(li.state.population[0] / n, 0.6, 1e-12);
    EXPECT_NEAR(li.state.coherence[0] / n, 0.3, 1e-12);
}

TEST(LinearInvert, RefusesProcessUnknowns) { EXPECT_THROW(linear_invert(exact(scenario("B"), kBTruth), scenario("B")), Error); }

TEST(LinearInvert, RankDeficient) {
    Protocol a = scenario("A");
    a.settings[3] = a.settings[2];
    try {
        linear_invert(exact(a, {DensityParams::qubit(0.6, 0.4, 0.3, 1.0), UnknownParams::qubit(std::nullopt)}), a);
        FAIL() << "expected RankDeficient";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::rank_deficient);
    }
}

TEST(ObjectiveEval, ZeroAtTruth) {
    const Protocol b = scenario("B");
    const ObjectiveValue v = objective_eval(pack(b, kBTruth), exact(b, kBTruth), b, kBTruth, Objective::least_squares);
    EXPECT_LE(v.value, 1e-20);
    EXPECT_LT(v.gradient.norm(), 1e-8);
}

TEST(ObjectiveEval, PoissonInfiniteForNonpositiveModel) {
    const Protocol b = scenario("B");
    ParamPoint bad = kBTruth;
    bad.state.population = {0.0, 0.0, 0.0};
    bad.state.coherence = {0.0, 0.0, 0.0};
    const ObjectiveValue v = objective_eval(pack(b, bad), exact(b, kBTruth), b, bad, Objective::poisson_mle);
    EXPECT_TRUE(std::isinf(v.value));
}

TEST(Reconstruct, ScenarioBRoundTrip) {
    const Protocol b = scenario("B");
    const ReconstructionResult r = reconstruct(exact(b, kBTruth), b);
    EXPECT_TRUE(r.converged);
    EXPECT_FALSE(r.singular_at_solution);
    EXPECT_LT(max_error(b, kBTruth, r), 1e-6);
    EXPECT_EQ(r.unknowns.phase_offset[0], 0.0);
}

TEST(Reconstruct, ScenarioBPoissonObjectiveOnExactData) {
    const Protocol b = scenario("B");
    SolverOptions opt;
    opt.objective = Objective::poisson_mle;
    const ReconstructionResult r = reconstruct(exact(b, kBTruth), b, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(max_error(b, kBTruth, r), 1e-6);
}

TEST(Reconstruct, ScenarioVMatchesBlockSolve) {
    const Protocol v = scenario("V");
    auto rng = make_stream(77, 0);
    for (int k = 0; k < 3; ++k) {
        const ParamPoint truth = validation::detail::generic_truth(v, rng);
        const auto counts = exact(v, truth);
        const ReconstructionResult joint = reconstruct(counts, v);
        const ReconstructionResult block = block_solve_v(counts, v);
        EXPECT_TRUE(joint.converged);
        EXPECT_LT(max_error(v, truth, joint), 1e-5);
        EXPECT_LT(max_error(v, truth, block), 1e-6);
        EXPECT_LT(validation::detail::point_error(v, {joint.state, joint.unknowns}, {block.state, block.unknowns}), 1e-6);
    }
}

TEST(Reconstruct, SingularPhaseLocusIsFlagged) {
    const Protocol b = scenario("B");
    const ParamPoint truth{DensityParams::qubit(0.55, 0.45, 0.2, 0.75 * kPi), UnknownParams::qubit(1.3)};
    const ReconstructionResult r = reconstruct(exact(b, truth), b);
    EXPECT_TRUE(!r.converged || r.singular_at_solution);
}

TEST(Reconstruct, ScenarioCRefused) {
    const Protocol c = scenario("C");
    const ParamPoint truth{DensityParams::qubit(0.55, 0.45, 0.2, 2.0), UnknownParams::qubit(1.3, 0.8)};
    try {
        reconstruct(exact(c, truth), c);
        FAIL() << "expected StructuralSingularity";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::structural_singularity);
        EXPECT_NE(std::string(e.what()).find("C-alt"), std::string::npos);
    }
}

TEST(Reconstruct, ScenarioCAltRoundTrip) {
    const Protocol c = scenario("C-alt");
    const ParamPoint truth{DensityParams::qubit(0.55, 0.45, 0.2, 2.0), UnknownParams::qubit(1.3, 0.8)};
    const ReconstructionResult r = reconstruct(exact(c, truth), c);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(max_error(c, truth, r), 1e-6);
}

TEST(Reconstruct, NoisyEstimateIsPhysicalAfterClipping) {
    const Protocol b = scenario("B");
    const auto counts = simulate_counts(kBTruth.state, kBTruth.process, b, {NoiseKind::poisson, 100, 0.0, 3});
    const ReconstructionResult r = reconstruct(counts, b);
    EXPECT_TRUE(is_physical(r.state));
}

TEST(Reconstruct, WrongRecordCount) {
    auto counts = exact(scenario("B"), kBTruth);
    counts.pop_back();
    try {
        reconstruct(counts, scenario("B"));
        FAIL() << "expected DimensionMismatch";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
}

TEST(Reconstruct, Deterministic) {
    const Protocol b = scenario("B");
    const auto counts = simulate_counts(kBTruth.state, kBTruth.process, b, {NoiseKind::poisson, 10000, 0.0, 5});
    const ReconstructionResult r1 = reconstruct(counts, b), r2 = reconstruct(counts, b);
    EXPECT_EQ(r1.state, r2.state);
    EXPECT_EQ(r1.unknowns, r2.unknowns);
    EXPECT_EQ(r1.residual, r2.residual);
}

TEST(BlockSolve, ZeroCoherenceMakesSecondBlockSingular) {
    // With rho02 = 0 the second block admits a one-parameter family of exact
    // fits, so only the first block's coupling is guaranteed.
    const Protocol v = scenario("V");
    ParamPoint truth = v_truth();
    truth.state.coherence[1] = 0.0;
    const ReconstructionResult r = block_solve_v(exact(v, truth), v);
    EXPECT_TRUE(r.singular_at_solution);
    EXPECT_NEAR(*r.unknowns.lambda[0], 1.2, 1e-8);
    const JacobianReport j = numeric_jacobian(v, truth);
    EXPECT_LT(j.abs_det, 1e-12);
}

TEST(BlockSolve, SmallCoherenceStillRecovered) {
    const Protocol v = scenario("V");
    ParamPoint truth = v_truth();
    truth.state.coherence[1] = 0.02;
    const ReconstructionResult r = block_solve_v(exact(v, truth), v);
    EXPECT_LT(max_error(v, truth, r), 1e-6);
    EXPECT_FALSE(r.phase_undefined[1]);
}

TEST(BlockSolve, ThirdBlockSensitiveToLambdas) {
    const Protocol v = scenario("V");
    const ParamPoint truth = v_truth();
    const Eigen::VectorXd obs = predict(v, truth);
    for (int k = 0; k < 2; ++k) {
        ParamPoint off = truth;
        off.process.lambda[k] = *off.process.lambda[k] + 0.1;
        const Eigen::VectorXd diff = (predict(v, off) - obs).segment(9, 2);
        EXPECT_GT(diff.squaredNorm(), 1e-6);
    }
}

TEST(BlockSolve, RejectsOtherProtocols) { EXPECT_THROW(block_solve_v(exact(scenario("B"), kBTruth), scenario("B")), Error); }

TEST(GridOracle, ThenPolish) {
    const Protocol b = scenario("B");
    const auto counts = exact(b, kBTruth);
    const GridOracleResult g = grid_oracle(counts, b, 15, 4);
    EXPECT_LT(validation::detail::point_error(b, kBTruth, g.point), 1e-3);
    const ReconstructionResult r = polish(counts, b, g.point);
    EXPECT_LT(max_error(b, kBTruth, r), 1e-8);
}

TEST(GridOracle, Deterministic) {
    const Protocol b = scenario("B");
    const auto counts = exact(b, kBTruth);
    const GridOracleResult g1 = grid_oracle(counts, b, 9, 2), g2 = grid_oracle(counts, b, 9, 2);
    EXPECT_EQ(g1.point, g2.point);
    EXPECT_EQ(g1.objective, g2.objective);
}

TEST(GridOracle, TooManyDims) {
    const Protocol v = scenario("V");
    try {
        grid_oracle(exact(v, v_truth()), v, 5, 1);
        FAIL() << "expected TooManyDims";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::too_many_dims);
    }
}

}  // namespace
}  // namespace sct
