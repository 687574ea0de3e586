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


#include <numbers>

#include <gtest/gtest.h>

#include "sct/protocol.hpp"

namespace sct {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Scenario, Sizes) {
    EXPECT_EQ(scenario("A").settings.size(), 4u);
    EXPECT_EQ(scenario("A").unknowns.size(), 4u);
    EXPECT_EQ(scenario("B").settings.size(), 5u);
    EXPECT_EQ(scenario("B").unknowns.size(), 5u);
    EXPECT_EQ(scenario("C").settings.size(), 6u);
    EXPECT_EQ(scenario("C").unknowns.size(), 6u);
    EXPECT_EQ(scenario("V").settings.size(), 11u);
    EXPECT_EQ(scenario("V").unknowns.size(), 11u);
}

TEST(Scenario, OnlyTheVariantIsMarkedAsExtension) {
    for (const auto &name : scenario_names()) {
        EXPECT_EQ(scenario(name).artifact_extension, name == "C-alt") << name;
    }
}

TEST(Scenario, CanonicalOrderForB) {
    const Protocol b = scenario("B");
    std::vector<std::string> names;
    for (ParamId id : b.unknowns) names.push_back(param_name(2, id));
    EXPECT_EQ(names, (std::vector<std::string>{"rho00", "rho01", "rho11", "lambda_c", "gamma"}));
}

TEST(Scenario, VBlocksCoverEveryUnknownOnce) {
    const Protocol v = scenario("V");
    const auto order = block_column_order(v);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < 11; ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k)], k);
}

TEST(Scenario, Unknown) {
    try {
        scenario("D");
        FAIL() << "expected UnknownScenario";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::unknown_scenario);
    }
}

TEST(Scenario, AllValidate) {
    for (const auto &name : scenario_names()) EXPECT_NO_THROW(validate(scenario(name))) << name;
}

TEST(Resolve, MultiplierScalesLambda) {
    MeasurementSetting s;
    s.multiplier = {2.0, 0.0};
    const GeneratorParams g = resolve(s, UnknownParams::qubit(0.9));
    EXPECT_NEAR(g.coupling[0], 1.8, 1e-15);
}

TEST(Resolve, ZeroMultiplierNeedsNoLambda) {
    MeasurementSetting s;
    const GeneratorParams g = resolve(s, UnknownParams::qubit(std::nullopt));
    EXPECT_EQ(g.coupling[0], 0.0);
    EXPECT_EQ(g.h_z, 0.0);
}

TEST(Resolve, VTypeSetting) {
    MeasurementSetting s;
    s.multiplier = {1.0, 1.0};
    s.control_phase = {0.0, kPi / 2.0};
    s.label = 1;
    const GeneratorParams g = resolve(s, UnknownParams::qutrit(1.2, 0.7));
    EXPECT_NEAR(g.coupling[0], 1.2, 1e-15);
    EXPECT_NEAR(g.coupling[1], 0.7, 1e-15);
    EXPECT_NEAR(g.phi[0], 0.0, 1e-15);
    EXPECT_NEAR(g.phi[1], kPi / 2.0, 1e-15);
}

TEST(Resolve, MissingLambda) {
    MeasurementSetting s;
    s.multiplier = {1.0, 0.0};
    try {
        resolve(s, UnknownParams::qubit(std::nullopt));
        FAIL() << "expected MissingUnknown";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::missing_unknown);
    }
}

TEST(Resolve, PhaseOffsetAddsToControlPhase) {
    MeasurementSetting s;
    s.multiplier = {1.0, 0.0};
    s.control_phase = {0.5, 0.0};
    UnknownParams u = UnknownParams::qubit(1.0);
    u.phase_offset = {0.25, 0.0};
    EXPECT_NEAR(resolve(s, u).phi[0], 0.75, 1e-15);
}

TEST(Params, NamesRoundTrip) {
    for (int dim : {2, 3}) {
        for (ParamId id : all_params(dim)) EXPECT_EQ(parse_param(dim, param_name(dim, id)), id);
    }
}

TEST(Params, PackUnpackRoundTrip) {
    const Protocol v = scenario("V");
    const ParamPoint pt{DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7}),
                        UnknownParams::qutrit(1.2, 0.7)};
    EXPECT_EQ(unpack(v, pack(v, pt), pt), pt);
    const Eigen::VectorXd x = pack(v, pt);
    EXPECT_EQ(x(9), 1.2);
    EXPECT_EQ(x(10), 0.7);
}

TEST(Validate, RejectsTooFewSettings) {
    Protocol p = scenario("B");
    p.settings.pop_back();
    EXPECT_THROW(validate(p), Error);
}

TEST(Validate, RejectsDuplicateUnknown) {
    Protocol p = scenario("B");
    p.unknowns.push_back(p.unknowns.front());
    p.settings.push_back(p.settings.front());
    EXPECT_THROW(validate(p), Error);
}

TEST(Validate, RejectsBadLabel) {
    Protocol p = scenario("A");
    p.settings[0].label = 2;
    EXPECT_THROW(validate(p), Error);
}

}  // namespace
}  // namespace sct
