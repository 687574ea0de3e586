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
#include <limits>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "sct/io.hpp"

namespace sct::io {
namespace {

Errc code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::invalid_range;
}

std::string message_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.what();
    }
    return {};
}

Json b_config() {
    return Json::parse(R"({
      "schema_version": 1, "dim": 2, "scenario": "B", "seed": 5,
      "noise": {"kind": "poisson", "shots": 1000},
      "truth": {"state": {"rho00": 0.55, "rho11": 0.45, "rho01": 0.2, "gamma": 2.0},
                "unknowns": {"lambda_c": 1.3}}
    })");
}

TEST(Protocol, RoundTripIsExact) {
    for (const auto &name : scenario_names()) {
        const Protocol p = scenario(name);
        const Protocol q = protocol_from_json(parse_text(dump(protocol_to_json(p)), "mem"), "");
        EXPECT_EQ(p, q) << name;
        EXPECT_EQ(fingerprint(p), fingerprint(q));
    }
}

TEST(Protocol, FingerprintsDiffer) {
    EXPECT_NE(fingerprint(scenario("B")), fingerprint(scenario("C-alt")));
    EXPECT_EQ(fingerprint(scenario("B")).size(), 16u);
}

TEST(Protocol, FnvReferenceValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Numbers, SeventeenDigitRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, std::numbers::pi, 1e-300, 6.02214076e23, -2.5e-17}) {
        const Json j{{"x", v}};
        EXPECT_EQ(Json::parse(j.dump())["x"].get<double>(), v);
    }
}

TEST(Experiment, Parses) {
    const Experiment e = experiment_from_json(b_config());
    EXPECT_EQ(e.protocol.name, "B");
    EXPECT_EQ(e.noise.kind, NoiseKind::poisson);
    EXPECT_EQ(e.noise.shots, 1000u);
    EXPECT_EQ(e.noise.seed, 5u);
    EXPECT_EQ(*e.truth_unknowns.lambda[0], 1.3);
    EXPECT_EQ(e.truth_state.coherence[0], 0.2);
}

TEST(Experiment, RoundTrip) {
    const Experiment e = experiment_from_json(b_config());
    const Experiment f = experiment_from_json(experiment_to_json(e, false));
    EXPECT_EQ(f.truth_state, e.truth_state);
    EXPECT_EQ(f.truth_unknowns, e.truth_unknowns);
    EXPECT_EQ(f.protocol, e.protocol);
    const Experiment g = experiment_from_json(experiment_to_json(e, true));
    EXPECT_EQ(g.protocol, e.protocol);
}

TEST(Experiment, UnknownFieldNamed) {
    Json j = b_config();
    j["truth"]["state"]["rho22"] = 0.1;
    EXPECT_EQ(code_of([&] { experiment_from_json(j); }), Errc::schema_error);
    EXPECT_NE(message_of([&] { experiment_from_json(j); }).find("truth.state.rho22"), std::string::npos);
}

TEST(Experiment, MissingFieldNamed) {
    Json j = b_config();
    j["truth"]["state"].erase("gamma");
    EXPECT_NE(message_of([&] { experiment_from_json(j); }).find("truth.state.gamma"), std::string::npos);
}

TEST(Experiment, WrongVersion) {
    Json j = b_config();
    j["schema_version"] = 2;
    EXPECT_EQ(code_of([&] { experiment_from_json(j); }), Errc::schema_error);
}

TEST(Experiment, MissingVersion) {
    Json j = b_config();
    j.erase("schema_version");
    EXPECT_EQ(code_of([&] { experiment_from_json(j); }), Errc::schema_error);
}

TEST(Experiment, DimensionConflict) {
    Json j = b_config();
    j["dim"] = 3;
    EXPECT_EQ(code_of([&] { experiment_from_json(j); }), Errc::dimension_mismatch);
}

TEST(Experiment, BadNoiseKind) {
    Json j = b_config();
    j["noise"]["kind"] = "laplace";
    EXPECT_NE(message_of([&] { experiment_from_json(j); }).find("noise.kind"), std::string::npos);
}

TEST(Experiment, ScenarioAndProtocolExclusive) {
    Json j = b_config();
    j["protocol"] = protocol_to_json(scenario("B"));
    EXPECT_EQ(code_of([&] { experiment_from_json(j); }), Errc::schema_error);
}

TEST(Counts, RoundTripIsExact) {
    const Experiment e = experiment_from_json(b_config());
    const CountsFile c{"B", fingerprint(e.protocol), simulate_counts(e.truth_state, e.truth_unknowns, e.protocol, e.noise)};
    const CountsFile d = counts_from_json(parse_text(dump(counts_to_json(c)), "mem"));
    ASSERT_EQ(d.records.size(), c.records.size());
    for (std::size_t k = 0; k < c.records.size(); ++k) {
        EXPECT_EQ(d.records[k].value, c.records[k].value);
        EXPECT_EQ(d.records[k].shots, c.records[k].shots);
        EXPECT_EQ(d.records[k].noise, c.records[k].noise);
    }
    EXPECT_EQ(d.fingerprint, c.fingerprint);
}

TEST(Counts, IndicesStrictlyIncreasing) {
    Json j = Json::parse(R"({"schema_version": 1, "fingerprint": "00",
      "records": [{"setting_index": 1, "value": 0.5, "shots": 0, "noise_kind": "exact"},
                  {"setting_index": 1, "value": 0.5, "shots": 0, "noise_kind": "exact"}]})");
    EXPECT_NE(message_of([&] { counts_from_json(j); }).find("records[1].setting_index"), std::string::npos);
}

TEST(Counts, TruncatedText) {
    const std::string text = dump(Json{{"schema_version", 1}, {"fingerprint", "00"}, {"records", Json::array()}});
    EXPECT_EQ(code_of([&] { parse_text(text.substr(0, text.size() / 2), "counts"); }), Errc::schema_error);
}

TEST(Point, RoundTrip) {
    const ParamPoint pt{DensityParams::qutrit({0.4, 0.35, 0.25}, {0.15, 0.12, 0.1}, {0.3, 0.5, 0.7}),
                        UnknownParams::qutrit(1.2, 0.7)};
    EXPECT_EQ(point_from_json(point_to_json(pt)), pt);
}

TEST(Result, CarriesFingerprintAndGauge) {
    ReconstructionResult r;
    r.state = DensityParams::qubit(0.5, 0.5, 0.1, 0.2);
    r.unknowns = UnknownParams::qubit(1.0);
    r.condition_number = std::numeric_limits<double>::infinity();
    const Json j = result_to_json(r, scenario("B"));
    EXPECT_EQ(j["fingerprint"], fingerprint(scenario("B")));
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_TRUE(j.contains("gauge"));
    EXPECT_NO_THROW(Json::parse(j.dump()));
}

}  // namespace
}  // namespace sct::io
