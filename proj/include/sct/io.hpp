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

// JSON file schemas: experiment configs, protocols, evaluation points,
// counts and reconstruction results. Every object is checked for missing,
// mistyped and unknown fields; errors name the offending field path.

#ifndef SCT_IO_HPP
#define SCT_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sct/error.hpp"
#include "sct/forward.hpp"
#include "sct/invert.hpp"
#include "sct/protocol.hpp"

namespace sct::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

[[noreturn]] inline void schema_fail(const std::string &path, const std::string &what) {
    throw Error(Errc::schema_error, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

/// Typed, path-aware view of one JSON object that rejects unknown keys.
class Reader {
  public:
    Reader(const Json &j, std::string path, std::initializer_list<const char *> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) schema_fail(path_, "expected an object");
        std::set<std::string> ok;
        for (const char *a : allowed) ok.insert(a);
        for (const auto &item : j_.items()) {
            if (!ok.count(item.key())) schema_fail(field(item.key()), "unknown field");
        }
    }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string &key) const { return j_.contains(key); }

    const Json &at(const std::string &key) const {
        if (!j_.contains(key)) schema_fail(field(key), "missing field");
        return j_.at(key);
    }

    double number(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_number()) schema_fail(field(key), "expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_number_integer()) schema_fail(field(key), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            schema_fail(field(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_string()) schema_fail(field(key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_boolean()) schema_fail(field(key), "expected a boolean");
        return v.get<bool>();
    }

    const Json &array(const std::string &key) const {
        const Json &v = at(key);
        if (!v.is_array()) schema_fail(field(key), "expected an array");
        return v;
    }

  private:
    const Json &j_;
    std::string path_;
};

inline void check_version(const Reader &r) {
    if (r.integer("schema_version") != kSchemaVersion) {
        schema_fail(r.field("schema_version"), "unsupported version (expected 1)");
    }
}

inline int read_dim(const Reader &r, const std::string &key = "dim") {
    const auto d = r.integer(key);
    if (d != 2 && d != 3) schema_fail(r.field(key), "dim must be 2 or 3");
    return static_cast<int>(d);
}

inline std::array<double, 2> read_pair(const Json &v, const std::string &path) {
    if (!v.is_array() || v.size() != 2) schema_fail(path, "expected an array of 2 numbers");
    std::array<double, 2> out{};
    for (std::size_t k = 0; k < 2; ++k) {
        if (!v[k].is_number()) schema_fail(path + "[" + std::to_string(k) + "]", "expected a number");
        out[k] = v[k].get<double>();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parameter blocks. State and process objects are keyed by parameter name
// (rho00, rho01, gamma, lambda_c, ...).

inline Json state_to_json(const DensityParams &s) {
    Json j = Json::object();
    for (ParamId id : all_params(s.dim)) {
        if (id.kind == ParamKind::lambda) continue;
        ParamPoint pt;
        pt.state = s;
        j[param_name(s.dim, id)] = get_param(pt, id);
    }
    return j;
}

inline DensityParams state_from_json(const Json &j, int dim, const std::string &path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    ParamPoint pt;
    pt.state.dim = dim;
    std::set<std::string> known;
    for (ParamId id : all_params(dim)) {
        if (id.kind != ParamKind::lambda) known.insert(param_name(dim, id));
    }
    for (const auto &item : j.items()) {
        if (!known.count(item.key())) schema_fail(path + "." + item.key(), "unknown field");
    }
    for (ParamId id : all_params(dim)) {
        if (id.kind == ParamKind::lambda) continue;
        const std::string name = param_name(dim, id);
        const std::string p = path + "." + name;
        if (!j.contains(name)) schema_fail(p, "missing field");
        if (!j.at(name).is_number()) schema_fail(p, "expected a number");
        set_param(pt, id, j.at(name).get<double>());
    }
    try {
        validate(pt.state);
    } catch (const Error &e) {
        schema_fail(path, e.what());
    }
    pt.state.canonicalize();
    return pt.state;
}

inline Json unknowns_to_json(const UnknownParams &u) {
    Json j = Json::object();
    for (int k = 0; k < 2; ++k) {
        if (u.lambda[k]) j[param_name(u.dim, {ParamKind::lambda, k})] = *u.lambda[k];
    }
    if (u.phase_offset[0] != 0.0 || u.phase_offset[1] != 0.0) j["phase_offset"] = u.phase_offset;
    return j;
}

inline UnknownParams unknowns_from_json(const Json &j, int dim, const std::string &path) {
    const std::string l0 = param_name(dim, {ParamKind::lambda, 0}), l1 = param_name(dim, {ParamKind::lambda, 1});
    Reader r(j, path, {l0.c_str(), l1.c_str(), "phase_offset"});
    UnknownParams u;
    u.dim = dim;
    for (const auto &item : j.items()) {
        const std::string &key = item.key();
        if (key == l0 || key == l1) {
            const double v = r.number(key);
            if (!(v >= 0.0)) schema_fail(r.field(key), "must be non-negative");
            u.lambda[key == l0 ? 0 : 1] = v;
        } else if (key == "phase_offset") {
            u.phase_offset = read_pair(item.value(), r.field(key));
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Protocols.

inline Json setting_to_json(const MeasurementSetting &s) {
    return Json{{"multiplier", s.multiplier}, {"control_phase", s.control_phase}, {"m_z", s.m_z}, {"label", s.label}};
}

inline Json param_list_to_json(int dim, const std::vector<ParamId> &ids) {
    Json a = Json::array();
    for (ParamId id : ids) a.push_back(param_name(dim, id));
    return a;
}

inline std::vector<ParamId> param_list_from_json(const Json &v, int dim, const std::string &path) {
    if (!v.is_array()) schema_fail(path, "expected an array of parameter names");
    std::vector<ParamId> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string p = path + "[" + std::to_string(k) + "]";
        if (!v[k].is_string()) schema_fail(p, "expected a string");
        try {
            out.push_back(parse_param(dim, v[k].get<std::string>()));
        } catch (const Error &e) {
            schema_fail(p, e.what());
        }
    }
    return out;
}

/// Canonical protocol object; the fingerprint is computed over its dump.
inline Json protocol_to_json(const Protocol &p) {
    Json settings = Json::array();
    for (const auto &s : p.settings) settings.push_back(setting_to_json(s));
    Json known = Json::object();
    for (int k = 0; k < 2; ++k) {
        if (p.known_lambda[k]) known[param_name(p.dim, {ParamKind::lambda, k})] = *p.known_lambda[k];
    }
    Json blocks = Json::array();
    for (const auto &b : p.blocks) {
        blocks.push_back(Json{{"first_setting", b.first_setting},
                              {"num_settings", b.num_settings},
                              {"unknowns", param_list_to_json(p.dim, b.unknowns)}});
    }
    return Json{{"name", p.name},
                {"dim", p.dim},
                {"settings", settings},
                {"unknowns", param_list_to_json(p.dim, p.unknowns)},
                {"known_lambda", known},
                {"phase_known", p.phase_known},
                {"artifact_extension", p.artifact_extension},
                {"blocks", blocks}};
}

inline Protocol protocol_from_json(const Json &j, const std::string &path, bool allow_version = false) {
    Reader r = allow_version ? Reader(j, path,
                                      {"schema_version", "name", "dim", "settings", "unknowns", "known_lambda",
                                       "phase_known", "artifact_extension", "blocks"})
                             : Reader(j, path,
                                      {"name", "dim", "settings", "unknowns", "known_lambda", "phase_known",
                                       "artifact_extension", "blocks"});
    if (allow_version) check_version(r);
    Protocol p;
    p.name = r.string("name");
    p.dim = read_dim(r);
    const Json &settings = r.array("settings");
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const std::string sp = r.field("settings") + "[" + std::to_string(k) + "]";
        Reader s(settings[k], sp, {"multiplier", "control_phase", "m_z", "label"});
        MeasurementSetting m;
        m.multiplier = read_pair(s.at("multiplier"), s.field("multiplier"));
        m.control_phase = read_pair(s.at("control_phase"), s.field("control_phase"));
        m.m_z = s.has("m_z") ? s.number("m_z") : 0.0;
        m.label = static_cast<int>(s.integer("label"));
        p.settings.push_back(m);
    }
    p.unknowns = param_list_from_json(r.at("unknowns"), p.dim, r.field("unknowns"));
    if (r.has("known_lambda")) {
        const Json &kl = r.at("known_lambda");
        if (!kl.is_object()) schema_fail(r.field("known_lambda"), "expected an object");
        for (const auto &item : kl.items()) {
            const std::string kp = r.field("known_lambda") + "." + item.key();
            ParamId id{};
            try {
                id = parse_param(p.dim, item.key());
            } catch (const Error &) {
                schema_fail(kp, "unknown field");
            }
            if (id.kind != ParamKind::lambda) schema_fail(kp, "not a lambda");
            if (!item.value().is_number()) schema_fail(kp, "expected a number");
            p.known_lambda[id.index] = item.value().get<double>();
        }
    }
    if (r.has("phase_known")) p.phase_known = r.boolean("phase_known");
    if (r.has("artifact_extension")) p.artifact_extension = r.boolean("artifact_extension");
    if (r.has("blocks")) {
        const Json &blocks = r.array("blocks");
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const std::string bp = r.field("blocks") + "[" + std::to_string(k) + "]";
            Reader b(blocks[k], bp, {"first_setting", "num_settings", "unknowns"});
            ProtocolBlock blk;
            blk.first_setting = static_cast<int>(b.integer("first_setting"));
            blk.num_settings = static_cast<int>(b.integer("num_settings"));
            blk.unknowns = param_list_from_json(b.at("unknowns"), p.dim, b.field("unknowns"));
            if (blk.first_setting < 0 || blk.num_settings < 0 ||
                static_cast<std::size_t>(blk.first_setting + blk.num_settings) > p.settings.size()) {
                schema_fail(bp, "block exceeds the setting list");
            }
            p.blocks.push_back(blk);
        }
    }
    try {
        validate(p);
        block_column_order(p);
    } catch (const Error &e) {
        schema_fail(path, e.what());
    }
    return p;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fingerprint(const Protocol &p) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(protocol_to_json(p).dump())));
    return buf;
}

// ---------------------------------------------------------------------------
// Files.

inline Json parse_text(const std::string &text, const std::string &what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw Error(Errc::schema_error, what + ": parse error: " + e.what());
    }
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::schema_error, path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::schema_error, path + ": cannot open for writing");
    out << text;
    if (!out) throw Error(Errc::schema_error, path + ": write failed");
}

inline std::string dump(const Json &j) { return j.dump(2) + "\n"; }

/// Scenario name or path to a protocol file.
inline Protocol load_protocol(const std::string &name_or_path) {
    if (is_scenario_name(name_or_path)) return scenario(name_or_path);
    return protocol_from_json(parse_text(read_file(name_or_path), name_or_path), "", true);
}

struct Experiment {
    Protocol protocol;
    DensityParams truth_state;
    UnknownParams truth_unknowns;
    NoiseModel noise;
};

inline Json noise_to_json(const NoiseModel &n) {
    Json j{{"kind", to_string(n.kind)}};
    if (n.kind == NoiseKind::poisson) j["shots"] = n.shots;
    if (n.kind == NoiseKind::gaussian) j["sigma"] = n.sigma;
    return j;
}

inline Json experiment_to_json(const Experiment &e, bool inline_protocol) {
    Json j{{"schema_version", kSchemaVersion},
           {"dim", e.protocol.dim},
           {"truth", Json{{"state", state_to_json(e.truth_state)}, {"unknowns", unknowns_to_json(e.truth_unknowns)}}},
           {"noise", noise_to_json(e.noise)},
           {"seed", e.noise.seed}};
    if (inline_protocol) {
        j["protocol"] = protocol_to_json(e.protocol);
    } else {
        j["scenario"] = e.protocol.name;
    }
    return j;
}

/// Parses an experiment config. Dimension conflicts between the declared
/// dim and the protocol raise DimensionMismatch.
inline Experiment experiment_from_json(const Json &j) {
    Reader r(j, "", {"schema_version", "dim", "scenario", "protocol", "truth", "noise", "seed"});
    check_version(r);
    const int dim = read_dim(r);
    Experiment e;
    if (r.has("scenario") == r.has("protocol")) schema_fail("scenario", "give exactly one of scenario, protocol");
    if (r.has("scenario")) {
        const std::string name = r.string("scenario");
        if (!is_scenario_name(name)) schema_fail("scenario", "unknown scenario '" + name + "'");
        e.protocol = scenario(name);
    } else {
        e.protocol = protocol_from_json(r.at("protocol"), "protocol");
    }
    if (e.protocol.dim != dim) {
        throw Error(Errc::dimension_mismatch, "dim " + std::to_string(dim) + " does not match protocol '" +
                                                  e.protocol.name + "' (dim " + std::to_string(e.protocol.dim) + ")");
    }
    Reader truth(r.at("truth"), "truth", {"state", "unknowns"});
    e.truth_state = state_from_json(truth.at("state"), dim, "truth.state");
    e.truth_unknowns = truth.has("unknowns") ? unknowns_from_json(truth.at("unknowns"), dim, "truth.unknowns")
                                             : UnknownParams{dim, {}, {}};
    if (r.has("noise")) {
        Reader n(r.at("noise"), "noise", {"kind", "shots", "sigma"});
        try {
            e.noise.kind = parse_noise_kind(n.string("kind"));
        } catch (const Error &err) {
            schema_fail("noise.kind", err.what());
        }
        if (n.has("shots")) e.noise.shots = n.unsigned_integer("shots");
        if (n.has("sigma")) e.noise.sigma = n.number("sigma");
        if (e.noise.kind == NoiseKind::poisson && e.noise.shots == 0) schema_fail("noise.shots", "must be positive");
        if (e.noise.kind == NoiseKind::gaussian && !(e.noise.sigma >= 0.0)) {
            schema_fail("noise.sigma", "must be non-negative");
        }
    }
    if (r.has("seed")) e.noise.seed = r.unsigned_integer("seed");
    return e;
}

struct CountsFile {
    std::string protocol_name;
    std::string fingerprint;
    std::vector<CountRecord> records;
};

inline Json counts_to_json(const CountsFile &c) {
    Json records = Json::array();
    for (const auto &rec : c.records) {
        records.push_back(Json{{"setting_index", rec.setting_index},
                               {"value", rec.value},
                               {"shots", rec.shots},
                               {"noise_kind", to_string(rec.noise)}});
    }
    return Json{{"schema_version", kSchemaVersion},
                {"protocol", c.protocol_name},
                {"fingerprint", c.fingerprint},
                {"records", records}};
}

inline CountsFile counts_from_json(const Json &j) {
    Reader r(j, "", {"schema_version", "protocol", "fingerprint", "records"});
    check_version(r);
    CountsFile c;
    c.protocol_name = r.has("protocol") ? r.string("protocol") : std::string();
    c.fingerprint = r.string("fingerprint");
    const Json &records = r.array("records");
    int previous = -1;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const std::string p = "records[" + std::to_string(k) + "]";
        Reader rr(records[k], p, {"setting_index", "value", "shots", "noise_kind"});
        CountRecord rec;
        rec.setting_index = static_cast<int>(rr.integer("setting_index"));
        if (rec.setting_index <= previous) schema_fail(rr.field("setting_index"), "must be strictly increasing");
        previous = rec.setting_index;
        rec.value = rr.number("value");
        rec.shots = rr.has("shots") ? rr.unsigned_integer("shots") : 0;
        try {
            rec.noise = parse_noise_kind(rr.string("noise_kind"));
        } catch (const Error &err) {
            schema_fail(rr.field("noise_kind"), err.what());
        }
        c.records.push_back(rec);
    }
    return c;
}

inline Json point_to_json(const ParamPoint &pt) {
    return Json{{"schema_version", kSchemaVersion},
                {"dim", pt.state.dim},
                {"state", state_to_json(pt.state)},
                {"unknowns", unknowns_to_json(pt.process)}};
}

inline ParamPoint point_from_json(const Json &j) {
    Reader r(j, "", {"schema_version", "dim", "state", "unknowns"});
    check_version(r);
    const int dim = read_dim(r);
    ParamPoint pt;
    pt.state = state_from_json(r.at("state"), dim, "state");
    pt.process = r.has("unknowns") ? unknowns_from_json(r.at("unknowns"), dim, "unknowns") : UnknownParams{dim, {}, {}};
    return pt;
}

inline Json result_to_json(const ReconstructionResult &res, const Protocol &p) {
    Json undefined = Json::array();
    for (int k = 0; k < num_pairs(p.dim); ++k) {
        if (res.phase_undefined[k]) undefined.push_back(param_name(p.dim, {ParamKind::phase, k}));
    }
    Json j{{"schema_version", kSchemaVersion},
           {"protocol", p.name},
           {"fingerprint", fingerprint(p)},
           {"dim", p.dim},
           {"objective", to_string(res.objective)},
           {"state", state_to_json(res.state)},
           {"unknowns", unknowns_to_json(res.unknowns)},
           {"gauge", "reference couplings real and positive"},
           {"residual", res.residual},
           {"jacobian_abs_det", res.jacobian_abs_det},
           {"condition_number", res.condition_number},
           {"singular_at_solution", res.singular_at_solution},
           {"converged", res.converged},
           {"gradient_norm", res.gradient_norm},
           {"n_starts", res.n_starts},
           {"best_start", res.best_start},
           {"iterations", res.iterations},
           {"min_eigenvalue", res.min_eigenvalue},
           {"clip_magnitude", res.clip_magnitude},
           {"phase_undefined", undefined}};
    if (res.failed_block) j["failed_block"] = *res.failed_block;
    return j;
}

}  // namespace sct::io

#endif  // SCT_IO_HPP
