// Copyright 2026 The qelm-scrambling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sweep configuration files: JSON (comments allowed) with nested keys. Every
// key is optional; missing keys take the defaults of SweepConfig. Unknown keys
// are rejected unless `lax` is set, in which case they produce warnings.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qelm/error.hpp"
#include "qelm/harness.hpp"

namespace qelm {

using json = nlohmann::json;

namespace detail {

inline std::string join_path(const std::string &prefix, const std::string &key) {
    return prefix.empty() ? key : prefix + "." + key;
}

class ConfigReader {
  public:
    ConfigReader(bool lax, std::vector<std::string> *warnings) : lax_(lax), warnings_(warnings) {
    }

    void check_keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed) {
        if (!obj.is_object()) {
            throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto &[k, v] : obj.items()) {
            if (ok.count(k)) continue;
            const std::string full = join_path(path, k);
            if (!lax_) throw ConfigError(full, "unknown key");
            if (warnings_) warnings_->push_back("ignoring unknown key '" + full + "'");
        }
    }

    static double number(const json &v, const std::string &field) {
        if (!v.is_number()) throw ConfigError(field, "expected a number");
        return v.get<double>();
    }

    static std::int64_t integer(const json &v, const std::string &field) {
        if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
        return v.get<std::int64_t>();
    }

    static int small_int(const json &v, const std::string &field) {
        const auto x = integer(v, field);
        if (x < -(1ll << 30) || x > (1ll << 30)) throw ConfigError(field, "integer out of range");
        return static_cast<int>(x);
    }

    static std::uint64_t unsigned_int(const json &v, const std::string &field) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError(field, "expected a nonnegative integer");
    }

    static bool boolean(const json &v, const std::string &field) {
        if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
        return v.get<bool>();
    }

    static std::string string(const json &v, const std::string &field) {
        if (!v.is_string()) throw ConfigError(field, "expected a string");
        return v.get<std::string>();
    }

    static const json &array(const json &v, const std::string &field) {
        if (!v.is_array()) throw ConfigError(field, "expected an array");
        return v;
    }

    static Interval interval(const json &v, const std::string &field) {
        if (!v.is_array() || v.size() != 2) throw ConfigError(field, "expected [lo, hi]");
        return {number(v[0], field), number(v[1], field)};
    }

    static std::vector<double> times(const json &v, const std::string &field) {
        if (v.is_array()) {
            std::vector<double> g;
            for (const auto &x : v) g.push_back(number(x, field));
            return g;
        }
        if (v.is_object()) {
            for (const auto &[k, x] : v.items()) {
                if (k != "start" && k != "stop" && k != "points") throw ConfigError(join_path(field, k), "unknown key");
            }
            if (!v.contains("start") || !v.contains("stop") || !v.contains("points")) {
                throw ConfigError(field, "range form needs start, stop and points");
            }
            const int pts = small_int(v["points"], join_path(field, "points"));
            if (pts < 1) throw ConfigError(join_path(field, "points"), "must be >= 1");
            return uniform_grid(number(v["start"], join_path(field, "start")), number(v["stop"], join_path(field, "stop")),
                                pts);
        }
        throw ConfigError(field, "expected an array of times or {start, stop, points}");
    }

    static std::vector<Topology> topologies(const json &v, const std::string &field) {
        std::vector<Topology> out;
        for (const auto &x : array(v, field)) {
            auto t = parse_topology(string(x, field));
            if (!t) throw ConfigError(field, "unknown topology '" + x.get<std::string>() + "' (use C, R, FC)");
            out.push_back(*t);
        }
        return out;
    }

    static std::vector<CouplingScheme> schemes(const json &v, const std::string &field) {
        std::vector<CouplingScheme> out;
        for (const auto &x : array(v, field)) {
            auto s = parse_scheme(string(x, field));
            if (!s) throw ConfigError(field, "unknown coupling scheme '" + x.get<std::string>() + "' (use SL, ML)");
            out.push_back(*s);
        }
        return out;
    }

  private:
    bool lax_;
    std::vector<std::string> *warnings_;
};

inline std::pair<int, int> line_and_column(const std::string &text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

inline ShotMode parse_shot_mode(const std::string &s, const std::string &field) {
    if (s == "exact") return ShotMode::Exact;
    if (s == "joint_bitstrings") return ShotMode::JointBitstrings;
    if (s == "independent_binomial") return ShotMode::IndependentBinomial;
    throw ConfigError(field, "unknown shot mode '" + s + "' (use exact, joint_bitstrings, independent_binomial)");
}

inline MetricSet parse_metric_list(const std::vector<std::string> &names, const std::string &field) {
    MetricSet out;
    for (const auto &n : names) {
        auto m = parse_metric(n);
        if (!m) throw ConfigError(field, "unknown metric '" + n + "'");
        out.insert(*m);
    }
    return out;
}

/// Resolved config from an already-parsed JSON document.
inline SweepConfig config_from_json(const json &doc, bool lax = false, std::vector<std::string> *warnings = nullptr) {
    using R = detail::ConfigReader;
    R rd(lax, warnings);
    SweepConfig c;
    if (doc.is_null()) return c;
    rd.check_keys(doc, "",
                  {"n_reservoir", "topologies", "schemes", "time_grid", "n_realizations", "n_train", "n_test", "shots",
                   "master_seed", "rcond", "log_base", "include_haar_baseline", "metrics", "bias_row",
                   "otoc_normalization", "coupling", "reservoir_initial_state", "max_qubits", "size_sweep",
                   "threads"});
    if (doc.contains("n_reservoir")) c.n_reservoir = R::small_int(doc["n_reservoir"], "n_reservoir");
    if (doc.contains("topologies")) c.topologies = R::topologies(doc["topologies"], "topologies");
    if (doc.contains("schemes")) c.schemes = R::schemes(doc["schemes"], "schemes");
    if (doc.contains("time_grid")) c.time_grid = R::times(doc["time_grid"], "time_grid");
    if (doc.contains("n_realizations")) c.n_realizations = R::small_int(doc["n_realizations"], "n_realizations");
    if (doc.contains("n_train")) c.n_train = R::small_int(doc["n_train"], "n_train");
    if (doc.contains("n_test")) c.n_test = R::small_int(doc["n_test"], "n_test");
    if (doc.contains("shots")) {
        const json &s = doc["shots"];
        rd.check_keys(s, "shots", {"mode", "count"});
        if (s.contains("mode")) c.shot_model.mode = parse_shot_mode(R::string(s["mode"], "shots.mode"), "shots.mode");
        if (s.contains("count")) c.shot_model.shots = R::integer(s["count"], "shots.count");
    }
    if (doc.contains("master_seed")) c.master_seed = R::unsigned_int(doc["master_seed"], "master_seed");
    if (doc.contains("rcond") && !doc["rcond"].is_null()) c.rcond = R::number(doc["rcond"], "rcond");
    if (doc.contains("log_base")) {
        const json &b = doc["log_base"];
        if (b == 2 || b == "2") {
            c.log_base = LogBase::Two;
        } else if (b == "e") {
            c.log_base = LogBase::E;
        } else {
            throw ConfigError("log_base", "expected 2 or \"e\"");
        }
    }
    if (doc.contains("include_haar_baseline"))
        c.include_haar_baseline = R::boolean(doc["include_haar_baseline"], "include_haar_baseline");
    if (doc.contains("metrics")) {
        std::vector<std::string> names;
        for (const auto &x : R::array(doc["metrics"], "metrics")) names.push_back(R::string(x, "metrics"));
        c.metrics = parse_metric_list(names, "metrics");
    }
    if (doc.contains("bias_row")) c.bias_row = R::boolean(doc["bias_row"], "bias_row");
    if (doc.contains("otoc_normalization")) {
        const auto s = R::string(doc["otoc_normalization"], "otoc_normalization");
        if (s == "full") {
            c.otoc_normalization = OtocNormalization::FullSpace;
        } else if (s == "reservoir") {
            c.otoc_normalization = OtocNormalization::ReservoirOnly;
        } else {
            throw ConfigError("otoc_normalization", "expected \"full\" or \"reservoir\"");
        }
    }
    if (doc.contains("coupling")) {
        const json &s = doc["coupling"];
        rd.check_keys(s, "coupling", {"j_range", "delta_range"});
        if (s.contains("j_range")) c.j_range = R::interval(s["j_range"], "coupling.j_range");
        if (s.contains("delta_range")) c.delta_range = R::interval(s["delta_range"], "coupling.delta_range");
    }
    if (doc.contains("reservoir_initial_state"))
        c.reservoir_initial_state = R::unsigned_int(doc["reservoir_initial_state"], "reservoir_initial_state");
    if (doc.contains("max_qubits")) c.max_qubits = R::small_int(doc["max_qubits"], "max_qubits");
    if (doc.contains("size_sweep")) {
        const json &s = doc["size_sweep"];
        rd.check_keys(s, "size_sweep", {"sizes", "times", "schemes"});
        if (s.contains("sizes")) {
            c.size_sweep.sizes.clear();
            for (const auto &x : R::array(s["sizes"], "size_sweep.sizes"))
                c.size_sweep.sizes.push_back(R::small_int(x, "size_sweep.sizes"));
        }
        if (s.contains("times")) c.size_sweep.times = R::times(s["times"], "size_sweep.times");
        if (s.contains("schemes")) c.size_sweep.schemes = R::schemes(s["schemes"], "size_sweep.schemes");
    }
    if (doc.contains("threads")) c.threads = R::small_int(doc["threads"], "threads");
    validate(c);
    return c;
}

/// Parses config text; an empty (or whitespace-only) document yields the defaults.
inline SweepConfig parse_config_text(const std::string &text, bool lax = false,
                                     std::vector<std::string> *warnings = nullptr) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        SweepConfig c;
        validate(c);
        return c;
    }
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error &e) {
        const auto [line, col] = detail::line_and_column(text, e.byte);
        throw ConfigError("", "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                                  ": " + e.what());
    }
    return config_from_json(doc, lax, warnings);
}

inline SweepConfig parse_config(const std::string &path, bool lax = false,
                                std::vector<std::string> *warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), lax, warnings);
}

/// Fully materialized config, the input to the run digest.
inline json config_to_json(const SweepConfig &c) {
    json j;
    j["n_reservoir"] = c.n_reservoir;
    j["topologies"] = json::array();
    for (Topology t : c.topologies) j["topologies"].push_back(to_string(t));
    j["schemes"] = json::array();
    for (CouplingScheme s : c.schemes) j["schemes"].push_back(to_string(s));
    j["time_grid"] = c.time_grid;
    j["n_realizations"] = c.n_realizations;
    j["n_train"] = c.n_train;
    j["n_test"] = c.n_test;
    j["shots"] = {{"mode", to_string(c.shot_model.mode)}, {"count", c.shot_model.shots}};
    j["master_seed"] = c.master_seed;
    j["rcond"] = c.rcond ? json(*c.rcond) : json(nullptr);
    j["log_base"] = c.log_base == LogBase::Two ? json(2) : json("e");
    j["include_haar_baseline"] = c.include_haar_baseline;
    j["metrics"] = json::array();
    for (Metric m : kAllMetrics)
        if (c.metrics.contains(m)) j["metrics"].push_back(to_string(m));
    j["bias_row"] = c.bias_row;
    j["otoc_normalization"] = to_string(c.otoc_normalization);
    j["coupling"] = {{"j_range", {c.j_range.lo, c.j_range.hi}}, {"delta_range", {c.delta_range.lo, c.delta_range.hi}}};
    j["reservoir_initial_state"] = c.reservoir_initial_state;
    j["max_qubits"] = c.max_qubits;
    json sizes = json::array();
    for (int n : c.size_sweep.sizes) sizes.push_back(n);
    json sschemes = json::array();
    for (CouplingScheme s : c.size_sweep.schemes) sschemes.push_back(to_string(s));
    j["size_sweep"] = {{"sizes", sizes}, {"times", c.size_sweep.times}, {"schemes", sschemes}};
    j["threads"] = c.threads;
    return j;
}

}  // namespace qelm
