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

// Plot-ready emission of sweep results.
//
// Files written into the output directory (extension follows the format):
//   records.{csv,json}       one row per ExperimentRecord
//   aggregated.{csv,json}    median/q1/q3/n per (topology, scheme, N, t, metric)
//   holevo_nodes.{csv,json}  median/q1/q3/n per (topology, scheme, N, t, node)
//   failures.{csv,json}      record keys that could not be produced
//   manifest.json            RunManifest
//
// Numbers use 17 significant digits; non-finite values are written as inf, -inf,
// nan (CSV) or the strings "inf", "-inf", "nan" (JSON). Missing metrics are empty
// fields (CSV) or null (JSON).

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qelm/config.hpp"
#include "qelm/harness.hpp"

namespace qelm {

inline constexpr const char *kToolVersion = "0.1.0";

enum class OutputFormat { Csv, Json };

struct RunManifest {
    std::string config_digest;
    std::string tool_version = kToolVersion;
    std::string started;
    std::string finished;
    std::size_t record_count = 0;
    std::size_t failure_count = 0;
};

inline std::string sha256_hex(const std::string &data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest computation failed");
    }
    std::ostringstream ss;
    for (unsigned i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return ss.str();
}

/// Content hash of the resolved config. `threads` is excluded: it never changes results.
inline std::string config_digest(const SweepConfig &c) {
    json j = config_to_json(c);
    j.erase("threads");
    return sha256_hex(j.dump());
}

inline std::string utc_now_rfc3339() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Number formatting

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_number(const std::string &s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("parse_number: trailing characters in '" + s + "'");
    return v;
}

inline json number_to_json(double x) {
    return std::isfinite(x) ? json(x) : json(format_number(x));
}

inline double number_from_json(const json &j) {
    return j.is_string() ? parse_number(j.get<std::string>()) : j.get<double>();
}

// ---------------------------------------------------------------------------
// Records

inline std::size_t max_nodes(const std::vector<ExperimentRecord> &records) {
    std::size_t n = 0;
    for (const auto &r : records) n = std::max(n, r.holevo_per_node.size());
    return n;
}

inline std::vector<std::string> record_csv_header(std::size_t nodes) {
    std::vector<std::string> h{"realization_index", "topology", "scheme",   "n_reservoir", "time",
                               "seed",              "mse",      "condition_number", "otoc_avg", "holevo_avg"};
    for (std::size_t j = 0; j < nodes; ++j) h.push_back("chi_node_" + std::to_string(j));
    return h;
}

inline std::string join_csv(const std::vector<std::string> &fields) {
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out += ',';
        out += fields[k];
    }
    return out;
}

inline std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string optional_field(const std::optional<double> &v) {
    return v ? format_number(*v) : std::string();
}

inline std::string record_csv_row(const ExperimentRecord &r, std::size_t nodes) {
    std::vector<std::string> f{std::to_string(r.realization_index),
                               topology_label(r.topology),
                               scheme_label(r.scheme),
                               std::to_string(r.n_reservoir),
                               format_number(r.time),
                               std::to_string(r.seed),
                               optional_field(r.mse),
                               optional_field(r.condition_number),
                               optional_field(r.otoc_avg),
                               optional_field(r.holevo_avg)};
    for (std::size_t j = 0; j < nodes; ++j) {
        f.push_back(j < r.holevo_per_node.size() ? format_number(r.holevo_per_node[j]) : std::string());
    }
    return join_csv(f);
}

inline void write_records_csv(std::ostream &os, const std::vector<ExperimentRecord> &records) {
    const std::size_t nodes = max_nodes(records);
    os << join_csv(record_csv_header(nodes)) << '\n';
    for (const auto &r : records) os << record_csv_row(r, nodes) << '\n';
}

inline json record_to_json(const ExperimentRecord &r) {
    auto opt = [](const std::optional<double> &v) { return v ? number_to_json(*v) : json(nullptr); };
    json nodes = json::array();
    for (double x : r.holevo_per_node) nodes.push_back(number_to_json(x));
    return {{"realization_index", r.realization_index}, {"topology", topology_label(r.topology)},
            {"scheme", scheme_label(r.scheme)},         {"n_reservoir", r.n_reservoir},
            {"time", number_to_json(r.time)},           {"seed", r.seed},
            {"mse", opt(r.mse)},                        {"condition_number", opt(r.condition_number)},
            {"otoc_avg", opt(r.otoc_avg)},              {"holevo_avg", opt(r.holevo_avg)},
            {"holevo_per_node", nodes}};
}

namespace detail {

inline void set_labels(ExperimentRecord &r, const std::string &topo, const std::string &scheme) {
    if (topo == "RU") {
        r.topology.reset();
    } else {
        auto t = parse_topology(topo);
        if (!t) throw Error("records: unknown topology label '" + topo + "'");
        r.topology = t;
    }
    if (scheme == "none") {
        r.scheme.reset();
    } else {
        auto s = parse_scheme(scheme);
        if (!s) throw Error("records: unknown scheme label '" + scheme + "'");
        r.scheme = s;
    }
}

}  // namespace detail

inline ExperimentRecord record_from_json(const json &j) {
    auto opt = [](const json &v) { return v.is_null() ? std::optional<double>() : number_from_json(v); };
    ExperimentRecord r;
    r.realization_index = j.at("realization_index").get<int>();
    detail::set_labels(r, j.at("topology").get<std::string>(), j.at("scheme").get<std::string>());
    r.n_reservoir = j.at("n_reservoir").get<int>();
    r.time = number_from_json(j.at("time"));
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mse = opt(j.at("mse"));
    r.condition_number = opt(j.at("condition_number"));
    r.otoc_avg = opt(j.at("otoc_avg"));
    r.holevo_avg = opt(j.at("holevo_avg"));
    for (const auto &x : j.at("holevo_per_node")) r.holevo_per_node.push_back(number_from_json(x));
    return r;
}

inline std::vector<ExperimentRecord> read_records_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line)) return {};
    const auto header = split_csv(line);
    if (header.size() < 10 || header[0] != "realization_index") throw Error("records csv: unexpected header");
    std::vector<ExperimentRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw Error("records csv: row has " + std::to_string(f.size()) + " fields");
        auto opt = [](const std::string &s) { return s.empty() ? std::optional<double>() : parse_number(s); };
        ExperimentRecord r;
        r.realization_index = std::stoi(f[0]);
        detail::set_labels(r, f[1], f[2]);
        r.n_reservoir = std::stoi(f[3]);
        r.time = parse_number(f[4]);
        r.seed = std::stoull(f[5]);
        r.mse = opt(f[6]);
        r.condition_number = opt(f[7]);
        r.otoc_avg = opt(f[8]);
        r.holevo_avg = opt(f[9]);
        for (std::size_t j = 10; j < f.size(); ++j) {
            if (!f[j].empty()) r.holevo_per_node.push_back(parse_number(f[j]));
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<ExperimentRecord> read_records_json(std::istream &is) {
    const json doc = json::parse(is);
    std::vector<ExperimentRecord> out;
    for (const auto &j : doc) out.push_back(record_from_json(j));
    return out;
}

// ---------------------------------------------------------------------------
// Aggregates and failures

inline std::string time_label(const std::optional<double> &t) {
    return t ? format_number(*t) : "nan";
}

inline void write_aggregated_csv(std::ostream &os, const std::vector<AggregateRow> &rows) {
    os << "topology,scheme,n_reservoir,time,metric,median,q1,q3,n\n";
    for (const auto &r : rows) {
        os << join_csv({r.key.topology, r.key.scheme, std::to_string(r.key.n_reservoir), time_label(r.key.time),
                        r.metric, format_number(r.stats.median), format_number(r.stats.q1),
                        format_number(r.stats.q3), std::to_string(r.stats.n)})
           << '\n';
    }
}

inline void write_node_csv(std::ostream &os, const std::vector<NodeAggregateRow> &rows) {
    os << "topology,scheme,n_reservoir,time,node,median,q1,q3,n\n";
    for (const auto &r : rows) {
        os << join_csv({r.key.topology, r.key.scheme, std::to_string(r.key.n_reservoir), time_label(r.key.time),
                        std::to_string(r.node), format_number(r.stats.median), format_number(r.stats.q1),
                        format_number(r.stats.q3), std::to_string(r.stats.n)})
           << '\n';
    }
}

inline json stats_to_json(const EnsembleStats &s) {
    return {{"median", number_to_json(s.median)}, {"q1", number_to_json(s.q1)}, {"q3", number_to_json(s.q3)},
            {"n", s.n}};
}

inline json key_to_json(const AggregateKey &k) {
    return {{"topology", k.topology},
            {"scheme", k.scheme},
            {"n_reservoir", k.n_reservoir},
            {"time", k.time ? number_to_json(*k.time) : json("nan")}};
}

inline void write_failures_csv(std::ostream &os, const std::vector<WorkFailure> &failures) {
    os << "realization_index,topology,scheme,n_reservoir,time,message\n";
    for (const auto &f : failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        os << join_csv({std::to_string(f.realization_index), topology_label(f.topology), scheme_label(f.scheme),
                        std::to_string(f.n_reservoir), format_number(f.time), msg})
           << '\n';
    }
}

inline json manifest_to_json(const RunManifest &m) {
    return {{"config_digest", m.config_digest}, {"tool_version", m.tool_version}, {"started", m.started},
            {"finished", m.finished},           {"record_count", m.record_count}, {"failure_count", m.failure_count}};
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline std::ofstream open_output(const std::filesystem::path &p) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + p.string() + "' for writing");
    return os;
}

inline void finish_output(std::ofstream &os, const std::filesystem::path &p) {
    os.flush();
    if (!os) throw Error("write to '" + p.string() + "' failed");
}

}  // namespace detail

/// Writes records, aggregate tables, failures and the manifest into `out_dir`.
inline RunManifest emit_records(const SweepResult &result, const SweepConfig &config, OutputFormat format,
                                const std::filesystem::path &out_dir, std::string started = {}) {
    if (result.records.empty() && result.failures.empty()) {
        throw Error("emit_records: nothing to emit (no records and no failures)");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

    const auto aggregated = aggregate_records(result.records);
    const auto nodes = aggregate_holevo_nodes(result.records);
    const char *ext = format == OutputFormat::Csv ? ".csv" : ".json";

    auto write = [&](const std::string &stem, auto &&body) {
        const auto path = out_dir / (stem + ext);
        auto os = detail::open_output(path);
        body(os);
        detail::finish_output(os, path);
    };

    if (format == OutputFormat::Csv) {
        write("records", [&](std::ostream &os) { write_records_csv(os, result.records); });
        write("aggregated", [&](std::ostream &os) { write_aggregated_csv(os, aggregated); });
        write("holevo_nodes", [&](std::ostream &os) { write_node_csv(os, nodes); });
        write("failures", [&](std::ostream &os) { write_failures_csv(os, result.failures); });
    } else {
        write("records", [&](std::ostream &os) {
            json a = json::array();
            for (const auto &r : result.records) a.push_back(record_to_json(r));
            os << a.dump(1) << '\n';
        });
        write("aggregated", [&](std::ostream &os) {
            json a = json::array();
            for (const auto &r : aggregated) {
                json row = key_to_json(r.key);
                row["metric"] = r.metric;
                row.update(stats_to_json(r.stats));
                a.push_back(row);
            }
            os << a.dump(1) << '\n';
        });
        write("holevo_nodes", [&](std::ostream &os) {
            json a = json::array();
            for (const auto &r : nodes) {
                json row = key_to_json(r.key);
                row["node"] = r.node;
                row.update(stats_to_json(r.stats));
                a.push_back(row);
            }
            os << a.dump(1) << '\n';
        });
        write("failures", [&](std::ostream &os) {
            json a = json::array();
            for (const auto &f : result.failures) {
                a.push_back({{"realization_index", f.realization_index},
                             {"topology", topology_label(f.topology)},
                             {"scheme", scheme_label(f.scheme)},
                             {"n_reservoir", f.n_reservoir},
                             {"time", number_to_json(f.time)},
                             {"message", f.message}});
            }
            os << a.dump(1) << '\n';
        });
    }

    RunManifest m;
    m.config_digest = config_digest(config);
    m.started = started.empty() ? utc_now_rfc3339() : std::move(started);
    m.finished = utc_now_rfc3339();
    m.record_count = result.records.size();
    m.failure_count = result.failures.size();
    const auto mpath = out_dir / "manifest.json";
    auto os = detail::open_output(mpath);
    json mj = manifest_to_json(m);
    mj["config"] = config_to_json(config);
    os << mj.dump(2) << '\n';
    detail::finish_output(os, mpath);
    return m;
}

}  // namespace qelm
