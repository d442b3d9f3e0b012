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

// qelm: run reservoir sweeps and write plot-ready tables.
//
// Exit status: 0 success, 1 usage error, 2 config error, 3 runtime failure,
// 4 partial failure (some records could not be produced).

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qelm/config.hpp"
#include "qelm/output.hpp"
#include "qelm/qelm.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3, kPartial = 4 };

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> metrics;
    std::optional<int> realizations;
    std::optional<std::int64_t> shots;
    bool lax = false;
};

void add_common(CLI::App *cmd, CommonOptions &o) {
    cmd->add_option("--config", o.config_path, "JSON config file (comments allowed); defaults when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory (default: $QELM_OUT_DIR or ./qelm_out)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
    cmd->add_option("--metrics", o.metrics, "comma-separated subset of mse,otoc,holevo,holevo_per_node,condition_number");
    cmd->add_option("--realizations", o.realizations, "ensemble size per parameter point");
    cmd->add_option("--shots", o.shots, "measurement shots per feature estimate");
    cmd->add_flag("--lax", o.lax, "warn on unknown config keys instead of rejecting them");
}

std::vector<std::string> split_commas(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

qelm::SweepConfig resolve_config(const CommonOptions &o) {
    std::vector<std::string> warnings;
    qelm::SweepConfig c = o.config_path.empty() ? qelm::SweepConfig{} : qelm::parse_config(o.config_path, o.lax, &warnings);
    for (const auto &w : warnings) std::cerr << "warning: " << w << '\n';
    if (o.seed) c.master_seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (o.metrics) c.metrics = qelm::parse_metric_list(split_commas(*o.metrics), "--metrics");
    if (o.realizations) c.n_realizations = *o.realizations;
    if (o.shots) c.shot_model.shots = *o.shots;
    return c;
}

std::string output_dir(const CommonOptions &o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char *env = std::getenv("QELM_OUT_DIR"); env && *env) return env;
    return "qelm_out";
}

qelm::OutputFormat output_format(const CommonOptions &o) {
    return o.format == "json" ? qelm::OutputFormat::Json : qelm::OutputFormat::Csv;
}

int finish(const qelm::SweepResult &result, const qelm::SweepConfig &config, const CommonOptions &o,
           const std::string &started) {
    const std::string dir = output_dir(o);
    const auto m = qelm::emit_records(result, config, output_format(o), dir, started);
    std::cerr << "wrote " << m.record_count << " records, " << m.failure_count << " failures to " << dir << '\n';
    for (const auto &f : result.failures) std::cerr << "failed: " << f.message << '\n';
    if (m.failure_count == 0) return kOk;
    return m.record_count == 0 ? kRuntime : kPartial;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum extreme learning machine reservoir sweeps"};
    app.set_version_flag("--version", std::string(qelm::kToolVersion));
    app.require_subcommand(1);

    CommonOptions opts;

    auto *time_cmd = app.add_subcommand("sweep-time", "ensemble over topology x scheme x time at fixed N");
    add_common(time_cmd, opts);
    std::optional<int> time_n;
    bool time_haar = false;
    time_cmd->add_option("--n", time_n, "reservoir size N");
    time_cmd->add_flag("--haar", time_haar, "also emit the Haar-random baseline");

    auto *size_cmd = app.add_subcommand("sweep-size", "ensemble over reservoir size at the size-sweep times");
    add_common(size_cmd, opts);
    std::vector<int> size_list;
    bool size_haar = false;
    size_cmd->add_option("--sizes", size_list, "reservoir sizes (default 2..7)")->delimiter(',');
    size_cmd->add_flag("--haar", size_haar, "also emit the Haar-random baseline per size");

    auto *haar_cmd = app.add_subcommand("baseline-haar", "Haar-random unitary baseline");
    add_common(haar_cmd, opts);
    std::vector<int> haar_sizes;
    haar_cmd->add_option("--sizes", haar_sizes, "reservoir sizes (default: n_reservoir)")->delimiter(',');

    auto *single_cmd = app.add_subcommand("single-run", "one record, printed to standard output");
    add_common(single_cmd, opts);
    std::string topo_name = "FC", scheme_name = "SL";
    std::optional<int> single_n;
    double single_t = 5.0;
    int single_realization = 0;
    single_cmd->add_option("--topology", topo_name, "C, R or FC");
    single_cmd->add_option("--scheme", scheme_name, "SL or ML");
    single_cmd->add_option("--n", single_n, "reservoir size N");
    single_cmd->add_option("--t", single_t, "evolution time");
    single_cmd->add_option("--realization", single_realization, "realization index under the master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    const std::string started = qelm::utc_now_rfc3339();
    try {
        qelm::SweepConfig config = resolve_config(opts);

        if (*time_cmd) {
            if (time_n) config.n_reservoir = *time_n;
            if (time_haar) config.include_haar_baseline = true;
            return finish(qelm::run_time_sweep(config), config, opts, started);
        }
        if (*size_cmd) {
            if (!size_list.empty()) config.size_sweep.sizes = size_list;
            if (size_haar) config.include_haar_baseline = true;
            return finish(qelm::run_size_sweep(config), config, opts, started);
        }
        if (*haar_cmd) {
            return finish(qelm::run_haar_baseline(config, haar_sizes), config, opts, started);
        }

        const auto topo = qelm::parse_topology(topo_name);
        const auto scheme = qelm::parse_scheme(scheme_name);
        if (!topo) throw qelm::ConfigError("--topology", "unknown topology '" + topo_name + "'");
        if (!scheme) throw qelm::ConfigError("--scheme", "unknown scheme '" + scheme_name + "'");
        if (single_n) config.n_reservoir = *single_n;
        config.topologies = {*topo};
        config.schemes = {*scheme};
        config.time_grid = {single_t};
        config.n_realizations = std::max(config.n_realizations, single_realization + 1);
        qelm::validate(config);
        const auto recs =
            qelm::run_realization(config, config.n_reservoir, *topo, *scheme, single_realization, {single_t});
        if (output_format(opts) == qelm::OutputFormat::Json) {
            std::cout << qelm::record_to_json(recs.front()).dump(2) << '\n';
        } else {
            qelm::write_records_csv(std::cout, recs);
        }
        return kOk;
    } catch (const qelm::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
