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

// Seeded ensembles over topology x coupling scheme x time x reservoir size.
//
// A work unit is one realization at one parameter point (N, topology, scheme). It
// owns three derived generator streams (Hamiltonian, train/test states, shot noise
// per time index), so records do not depend on the execution schedule.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "qelm/engine.hpp"
#include "qelm/linalg.hpp"
#include "qelm/random.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/scrambling.hpp"

namespace qelm {

enum class Metric { Mse, Otoc, Holevo, HolevoPerNode, ConditionNumber };
inline constexpr Metric kAllMetrics[5] = {Metric::Mse, Metric::Otoc, Metric::Holevo, Metric::HolevoPerNode,
                                          Metric::ConditionNumber};

inline const char *to_string(Metric m) {
    switch (m) {
        case Metric::Mse:
            return "mse";
        case Metric::Otoc:
            return "otoc";
        case Metric::Holevo:
            return "holevo";
        case Metric::HolevoPerNode:
            return "holevo_per_node";
        case Metric::ConditionNumber:
            return "condition_number";
    }
    return "?";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
    for (Metric m : kAllMetrics)
        if (s == to_string(m)) return m;
    return std::nullopt;
}

class MetricSet {
  public:
    MetricSet() = default;
    MetricSet(std::initializer_list<Metric> ms) {
        for (Metric m : ms) insert(m);
    }
    static MetricSet all() {
        return {Metric::Mse, Metric::Otoc, Metric::Holevo, Metric::HolevoPerNode, Metric::ConditionNumber};
    }
    void insert(Metric m) {
        bits_ |= 1u << static_cast<unsigned>(m);
    }
    bool contains(Metric m) const {
        return bits_ & (1u << static_cast<unsigned>(m));
    }
    bool empty() const {
        return bits_ == 0;
    }
    bool operator==(const MetricSet &) const = default;

  private:
    unsigned bits_ = 0;
};

inline std::vector<double> uniform_grid(double start, double stop, int points) {
    std::vector<double> g;
    if (points == 1) return {start};
    for (int k = 0; k < points; ++k) g.push_back(start + (stop - start) * k / (points - 1));
    return g;
}

struct SizeSweepSettings {
    std::vector<int> sizes{2, 3, 4, 5, 6, 7};
    std::vector<double> times{0.25, 5.0};
    std::vector<CouplingScheme> schemes{CouplingScheme::SingleLink};
    bool operator==(const SizeSweepSettings &) const = default;
};

struct SweepConfig {
    int n_reservoir = 7;
    std::vector<Topology> topologies{Topology::Chain, Topology::Ring, Topology::FullyConnected};
    std::vector<CouplingScheme> schemes{CouplingScheme::SingleLink, CouplingScheme::MultiLink};
    std::vector<double> time_grid = uniform_grid(0.0, 5.0, 41);
    int n_realizations = 500;
    int n_train = 50;
    int n_test = 50;
    ShotModel shot_model{};
    std::uint64_t master_seed = 20240601;
    std::optional<double> rcond;
    LogBase log_base = LogBase::Two;
    bool include_haar_baseline = false;
    MetricSet metrics = MetricSet::all();
    bool bias_row = false;
    OtocNormalization otoc_normalization = OtocNormalization::FullSpace;
    Interval j_range{-1.0, 1.0};
    Interval delta_range{-0.1, 0.1};
    std::uint64_t reservoir_initial_state = 0;
    int max_qubits = kDefaultMaxQubits;
    SizeSweepSettings size_sweep{};
    int threads = 0;  // 0: hardware concurrency

    bool operator==(const SweepConfig &) const = default;
};

inline void validate(const SweepConfig &c) {
    auto require = [](bool ok, const char *field, const std::string &what) {
        if (!ok) throw ConfigError(field, what);
    };
    auto check_grid = [&](const std::vector<double> &g, const char *field) {
        require(!g.empty(), field, "must contain at least one time");
        for (std::size_t k = 0; k < g.size(); ++k) {
            require(std::isfinite(g[k]), field, "times must be finite");
            if (k > 0) require(g[k] > g[k - 1], field, "times must be strictly increasing");
        }
    };
    auto check_size = [&](int n, const char *field) {
        require(n >= 1, field, "reservoir size must be >= 1");
        require(n + 1 <= c.max_qubits, field,
                "N + 1 = " + std::to_string(n + 1) + " exceeds max_qubits = " + std::to_string(c.max_qubits));
    };
    check_size(c.n_reservoir, "n_reservoir");
    require(!c.topologies.empty(), "topologies", "must not be empty");
    require(!c.schemes.empty(), "schemes", "must not be empty");
    for (Topology t : c.topologies) {
        require(t != Topology::Ring || c.n_reservoir >= 3, "topologies", "ring topology needs n_reservoir >= 3");
    }
    check_grid(c.time_grid, "time_grid");
    require(c.n_realizations >= 1, "n_realizations", "must be >= 1");
    require(c.n_train >= 1, "n_train", "must be >= 1");
    require(c.n_test >= 1, "n_test", "must be >= 1");
    require(c.shot_model.shots >= 1, "shots.count", "must be >= 1");
    require(!c.rcond || *c.rcond >= 0.0, "rcond", "must be nonnegative");
    require(!c.metrics.empty(), "metrics", "must select at least one metric");
    require(c.j_range.lo <= c.j_range.hi, "coupling.j_range", "lo must not exceed hi");
    require(c.delta_range.lo <= c.delta_range.hi, "coupling.delta_range", "lo must not exceed hi");
    require(c.max_qubits >= 2 && c.max_qubits <= 20, "max_qubits", "must lie in [2, 20]");
    require(c.reservoir_initial_state < (std::uint64_t{1} << c.n_reservoir), "reservoir_initial_state",
            "basis index out of range for n_reservoir");
    require(c.threads >= 0, "threads", "must be >= 0");
    require(!c.size_sweep.sizes.empty(), "size_sweep.sizes", "must not be empty");
    for (int n : c.size_sweep.sizes) check_size(n, "size_sweep.sizes");
    for (std::size_t k = 1; k < c.size_sweep.sizes.size(); ++k) {
        require(c.size_sweep.sizes[k] > c.size_sweep.sizes[k - 1], "size_sweep.sizes", "must be strictly increasing");
    }
    check_grid(c.size_sweep.times, "size_sweep.times");
    require(!c.size_sweep.schemes.empty(), "size_sweep.schemes", "must not be empty");
}

struct EnsembleStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::size_t n = 0;
};

/// Quartiles by linear interpolation between closest ranks (position q * (n - 1)).
inline double quantile_sorted(const std::vector<double> &sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline EnsembleStats aggregate_stats(std::vector<double> values) {
    if (values.empty()) {
        throw InvariantError("aggregate_stats: empty input");
    }
    std::sort(values.begin(), values.end());
    return {quantile_sorted(values, 0.5), quantile_sorted(values, 0.25), quantile_sorted(values, 0.75),
            values.size()};
}

/// Metrics that were not requested stay empty. Haar-baseline records carry no
/// topology/scheme and a NaN time.
struct ExperimentRecord {
    int realization_index = 0;
    std::optional<Topology> topology;
    std::optional<CouplingScheme> scheme;
    int n_reservoir = 0;
    double time = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> mse;
    std::optional<double> condition_number;
    std::optional<double> otoc_avg;
    std::optional<double> holevo_avg;
    std::vector<double> holevo_per_node;

    bool is_baseline() const {
        return !topology.has_value();
    }
};

inline const char *topology_label(const std::optional<Topology> &t) {
    return t ? to_string(*t) : "RU";
}
inline const char *scheme_label(const std::optional<CouplingScheme> &s) {
    return s ? to_string(*s) : "none";
}

/// A record key that could not be produced, with the failure reason.
struct WorkFailure {
    int realization_index = 0;
    std::optional<Topology> topology;
    std::optional<CouplingScheme> scheme;
    int n_reservoir = 0;
    double time = 0.0;
    std::string message;
};

struct SweepResult {
    std::vector<ExperimentRecord> records;
    std::vector<WorkFailure> failures;

    std::size_t expected_count() const {
        return records.size() + failures.size();
    }
};

// ---------------------------------------------------------------------------
// Seed derivation

namespace stream {
inline constexpr std::uint64_t kHamiltonian = 0x4841;
inline constexpr std::uint64_t kStates = 0x5354;
inline constexpr std::uint64_t kShots = 0x5348;
inline constexpr std::uint64_t kHaar = 0x5255;
}  // namespace stream

inline std::uint64_t topology_code(const std::optional<Topology> &t) {
    return t ? static_cast<std::uint64_t>(*t) : 3;
}
inline std::uint64_t scheme_code(const std::optional<CouplingScheme> &s) {
    return s ? static_cast<std::uint64_t>(*s) : 2;
}

/// Seeds owned by one work unit.
struct RealizationStreams {
    std::uint64_t dynamics_seed = 0;
    std::uint64_t states_seed = 0;
    std::uint64_t shots_base = 0;

    std::uint64_t shots_seed(std::size_t time_index) const {
        return derive_seed(shots_base, {static_cast<std::uint64_t>(time_index)});
    }

    static RealizationStreams derive(std::uint64_t master, int n_reservoir, const std::optional<Topology> &topo,
                                     const std::optional<CouplingScheme> &scheme, int realization) {
        const auto n = static_cast<std::uint64_t>(n_reservoir);
        const auto r = static_cast<std::uint64_t>(realization);
        const auto tc = topology_code(topo);
        const auto sc = scheme_code(scheme);
        const std::uint64_t dyn_tag = topo ? stream::kHamiltonian : stream::kHaar;
        return {derive_seed(master, {dyn_tag, n, tc, sc, r}), derive_seed(master, {stream::kStates, n, tc, sc, r}),
                derive_seed(master, {stream::kShots, n, tc, sc, r})};
    }
};

struct StateSets {
    std::vector<DensityMatrix> train;
    std::vector<DensityMatrix> test;
    TargetMatrix y_train;
    TargetMatrix y_test;

    static StateSets draw(int n_train, int n_test, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        StateSets s;
        for (int k = 0; k < n_train; ++k) s.train.push_back(random_pure_qubit_state(rng));
        for (int k = 0; k < n_test; ++k) s.test.push_back(random_pure_qubit_state(rng));
        s.y_train = pauli_targets(s.train);
        s.y_test = pauli_targets(s.test);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Evaluation

/// Fills the requested metrics of `rec` for dynamics `u`. Train features are drawn
/// before test features from the same shot stream.
inline void evaluate_unitary(const UnitaryMatrix &u, int n_reservoir, const StateSets &states,
                             const SweepConfig &config, std::uint64_t shots_seed, ExperimentRecord &rec) {
    const Preparation prep{config.reservoir_initial_state};
    const bool need_train = config.metrics.contains(Metric::Mse) || config.metrics.contains(Metric::ConditionNumber);
    if (need_train) {
        Rng rng = make_rng(shots_seed);
        const FeatureMatrix p_train =
            sample_features(u, states.train, n_reservoir, config.shot_model, rng, config.bias_row, prep);
        if (config.metrics.contains(Metric::ConditionNumber)) {
            rec.condition_number = condition_number(p_train);
        }
        if (config.metrics.contains(Metric::Mse)) {
            const FeatureMatrix p_test =
                sample_features(u, states.test, n_reservoir, config.shot_model, rng, config.bias_row, prep);
            const TrainedReadout w = train_readout(p_train, states.y_train, config.rcond);
            rec.mse = mse(states.y_test, predict(w, p_test));
        }
    }
    if (config.metrics.contains(Metric::Otoc)) {
        rec.otoc_avg = averaged_otoc(u, n_reservoir, config.otoc_normalization).averaged;
    }
    if (config.metrics.contains(Metric::Holevo) || config.metrics.contains(Metric::HolevoPerNode)) {
        const HolevoResult h = local_holevo_profile(u, n_reservoir, config.log_base, prep);
        if (config.metrics.contains(Metric::Holevo)) rec.holevo_avg = h.averaged;
        if (config.metrics.contains(Metric::HolevoPerNode)) {
            rec.holevo_per_node.assign(h.per_node.data(), h.per_node.data() + h.per_node.size());
        }
    }
}

inline HamiltonianSpec make_spec(const SweepConfig &config, int n_reservoir, Topology topo, CouplingScheme scheme,
                                 std::uint64_t seed) {
    return {n_reservoir, topo, scheme, config.j_range, config.delta_range, seed, config.max_qubits};
}

/// One record for Hamiltonian `h` at time `t`; diagonalizes h itself.
inline ExperimentRecord run_single(const ReservoirHamiltonian &h, double t, const SweepConfig &config,
                                   const RealizationStreams &streams, int realization_index = 0,
                                   std::size_t time_index = 0) {
    const int n = h.spec.n_reservoir;
    const SpectralDecomposition eig = herm_eig(h.h_total);
    const UnitaryMatrix u = evolve_unitary(eig, t);
    const StateSets states = StateSets::draw(config.n_train, config.n_test, streams.states_seed);
    ExperimentRecord rec;
    rec.realization_index = realization_index;
    rec.topology = h.spec.topology;
    rec.scheme = h.spec.scheme;
    rec.n_reservoir = n;
    rec.time = t;
    rec.seed = h.spec.seed;
    evaluate_unitary(u, n, states, config, streams.shots_seed(time_index), rec);
    return rec;
}

/// Records for one realization over a time grid, reusing a single diagonalization.
inline std::vector<ExperimentRecord> run_realization(const SweepConfig &config, int n_reservoir,
                                                     Topology topo, CouplingScheme scheme, int realization,
                                                     const std::vector<double> &times) {
    const auto streams = RealizationStreams::derive(config.master_seed, n_reservoir, topo, scheme, realization);
    const ReservoirHamiltonian h = sample_hamiltonian(make_spec(config, n_reservoir, topo, scheme, streams.dynamics_seed));
    const SpectralDecomposition eig = herm_eig(h.h_total);
    const StateSets states = StateSets::draw(config.n_train, config.n_test, streams.states_seed);
    std::vector<ExperimentRecord> out;
    out.reserve(times.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        ExperimentRecord rec;
        rec.realization_index = realization;
        rec.topology = topo;
        rec.scheme = scheme;
        rec.n_reservoir = n_reservoir;
        rec.time = times[ti];
        rec.seed = streams.dynamics_seed;
        evaluate_unitary(evolve_unitary(eig, times[ti]), n_reservoir, states, config, streams.shots_seed(ti), rec);
        out.push_back(std::move(rec));
    }
    return out;
}

inline ExperimentRecord run_haar_realization(const SweepConfig &config, int n_reservoir, int realization) {
    const auto streams = RealizationStreams::derive(config.master_seed, n_reservoir, std::nullopt, std::nullopt,
                                                    realization);
    Rng rng = make_rng(streams.dynamics_seed);
    const UnitaryMatrix u = haar_unitary(Index{1} << (n_reservoir + 1), rng);
    const StateSets states = StateSets::draw(config.n_train, config.n_test, streams.states_seed);
    ExperimentRecord rec;
    rec.realization_index = realization;
    rec.n_reservoir = n_reservoir;
    rec.time = std::numeric_limits<double>::quiet_NaN();
    rec.seed = streams.dynamics_seed;
    evaluate_unitary(u, n_reservoir, states, config, streams.shots_seed(0), rec);
    return rec;
}

// ---------------------------------------------------------------------------
// Scheduling

/// Runs fn(i) for i in [0, count) on `threads` workers (0: hardware concurrency).
/// fn must write only to slot i of its own output.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn &&fn) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto &t : pool) t.join();
}

namespace detail {

struct Unit {
    int n_reservoir;
    std::optional<Topology> topology;
    std::optional<CouplingScheme> scheme;
    int realization;
};

struct UnitOutcome {
    std::vector<ExperimentRecord> records;
    std::string error;
    bool failed = false;
};

inline SweepResult run_units(const SweepConfig &config, const std::vector<Unit> &units,
                             const std::vector<double> &times) {
    std::vector<UnitOutcome> outcomes(units.size());
    parallel_for(units.size(), config.threads, [&](std::size_t i) {
        const Unit &u = units[i];
        try {
            if (u.topology) {
                outcomes[i].records = run_realization(config, u.n_reservoir, *u.topology, *u.scheme, u.realization, times);
            } else {
                outcomes[i].records = {run_haar_realization(config, u.n_reservoir, u.realization)};
            }
        } catch (const std::exception &e) {
            outcomes[i].failed = true;
            outcomes[i].error = e.what();
        }
    });
    SweepResult result;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const Unit &u = units[i];
        if (!outcomes[i].failed) {
            for (auto &r : outcomes[i].records) result.records.push_back(std::move(r));
            continue;
        }
        const std::vector<double> keys =
            u.topology ? times : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
        for (double t : keys) {
            result.failures.push_back({u.realization, u.topology, u.scheme, u.n_reservoir, t,
                                       "realization " + std::to_string(u.realization) + " (" +
                                           topology_label(u.topology) + "/" + scheme_label(u.scheme) +
                                           ", N=" + std::to_string(u.n_reservoir) + "): " + outcomes[i].error});
        }
    }
    return result;
}

inline void append_haar_units(const SweepConfig &config, const std::vector<int> &sizes, std::vector<Unit> &units) {
    for (int n : sizes)
        for (int r = 0; r < config.n_realizations; ++r) units.push_back({n, std::nullopt, std::nullopt, r});
}

}  // namespace detail

/// One record per (realization, topology, scheme, t) at N = config.n_reservoir, plus
/// Haar-baseline records when enabled.
inline SweepResult run_time_sweep(const SweepConfig &config) {
    validate(config);
    std::vector<detail::Unit> units;
    for (Topology topo : config.topologies)
        for (CouplingScheme s : config.schemes)
            for (int r = 0; r < config.n_realizations; ++r) units.push_back({config.n_reservoir, topo, s, r});
    if (config.include_haar_baseline) detail::append_haar_units(config, {config.n_reservoir}, units);
    return detail::run_units(config, units, config.time_grid);
}

/// Records for every N in size_sweep.sizes at size_sweep.times. Ring points with
/// N < 3 do not exist and are skipped.
inline SweepResult run_size_sweep(const SweepConfig &config) {
    validate(config);
    std::vector<detail::Unit> units;
    for (int n : config.size_sweep.sizes)
        for (Topology topo : config.topologies) {
            if (topo == Topology::Ring && n < 3) continue;
            for (CouplingScheme s : config.size_sweep.schemes)
                for (int r = 0; r < config.n_realizations; ++r) units.push_back({n, topo, s, r});
        }
    if (config.include_haar_baseline) detail::append_haar_units(config, config.size_sweep.sizes, units);
    return detail::run_units(config, units, config.size_sweep.times);
}

/// One time-independent Haar unitary per realization for each size.
inline SweepResult run_haar_baseline(const SweepConfig &config, std::vector<int> sizes = {}) {
    validate(config);
    if (sizes.empty()) sizes = {config.n_reservoir};
    std::vector<detail::Unit> units;
    detail::append_haar_units(config, sizes, units);
    return detail::run_units(config, units, {});
}

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateKey {
    std::string topology;
    std::string scheme;
    int n_reservoir = 0;
    std::optional<double> time;  // empty for the time-independent baseline
    auto operator<=>(const AggregateKey &) const = default;
};

struct AggregateRow {
    AggregateKey key;
    std::string metric;
    EnsembleStats stats;
};

struct NodeAggregateRow {
    AggregateKey key;
    int node = 0;
    EnsembleStats stats;
};

inline AggregateKey key_of(const ExperimentRecord &r) {
    return {topology_label(r.topology), scheme_label(r.scheme), r.n_reservoir,
            std::isnan(r.time) ? std::nullopt : std::optional<double>(r.time)};
}

/// Median/quartile tables keyed by (topology, scheme, N, t, metric), in key order.
inline std::vector<AggregateRow> aggregate_records(const std::vector<ExperimentRecord> &records) {
    std::map<std::pair<AggregateKey, std::string>, std::vector<double>> groups;
    for (const auto &r : records) {
        const AggregateKey k = key_of(r);
        if (r.mse) groups[{k, "mse"}].push_back(*r.mse);
        if (r.condition_number) groups[{k, "condition_number"}].push_back(*r.condition_number);
        if (r.otoc_avg) groups[{k, "otoc"}].push_back(*r.otoc_avg);
        if (r.holevo_avg) groups[{k, "holevo"}].push_back(*r.holevo_avg);
    }
    std::vector<AggregateRow> rows;
    for (auto &[k, v] : groups) rows.push_back({k.first, k.second, aggregate_stats(std::move(v))});
    return rows;
}

inline std::vector<NodeAggregateRow> aggregate_holevo_nodes(const std::vector<ExperimentRecord> &records) {
    std::map<std::pair<AggregateKey, int>, std::vector<double>> groups;
    for (const auto &r : records) {
        const AggregateKey k = key_of(r);
        for (std::size_t j = 0; j < r.holevo_per_node.size(); ++j) {
            groups[{k, static_cast<int>(j)}].push_back(r.holevo_per_node[j]);
        }
    }
    std::vector<NodeAggregateRow> rows;
    for (auto &[k, v] : groups) rows.push_back({k.first, k.second, aggregate_stats(std::move(v))});
    return rows;
}

/// Values of one metric over records matching a predicate.
template <typename Pred>
std::vector<double> collect(const std::vector<ExperimentRecord> &records, std::optional<double> ExperimentRecord::*field,
                            Pred &&pred) {
    std::vector<double> out;
    for (const auto &r : records)
        if ((r.*field) && pred(r)) out.push_back(*(r.*field));
    return out;
}

}  // namespace qelm
