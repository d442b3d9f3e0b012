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

// Random (N+1)-qubit spin-network Hamiltonians. Reservoir qubits occupy indices
// 0..N-1; the input qubit sits at index N.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qelm/linalg.hpp"
#include "qelm/random.hpp"

namespace qelm {

enum class Topology { Chain, Ring, FullyConnected };
enum class CouplingScheme { SingleLink, MultiLink };

inline constexpr Topology kAllTopologies[3] = {Topology::Chain, Topology::Ring, Topology::FullyConnected};
inline constexpr CouplingScheme kAllSchemes[2] = {CouplingScheme::SingleLink, CouplingScheme::MultiLink};

inline const char *to_string(Topology t) {
    switch (t) {
        case Topology::Chain:
            return "C";
        case Topology::Ring:
            return "R";
        case Topology::FullyConnected:
            return "FC";
    }
    return "?";
}

inline const char *to_string(CouplingScheme s) {
    return s == CouplingScheme::SingleLink ? "SL" : "ML";
}

inline std::optional<Topology> parse_topology(std::string_view s) {
    if (s == "C" || s == "chain") return Topology::Chain;
    if (s == "R" || s == "ring") return Topology::Ring;
    if (s == "FC" || s == "fully_connected") return Topology::FullyConnected;
    return std::nullopt;
}

inline std::optional<CouplingScheme> parse_scheme(std::string_view s) {
    if (s == "SL" || s == "single_link") return CouplingScheme::SingleLink;
    if (s == "ML" || s == "multi_link") return CouplingScheme::MultiLink;
    return std::nullopt;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval &) const = default;
};

struct HamiltonianSpec {
    int n_reservoir = 7;
    Topology topology = Topology::FullyConnected;
    CouplingScheme scheme = CouplingScheme::SingleLink;
    Interval j_range{-1.0, 1.0};
    Interval delta_range{-0.1, 0.1};
    std::uint64_t seed = 0;
    int max_qubits = kDefaultMaxQubits;

    int n_qubits() const noexcept {
        return n_reservoir + 1;
    }
    int input_index() const noexcept {
        return n_reservoir;
    }
};

using Edge = std::pair<int, int>;

/// Interaction graph among n reservoir qubits; every pair is ordered (k < j).
inline std::vector<Edge> edge_set(Topology topology, int n) {
    if (n < 1) {
        throw DimensionError("edge_set: need at least one reservoir qubit");
    }
    std::vector<Edge> edges;
    switch (topology) {
        case Topology::Chain:
            for (int k = 0; k + 1 < n; ++k) edges.emplace_back(k, k + 1);
            break;
        case Topology::Ring:
            if (n < 3) {
                throw DimensionError("edge_set: ring topology needs at least 3 qubits, got " + std::to_string(n));
            }
            for (int k = 0; k + 1 < n; ++k) edges.emplace_back(k, k + 1);
            edges.emplace_back(0, n - 1);
            break;
        case Topology::FullyConnected:
            for (int k = 0; k < n; ++k)
                for (int j = k + 1; j < n; ++j) edges.emplace_back(k, j);
            break;
    }
    return edges;
}

inline void validate(const HamiltonianSpec &spec) {
    if (spec.n_reservoir < 1) {
        throw DimensionError("HamiltonianSpec: n_reservoir must be >= 1");
    }
    if (spec.n_qubits() > spec.max_qubits) {
        throw DimensionError("HamiltonianSpec: " + std::to_string(spec.n_qubits()) +
                             " qubits exceeds the cap of " + std::to_string(spec.max_qubits));
    }
    if (!(spec.j_range.lo <= spec.j_range.hi) || !(spec.delta_range.lo <= spec.delta_range.hi)) {
        throw InvariantError("HamiltonianSpec: coupling ranges must satisfy lo <= hi");
    }
    (void)edge_set(spec.topology, spec.n_reservoir);
}

/// J^{alpha beta} between qubits `a` and `b`; row = alpha on `a`, column = beta on `b`.
struct PairCoupling {
    int a = 0;
    int b = 0;
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
};

struct ReservoirHamiltonian {
    HamiltonianSpec spec;
    HermitianOperator h_total;
    std::vector<PairCoupling> couplings_res;
    std::vector<PairCoupling> couplings_inj;
    std::vector<Eigen::Vector3d> local_fields;

    std::size_t coefficient_count() const {
        return 9 * couplings_res.size() + 9 * couplings_inj.size() + 3 * local_fields.size();
    }
};

/// Reservoir qubits wired to the input: {0} for single link, all of them for multi link.
inline std::vector<int> injection_sites(CouplingScheme scheme, int n_reservoir) {
    if (scheme == CouplingScheme::SingleLink) {
        return {0};
    }
    std::vector<int> sites(static_cast<std::size_t>(n_reservoir));
    for (int k = 0; k < n_reservoir; ++k) sites[static_cast<std::size_t>(k)] = k;
    return sites;
}

/// Sum of the stored coefficients times their Pauli strings.
inline ComplexMatrix assemble_hamiltonian(int n_qubits, const std::vector<PairCoupling> &couplings_res,
                                          const std::vector<PairCoupling> &couplings_inj,
                                          const std::vector<Eigen::Vector3d> &local_fields,
                                          int max_qubits = kDefaultMaxQubits) {
    const Index dim = Index{1} << n_qubits;
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    std::vector<std::optional<PauliAxis>> factors(static_cast<std::size_t>(n_qubits));
    auto add_pair = [&](const PairCoupling &c) {
        for (PauliAxis alpha : kPauliAxes) {
            for (PauliAxis beta : kPauliAxes) {
                std::fill(factors.begin(), factors.end(), std::nullopt);
                factors[static_cast<std::size_t>(c.a)] = alpha;
                factors[static_cast<std::size_t>(c.b)] = beta;
                h += c.j(static_cast<int>(alpha), static_cast<int>(beta)) * pauli_string(factors, max_qubits);
            }
        }
    };
    for (const auto &c : couplings_res) add_pair(c);
    for (const auto &c : couplings_inj) add_pair(c);
    for (std::size_t k = 0; k < local_fields.size(); ++k) {
        for (PauliAxis alpha : kPauliAxes) {
            h += local_fields[k](static_cast<int>(alpha)) *
                 embed_pauli(alpha, static_cast<int>(k), n_qubits, max_qubits).matrix();
        }
    }
    return h;
}

/// Draws every coupling uniformly from its configured range. Draw order: reservoir
/// edges in edge_set order (9 entries, alpha-major), local fields per site, then
/// injection links.
inline ReservoirHamiltonian sample_hamiltonian(const HamiltonianSpec &spec, Rng &rng) {
    validate(spec);
    std::uniform_real_distribution<double> j_dist(spec.j_range.lo, spec.j_range.hi);
    std::uniform_real_distribution<double> d_dist(spec.delta_range.lo, spec.delta_range.hi);
    auto draw3x3 = [&] {
        Eigen::Matrix3d m;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m(a, b) = j_dist(rng);
        return m;
    };

    std::vector<PairCoupling> res;
    for (const auto &[k, j] : edge_set(spec.topology, spec.n_reservoir)) {
        res.push_back({k, j, draw3x3()});
    }
    std::vector<Eigen::Vector3d> fields;
    for (int k = 0; k < spec.n_reservoir; ++k) {
        Eigen::Vector3d f;
        for (int a = 0; a < 3; ++a) f(a) = d_dist(rng);
        fields.push_back(f);
    }
    std::vector<PairCoupling> inj;
    for (int k : injection_sites(spec.scheme, spec.n_reservoir)) {
        inj.push_back({k, spec.input_index(), draw3x3()});
    }
    HermitianOperator h(assemble_hamiltonian(spec.n_qubits(), res, inj, fields, spec.max_qubits));
    return ReservoirHamiltonian{spec, std::move(h), std::move(res), std::move(inj), std::move(fields)};
}

inline ReservoirHamiltonian sample_hamiltonian(const HamiltonianSpec &spec) {
    Rng rng = make_rng(spec.seed);
    return sample_hamiltonian(spec, rng);
}

/// sigma_z on each reservoir site, embedded in the (N+1)-qubit space.
inline std::vector<HermitianOperator> readout_observables(int n_reservoir, int max_qubits = kDefaultMaxQubits) {
    if (n_reservoir < 1) {
        throw DimensionError("readout_observables: n_reservoir must be >= 1");
    }
    std::vector<HermitianOperator> obs;
    obs.reserve(static_cast<std::size_t>(n_reservoir));
    for (int i = 0; i < n_reservoir; ++i) {
        obs.push_back(embed_pauli(PauliAxis::Z, i, n_reservoir + 1, max_qubits));
    }
    return obs;
}

}  // namespace qelm
