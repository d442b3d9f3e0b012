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

// Extreme-learning-machine readout on top of a fixed unitary reservoir: feature
// matrices (exact or shot-sampled), Pauli targets, pseudoinverse training, MSE.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qelm/linalg.hpp"
#include "qelm/reservoir.hpp"

namespace qelm {

/// Rows: readout observables (plus a trailing constant-1 row when `bias_row`).
/// Columns: input states.
struct FeatureMatrix {
    RealMatrix values;
    bool bias_row = false;

    Index n_out() const noexcept {
        return values.rows();
    }
    Index n_states() const noexcept {
        return values.cols();
    }
};

/// Rows (<sigma_x>, <sigma_y>, <sigma_z>); one column per state.
struct TargetMatrix {
    RealMatrix values;

    Index n_states() const noexcept {
        return values.cols();
    }
};

struct TrainedReadout {
    RealMatrix w;  // 3 x n_out
    double rcond_used = 0.0;
    RealVector singular_values;  // of the training features, descending
};

enum class ShotMode { Exact, JointBitstrings, IndependentBinomial };

inline const char *to_string(ShotMode m) {
    switch (m) {
        case ShotMode::Exact:
            return "exact";
        case ShotMode::JointBitstrings:
            return "joint_bitstrings";
        case ShotMode::IndependentBinomial:
            return "independent_binomial";
    }
    return "?";
}

struct ShotModel {
    ShotMode mode = ShotMode::JointBitstrings;
    std::int64_t shots = 1'000'000;
    bool operator==(const ShotModel &) const = default;
};

/// Reservoir fiducial state: computational basis state `basis_state` of the N
/// reservoir qubits (bit N-1-k of the index is qubit k). Zero is |0...0>.
struct Preparation {
    std::uint64_t basis_state = 0;
};

namespace detail {

inline void require_qubit(const DensityMatrix &rho, const char *who) {
    if (rho.dim() != 2) {
        throw DimensionError(std::string(who) + ": input state must be a single qubit");
    }
}

inline void require_reservoir_unitary(const UnitaryMatrix &u, int n_reservoir, const char *who) {
    if (n_reservoir < 1 || u.dim() != (Index{1} << (n_reservoir + 1))) {
        throw DimensionError(std::string(who) + ": unitary dimension " + std::to_string(u.dim()) +
                             " does not match 2^(N+1) for N = " + std::to_string(n_reservoir));
    }
}

}  // namespace detail

/// The two output columns U|r, a> for input basis states a = 0, 1. With the input
/// qubit last, the joint output is sum_ab rho_ab c_a c_b^dag.
struct InjectedColumns {
    ComplexVector c0;
    ComplexVector c1;

    static InjectedColumns from(const UnitaryMatrix &u, int n_reservoir, const Preparation &prep = {}) {
        detail::require_reservoir_unitary(u, n_reservoir, "InjectedColumns");
        if (prep.basis_state >= (std::uint64_t{1} << n_reservoir)) {
            throw DimensionError("Preparation: basis state index out of range");
        }
        const auto base = static_cast<Index>(prep.basis_state << 1);
        return {u.matrix().col(base), u.matrix().col(base | 1)};
    }

    ComplexMatrix joint_output(const DensityMatrix &rho_in) const {
        const ComplexMatrix &r = rho_in.matrix();
        return r(0, 0) * c0 * c0.adjoint() + r(0, 1) * c0 * c1.adjoint() + r(1, 0) * c1 * c0.adjoint() +
               r(1, 1) * c1 * c1.adjoint();
    }

    /// Heisenberg-picture readout on the input qubit: Tr[O U(rho_r (x) rho)U^dag] = Tr[M rho]
    /// with M_ba = <c_b|O|c_a>.
    ComplexMatrix dual_operator(const HermitianOperator &o) const {
        const ComplexVector oc0 = o.matrix() * c0;
        const ComplexVector oc1 = o.matrix() * c1;
        ComplexMatrix m(2, 2);
        m(0, 0) = c0.dot(oc0);
        m(0, 1) = c0.dot(oc1);
        m(1, 0) = c1.dot(oc0);
        m(1, 1) = c1.dot(oc1);
        return m;
    }
};

/// Tr_input[U (|r><r| (x) rho_in) U^dag]: the N-qubit reservoir marginal.
inline DensityMatrix reservoir_output_state(const UnitaryMatrix &u, const DensityMatrix &rho_in, int n_reservoir,
                                            const Preparation &prep = {}) {
    detail::require_qubit(rho_in, "reservoir_output_state");
    const auto cols = InjectedColumns::from(u, n_reservoir, prep);
    const ComplexMatrix joint = cols.joint_output(rho_in);
    const Index dr = Index{1} << n_reservoir;
    ComplexMatrix out(dr, dr);
    for (Index i = 0; i < dr; ++i)
        for (Index j = 0; j < dr; ++j) out(i, j) = joint(2 * i, 2 * j) + joint(2 * i + 1, 2 * j + 1);
    return DensityMatrix::unchecked(out);
}

inline FeatureMatrix append_bias(RealMatrix values, bool bias_row) {
    if (bias_row) {
        values.conservativeResize(values.rows() + 1, Eigen::NoChange);
        values.row(values.rows() - 1).setOnes();
    }
    return {std::move(values), bias_row};
}

/// Entry (j, k) = Tr[O_j U(|r><r| (x) rho_k)U^dag], observables acting on the full
/// (N+1)-qubit space.
inline FeatureMatrix exact_features(const UnitaryMatrix &u, std::span<const DensityMatrix> states,
                                    std::span<const HermitianOperator> observables, bool bias_row = false,
                                    const Preparation &prep = {}) {
    const int n_qubits = log2_dim(u.dim());
    if (!is_power_of_two(u.dim()) || n_qubits < 2) {
        throw DimensionError("exact_features: unitary must act on at least two qubits");
    }
    const auto cols = InjectedColumns::from(u, n_qubits - 1, prep);
    RealMatrix values(static_cast<Index>(observables.size()), static_cast<Index>(states.size()));
    for (std::size_t j = 0; j < observables.size(); ++j) {
        if (observables[j].dim() != u.dim()) {
            throw DimensionError("exact_features: observable dimension mismatch");
        }
        const ComplexMatrix m = cols.dual_operator(observables[j]);
        for (std::size_t k = 0; k < states.size(); ++k) {
            detail::require_qubit(states[k], "exact_features");
            values(static_cast<Index>(j), static_cast<Index>(k)) = (m * states[k].matrix()).trace().real();
        }
    }
    return append_bias(std::move(values), bias_row);
}

namespace detail {

/// Computational-basis distribution of the reservoir marginal.
inline RealVector reservoir_probabilities(const InjectedColumns &cols, const DensityMatrix &rho, int n_reservoir) {
    const ComplexMatrix &r = rho.matrix();
    const Index dr = Index{1} << n_reservoir;
    RealVector p(dr);
    for (Index x = 0; x < dr; ++x) {
        double acc = 0.0;
        for (Index in = 0; in < 2; ++in) {
            const Complex a0 = cols.c0(2 * x + in);
            const Complex a1 = cols.c1(2 * x + in);
            acc += (r(0, 0) * a0 * std::conj(a0) + r(0, 1) * a0 * std::conj(a1) + r(1, 0) * a1 * std::conj(a0) +
                    r(1, 1) * a1 * std::conj(a1))
                       .real();
        }
        p(x) = acc;
    }
    if (p.minCoeff() < -1e-10) {
        throw NumericalError("sample_features: negative outcome probability " + std::to_string(p.minCoeff()));
    }
    p = p.cwiseMax(0.0);
    const double total = p.sum();
    if (!(total > 0.0)) {
        throw NumericalError("sample_features: outcome distribution has zero mass");
    }
    return p / total;
}

/// Multinomial(m, p) counts through sequential conditional binomials; equal in law
/// to drawing m independent categorical samples.
inline std::vector<std::int64_t> multinomial_counts(const RealVector &p, std::int64_t m, Rng &rng) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(p.size()), 0);
    std::int64_t remaining = m;
    double mass_left = 1.0;
    for (Index x = 0; x < p.size() && remaining > 0; ++x) {
        if (x + 1 == p.size()) {
            counts[static_cast<std::size_t>(x)] = remaining;
            break;
        }
        const double q = mass_left > 0.0 ? std::clamp(p(x) / mass_left, 0.0, 1.0) : 1.0;
        std::int64_t c = 0;
        if (q >= 1.0) {
            c = remaining;
        } else if (q > 0.0) {
            std::binomial_distribution<std::int64_t> bin(remaining, q);
            c = bin(rng);
        }
        counts[static_cast<std::size_t>(x)] = c;
        remaining -= c;
        mass_left -= p(x);
    }
    return counts;
}

}  // namespace detail

/// Shot-sampled sigma_z features on the N reservoir qubits. Exact mode returns
/// the noiseless expectations.
inline FeatureMatrix sample_features(const UnitaryMatrix &u, std::span<const DensityMatrix> states, int n_reservoir,
                                     const ShotModel &model, Rng &rng, bool bias_row = false,
                                     const Preparation &prep = {}) {
    detail::require_reservoir_unitary(u, n_reservoir, "sample_features");
    if (model.mode == ShotMode::Exact) {
        const auto obs = readout_observables(n_reservoir, log2_dim(u.dim()));
        return exact_features(u, states, obs, bias_row, prep);
    }
    if (model.shots < 1) {
        throw InvariantError("sample_features: shots must be >= 1");
    }
    const auto cols = InjectedColumns::from(u, n_reservoir, prep);
    const Index dr = Index{1} << n_reservoir;
    const double inv_m = 1.0 / static_cast<double>(model.shots);
    RealMatrix values(n_reservoir, static_cast<Index>(states.size()));
    for (std::size_t k = 0; k < states.size(); ++k) {
        detail::require_qubit(states[k], "sample_features");
        const RealVector p = detail::reservoir_probabilities(cols, states[k], n_reservoir);
        const auto col = static_cast<Index>(k);
        if (model.mode == ShotMode::JointBitstrings) {
            const auto counts = detail::multinomial_counts(p, model.shots, rng);
            for (int j = 0; j < n_reservoir; ++j) {
                std::int64_t signed_sum = 0;
                for (Index x = 0; x < dr; ++x) {
                    const bool one = (x >> (n_reservoir - 1 - j)) & 1;
                    signed_sum += one ? -counts[static_cast<std::size_t>(x)] : counts[static_cast<std::size_t>(x)];
                }
                values(j, col) = static_cast<double>(signed_sum) * inv_m;
            }
        } else {
            for (int j = 0; j < n_reservoir; ++j) {
                double expect = 0.0;
                for (Index x = 0; x < dr; ++x) {
                    const bool one = (x >> (n_reservoir - 1 - j)) & 1;
                    expect += one ? -p(x) : p(x);
                }
                const double prob_up = std::clamp(0.5 * (1.0 + expect), 0.0, 1.0);
                std::binomial_distribution<std::int64_t> bin(model.shots, prob_up);
                values(j, col) = 2.0 * static_cast<double>(bin(rng)) * inv_m - 1.0;
            }
        }
    }
    return append_bias(std::move(values), bias_row);
}

/// Bloch vectors of single-qubit states.
inline TargetMatrix pauli_targets(std::span<const DensityMatrix> states) {
    RealMatrix y(3, static_cast<Index>(states.size()));
    for (std::size_t k = 0; k < states.size(); ++k) {
        detail::require_qubit(states[k], "pauli_targets");
        for (PauliAxis a : kPauliAxes) {
            y(static_cast<int>(a), static_cast<Index>(k)) = (pauli_matrix(a) * states[k].matrix()).trace().real();
        }
    }
    return {std::move(y)};
}

/// W = Y P^+.
inline TrainedReadout train_readout(const FeatureMatrix &p_train, const TargetMatrix &y_train,
                                    std::optional<double> rcond = {}) {
    if (p_train.n_states() != y_train.n_states() || p_train.n_states() < 1) {
        throw DimensionError("train_readout: feature and target state counts differ or are zero");
    }
    const double rc = rcond.value_or(default_rcond(p_train.values.rows(), p_train.values.cols()));
    RealMatrix w = y_train.values * pseudoinverse(p_train.values, rc);
    return {std::move(w), rc, singular_values(p_train.values)};
}

inline TargetMatrix predict(const TrainedReadout &readout, const FeatureMatrix &p_test) {
    if (readout.w.cols() != p_test.n_out()) {
        throw DimensionError("predict: readout expects " + std::to_string(readout.w.cols()) + " features, got " +
                             std::to_string(p_test.n_out()));
    }
    return {readout.w * p_test.values};
}

/// Mean over states of the squared Euclidean error of the Bloch vector.
inline double mse(const TargetMatrix &y_test, const TargetMatrix &y_pred) {
    if (y_test.values.rows() != y_pred.values.rows() || y_test.values.cols() != y_pred.values.cols()) {
        throw DimensionError("mse: shape mismatch");
    }
    if (y_test.n_states() == 0) {
        throw DimensionError("mse: no states");
    }
    return (y_test.values - y_pred.values).squaredNorm() / static_cast<double>(y_test.n_states());
}

/// sigma_max / sigma_min of P; +inf when sigma_min < 1e-300.
inline double condition_number(const FeatureMatrix &p) {
    if (p.values.size() == 0 || p.values.cwiseAbs().maxCoeff() == 0.0) {
        throw InvariantError("condition_number: feature matrix is zero");
    }
    const RealVector s = singular_values(p.values);
    const double smin = s(s.size() - 1);
    if (smin < 1e-300) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smin;
}

}  // namespace qelm
