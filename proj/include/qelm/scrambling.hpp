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

// Information-scrambling quantifiers: out-of-time-ordered correlators between
// reservoir sigma_z and input Paulis, and local Holevo information per node.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qelm/engine.hpp"
#include "qelm/linalg.hpp"

namespace qelm {

/// Divisor of the trace term: the full (N+1)-qubit dimension, or 2^N to reproduce
/// the literal per-pair formula.
enum class OtocNormalization { FullSpace, ReservoirOnly };

inline const char *to_string(OtocNormalization n) {
    return n == OtocNormalization::FullSpace ? "full" : "reservoir";
}

struct OtocResult {
    RealMatrix per_pair;  // N x 3: reservoir site i, input axis (x, y, z)
    double averaged = 0.0;
};

struct HolevoResult {
    RealMatrix per_node_per_axis;  // N x 3
    RealVector per_node;
    double averaged = 0.0;
    LogBase log_base = LogBase::Two;
};

/// U^dag O U.
inline HermitianOperator heisenberg_evolve(const UnitaryMatrix &u, const HermitianOperator &o) {
    if (u.dim() != o.dim()) {
        throw DimensionError("heisenberg_evolve: dimension mismatch");
    }
    return HermitianOperator::symmetrized(u.matrix().adjoint() * o.matrix() * u.matrix());
}

/// 1 - Tr[A B A B] / dim for Hermitian involutions A = O_A(t), B = O_B.
inline double otoc_pair(const HermitianOperator &a_t, const HermitianOperator &b, Index dim) {
    if (a_t.dim() != b.dim()) {
        throw DimensionError("otoc_pair: dimension mismatch");
    }
    const ComplexMatrix id = ComplexMatrix::Identity(a_t.dim(), a_t.dim());
    if (max_abs(a_t.matrix() * a_t.matrix() - id) > 1e-10 || max_abs(b.matrix() * b.matrix() - id) > 1e-10) {
        throw InvariantError("otoc_pair: operators must square to the identity");
    }
    const Complex tr = (a_t.matrix() * b.matrix() * a_t.matrix() * b.matrix()).trace();
    return 1.0 - tr.real() / static_cast<double>(dim);
}

namespace detail {

/// U (I (x) sigma^axis) with the Pauli on the last qubit, by column permutation.
inline ComplexMatrix times_input_pauli(const ComplexMatrix &u, PauliAxis axis) {
    ComplexMatrix out(u.rows(), u.cols());
    for (Index c = 0; c < u.cols(); ++c) {
        const bool one = c & 1;
        switch (axis) {
            case PauliAxis::X:
                out.col(c) = u.col(c ^ 1);
                break;
            case PauliAxis::Y:
                out.col(c) = (one ? Complex(0, -1) : Complex(0, 1)) * u.col(c ^ 1);
                break;
            case PauliAxis::Z:
                out.col(c) = one ? (-u.col(c)).eval() : u.col(c);
                break;
        }
    }
    return out;
}

}  // namespace detail

/// C^i_alpha = 1 - Tr[sigma^z_i(t) sigma^alpha_in sigma^z_i(t) sigma^alpha_in] / d and their
/// plain average over i and alpha.
///
/// Uses Tr[U^dag Z U B U^dag Z U B] = Tr[Z W Z W] with W = U B U^dag Hermitian, so each
/// trace is sum_ab z(a) z(b) |W_ab|^2.
inline OtocResult averaged_otoc(const UnitaryMatrix &u, int n_reservoir,
                                OtocNormalization norm = OtocNormalization::FullSpace) {
    detail::require_reservoir_unitary(u, n_reservoir, "averaged_otoc");
    const Index d = u.dim();
    const int nq = n_reservoir + 1;
    const double divisor = static_cast<double>(norm == OtocNormalization::FullSpace ? d : d / 2);

    std::vector<RealVector> signs;
    for (int i = 0; i < n_reservoir; ++i) {
        RealVector s(d);
        for (Index a = 0; a < d; ++a) s(a) = ((a >> (nq - 1 - i)) & 1) ? -1.0 : 1.0;
        signs.push_back(std::move(s));
    }

    OtocResult res;
    res.per_pair.resize(n_reservoir, 3);
    for (PauliAxis axis : kPauliAxes) {
        const ComplexMatrix w = detail::times_input_pauli(u.matrix(), axis) * u.matrix().adjoint();
        const RealMatrix w2 = w.cwiseAbs2();
        for (int i = 0; i < n_reservoir; ++i) {
            const auto &s = signs[static_cast<std::size_t>(i)];
            const double tr = s.dot(w2 * s);
            res.per_pair(i, static_cast<int>(axis)) = 1.0 - tr / divisor;
        }
    }
    res.averaged = res.per_pair.mean();
    return res;
}

/// Single-qubit marginal on reservoir qubit `node` of U(|r><r| (x) rho_in)U^dag.
inline DensityMatrix local_channel(const InjectedColumns &cols, const DensityMatrix &rho_in, int n_reservoir,
                                   int node) {
    detail::require_qubit(rho_in, "local_channel");
    if (node < 0 || node >= n_reservoir) {
        throw DimensionError("local_channel: node " + std::to_string(node) + " out of range");
    }
    const Index d = cols.c0.size();
    const Index mask = Index{1} << (n_reservoir - node);  // bit of `node` among N+1 qubits
    const ComplexMatrix &r = rho_in.matrix();
    const ComplexVector *c[2] = {&cols.c0, &cols.c1};
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (Index x = 0; x < d; ++x) {
        if (x & mask) continue;
        const Index x1 = x | mask;
        const Index idx[2] = {x, x1};
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
                Complex acc = 0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) acc += r(a, b) * (*c[a])(idx[s]) * std::conj((*c[b])(idx[t]));
                out(s, t) += acc;
            }
        }
    }
    return DensityMatrix::unchecked(out);
}

inline DensityMatrix local_channel(const UnitaryMatrix &u, const DensityMatrix &rho_in, int n_reservoir, int node,
                                   const Preparation &prep = {}) {
    return local_channel(InjectedColumns::from(u, n_reservoir, prep), rho_in, n_reservoir, node);
}

/// chi = S(sum p_i rho_i) - sum p_i S(rho_i).
inline double holevo_information(std::span<const std::pair<double, DensityMatrix>> ensemble,
                                 LogBase base = LogBase::Two) {
    if (ensemble.empty()) {
        throw InvariantError("holevo_information: empty ensemble");
    }
    const Index dim = ensemble.front().second.dim();
    ComplexMatrix avg = ComplexMatrix::Zero(dim, dim);
    double mixed_entropy = 0.0;
    for (const auto &[p, rho] : ensemble) {
        if (rho.dim() != dim) {
            throw DimensionError("holevo_information: ensemble states differ in dimension");
        }
        avg += p * rho.matrix();
        mixed_entropy += p * von_neumann_entropy(rho, base);
    }
    return von_neumann_entropy(DensityMatrix::unchecked(avg), base) - mixed_entropy;
}

/// Eigenstates |+alpha>, |-alpha> of a Pauli as density matrices (I +- sigma)/2.
inline std::pair<DensityMatrix, DensityMatrix> pauli_eigenstates(PauliAxis axis) {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return {DensityMatrix::unchecked(0.5 * (id + pauli_matrix(axis))),
            DensityMatrix::unchecked(0.5 * (id - pauli_matrix(axis)))};
}

/// Holevo information of the equiprobable Pauli-eigenstate ensembles seen through each
/// single-node channel.
inline HolevoResult local_holevo_profile(const UnitaryMatrix &u, int n_reservoir, LogBase base = LogBase::Two,
                                        const Preparation &prep = {}) {
    const auto cols = InjectedColumns::from(u, n_reservoir, prep);
    HolevoResult res;
    res.log_base = base;
    res.per_node_per_axis.resize(n_reservoir, 3);
    for (PauliAxis axis : kPauliAxes) {
        const auto [plus, minus] = pauli_eigenstates(axis);
        for (int j = 0; j < n_reservoir; ++j) {
            const std::pair<double, DensityMatrix> ens[2] = {{0.5, local_channel(cols, plus, n_reservoir, j)},
                                                             {0.5, local_channel(cols, minus, n_reservoir, j)}};
            res.per_node_per_axis(j, static_cast<int>(axis)) = holevo_information(ens, base);
        }
    }
    res.per_node = res.per_node_per_axis.rowwise().mean();
    res.averaged = res.per_node.mean();
    return res;
}

}  // namespace qelm
