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

#include "qelm/scrambling.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "oracles.hpp"

using namespace qelm;

namespace {

UnitaryMatrix swap_qubits(int n, int p, int q) {
    const Index d = Index{1} << n;
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Index x = 0; x < d; ++x) {
        const Index bp = (x >> (n - 1 - p)) & 1, bq = (x >> (n - 1 - q)) & 1;
        Index y = x & ~((Index{1} << (n - 1 - p)) | (Index{1} << (n - 1 - q)));
        y |= (bp << (n - 1 - q)) | (bq << (n - 1 - p));
        m(y, x) = 1.0;
    }
    return UnitaryMatrix(m);
}

ReservoirHamiltonian hamiltonian(int n, Topology t, CouplingScheme s, std::uint64_t seed) {
    HamiltonianSpec spec;
    spec.n_reservoir = n;
    spec.topology = t;
    spec.scheme = s;
    spec.seed = seed;
    return sample_hamiltonian(spec);
}

/// Literal route: heisenberg_evolve + otoc_pair with embedded Paulis.
OtocResult literal_otoc(const UnitaryMatrix &u, int n, double divisor) {
    OtocResult r;
    r.per_pair.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        const auto zt = heisenberg_evolve(u, embed_pauli(PauliAxis::Z, i, n + 1));
        for (PauliAxis a : kPauliAxes) {
            const auto b = embed_pauli(a, n, n + 1);
            r.per_pair(i, static_cast<int>(a)) = otoc_pair(zt, b, static_cast<Index>(divisor));
        }
    }
    r.averaged = r.per_pair.mean();
    return r;
}

}  // namespace

TEST(HeisenbergEvolve, IdentityLeavesOperator) {
    Rng rng = make_rng(1);
    const HermitianOperator o(oracle::random_hermitian(4, rng));
    EXPECT_LE(max_abs(heisenberg_evolve(UnitaryMatrix::identity(4), o).matrix() - o.matrix()), 1e-15);
}

TEST(HeisenbergEvolve, QuarterTurnAboutXTakesZToY) {
    const auto s = herm_eig(HermitianOperator(pauli_matrix(PauliAxis::X)));
    const auto u = evolve_unitary(s, std::numbers::pi / 4);
    const auto out = heisenberg_evolve(u, HermitianOperator(pauli_matrix(PauliAxis::Z)));
    EXPECT_LE(max_abs(out.matrix() - pauli_matrix(PauliAxis::Y)), 1e-12);
}

TEST(HeisenbergEvolve, PreservesTraceAndSpectrum) {
    Rng rng = make_rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const HermitianOperator o(oracle::random_hermitian(8, rng));
        const auto u = haar_unitary(8, rng);
        const auto out = heisenberg_evolve(u, o);
        EXPECT_LT(std::abs(out.matrix().trace() - o.matrix().trace()), 1e-12);
        EXPECT_LE(max_abs(out.matrix() - out.matrix().adjoint()), 1e-12);
        EXPECT_LE((herm_eig(out).eigenvalues - herm_eig(o).eigenvalues).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_THROW(heisenberg_evolve(UnitaryMatrix::identity(2), HermitianOperator(ComplexMatrix::Identity(4, 4))),
                 DimensionError);
}

TEST(OtocPair, Examples) {
    const HermitianOperator x(pauli_matrix(PauliAxis::X)), z(pauli_matrix(PauliAxis::Z));
    EXPECT_NEAR(otoc_pair(x, x, 2), 0.0, 1e-15);
    EXPECT_NEAR(otoc_pair(x, z, 2), 2.0, 1e-15);
    const auto zi = embed_pauli(PauliAxis::Z, 0, 2), ix = embed_pauli(PauliAxis::X, 1, 2);
    EXPECT_NEAR(otoc_pair(zi, ix, 4), 0.0, 1e-15);
}

TEST(OtocPair, RejectsNonInvolutions) {
    const HermitianOperator x(pauli_matrix(PauliAxis::X));
    const HermitianOperator half(0.5 * pauli_matrix(PauliAxis::Z));
    EXPECT_THROW(otoc_pair(x, half, 2), InvariantError);
    EXPECT_THROW(otoc_pair(x, embed_pauli(PauliAxis::X, 0, 2), 2), DimensionError);
}

TEST(OtocPair, InvariantUnderJointConjugationAndSign) {
    Rng rng = make_rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const auto u = haar_unitary(8, rng);
        const auto v = haar_unitary(8, rng);
        const auto a = heisenberg_evolve(u, embed_pauli(PauliAxis::Z, 0, 3));
        const auto b = embed_pauli(PauliAxis::Y, 2, 3);
        const double c = otoc_pair(a, b, 8);
        EXPECT_NEAR(otoc_pair(heisenberg_evolve(v, a), heisenberg_evolve(v, b), 8), c, 1e-10);
        EXPECT_NEAR(otoc_pair(a, HermitianOperator(-b.matrix()), 8), c, 1e-12);
        EXPECT_NEAR(c, oracle::otoc_commutator(a.matrix(), b.matrix(), 8.0), 1e-10);
    }
}

TEST(AveragedOtoc, ZeroAtTimeZero) {
    for (int n = 1; n <= 4; ++n) {
        const auto r = averaged_otoc(UnitaryMatrix::identity(Index{1} << (n + 1)), n);
        EXPECT_NEAR(r.averaged, 0.0, 1e-12);
        EXPECT_LE(r.per_pair.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(AveragedOtoc, TwoQubitXXClosedForm) {
    // H = sigma_x (x) sigma_x: C_x = 0 and C_y = C_z = 1 - cos(4t).
    const auto s = herm_eig(HermitianOperator(kron(pauli_matrix(PauliAxis::X), pauli_matrix(PauliAxis::X))));
    for (double t : {0.0, 0.1, 0.3, 0.7, 1.234, 2.5}) {
        const auto r = averaged_otoc(evolve_unitary(s, t), 1);
        const double c = 1.0 - std::cos(4.0 * t);
        EXPECT_NEAR(r.per_pair(0, 0), 0.0, 1e-10);
        EXPECT_NEAR(r.per_pair(0, 1), c, 1e-10);
        EXPECT_NEAR(r.per_pair(0, 2), c, 1e-10);
        EXPECT_NEAR(r.averaged, 2.0 * c / 3.0, 1e-10);
    }
}

TEST(AveragedOtoc, FastRouteMatchesLiteralAndCommutatorRoutes) {
    std::uint64_t seed = 10;
    for (int n = 1; n <= 4; ++n)
        for (CouplingScheme sch : kAllSchemes) {
            const auto h = hamiltonian(n, Topology::Chain, sch, seed++);
            const auto eig = herm_eig(h.h_total);
            for (double t : {0.3, 2.0}) {
                const auto u = evolve_unitary(eig, t);
                const double d = static_cast<double>(u.dim());
                const auto fast = averaged_otoc(u, n);
                const auto lit = literal_otoc(u, n, d);
                EXPECT_LE(max_abs(fast.per_pair - lit.per_pair), 1e-10);
                EXPECT_NEAR(fast.averaged, oracle::averaged_otoc_commutator(u.matrix(), n), 1e-10);
                // 2^N divisor
                const auto fast_r = averaged_otoc(u, n, OtocNormalization::ReservoirOnly);
                EXPECT_LE(max_abs(fast_r.per_pair - literal_otoc(u, n, d / 2).per_pair), 1e-10);
            }
        }
}

TEST(AveragedOtoc, BoundedByTwo) {
    Rng rng = make_rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const auto r = averaged_otoc(haar_unitary(16, rng), 3);
        EXPECT_GE(r.per_pair.minCoeff(), -1e-12);
        EXPECT_LE(r.per_pair.maxCoeff(), 2.0 + 1e-12);
    }
}

TEST(AveragedOtoc, SmallTimeIsSmallAndGrowing) {
    std::uint64_t seed = 50;
    for (Topology topo : kAllTopologies)
        for (CouplingScheme sch : kAllSchemes) {
            const auto eig = herm_eig(hamiltonian(4, topo, sch, seed++).h_total);
            double prev = averaged_otoc(evolve_unitary(eig, 1e-3), 4).averaged;
            EXPECT_LE(prev, 1e-4);
            for (double t : {1e-2, 3e-2, 0.1, 0.125}) {
                const double c = averaged_otoc(evolve_unitary(eig, t), 4).averaged;
                EXPECT_GT(c, prev) << to_string(topo) << "/" << to_string(sch) << " t=" << t;
                prev = c;
            }
        }
}

TEST(AveragedOtoc, ReservoirOnlyNormalizationOffset) {
    // With the 2^N divisor the t=0 value is 1 - 2 = -1.
    const auto r = averaged_otoc(UnitaryMatrix::identity(8), 2, OtocNormalization::ReservoirOnly);
    EXPECT_NEAR(r.averaged, -1.0, 1e-12);
}

TEST(LocalChannel, IdentityGivesGroundState) {
    Rng rng = make_rng(5);
    ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    for (int node = 0; node < 3; ++node)
        EXPECT_LE(max_abs(local_channel(UnitaryMatrix::identity(16), random_pure_qubit_state(rng), 3, node).matrix() - zero),
                  1e-15);
}

TEST(LocalChannel, SwapDeliversInput) {
    Rng rng = make_rng(6);
    const auto rho = random_pure_qubit_state(rng);
    for (int node = 0; node < 3; ++node)
        EXPECT_LE(max_abs(local_channel(swap_qubits(4, node, 3), rho, 3, node).matrix() - rho.matrix()), 1e-15);
}

TEST(LocalChannel, MatchesPartialTraceOracle) {
    Rng rng = make_rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        const auto u = haar_unitary(16, rng);
        const auto rho = random_pure_qubit_state(rng);
        const ComplexMatrix joint = u.matrix() * oracle::injected_state(rho.matrix(), 3) * u.matrix().adjoint();
        for (int node = 0; node < 3; ++node) {
            const auto out = local_channel(u, rho, 3, node);
            EXPECT_LE(max_abs(out.matrix() - oracle::partial_trace_sum(joint, 4, {node})), 1e-12);
            EXPECT_NO_THROW(DensityMatrix{out.matrix()});
        }
    }
    EXPECT_THROW(local_channel(UnitaryMatrix::identity(16), random_pure_qubit_state(rng), 3, 3), DimensionError);
}

TEST(Holevo, IdenticalOutputsGiveZero) {
    const auto r = local_holevo_profile(UnitaryMatrix::identity(32), 4);
    EXPECT_LE(r.per_node_per_axis.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.averaged, 0.0, 1e-12);
}

TEST(Holevo, SwapTransmitsOneBitToItsNode) {
    for (int node = 0; node < 3; ++node) {
        const auto r = local_holevo_profile(swap_qubits(4, node, 3), 3);
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 3; ++a) EXPECT_NEAR(r.per_node_per_axis(j, a), j == node ? 1.0 : 0.0, 1e-12);
        EXPECT_NEAR(r.per_node(node), 1.0, 1e-12);
        EXPECT_NEAR(r.averaged, 1.0 / 3.0, 1e-12);
    }
}

TEST(Holevo, BoundsAndBaseConversion) {
    Rng rng = make_rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const auto u = haar_unitary(16, rng);
        const auto bits = local_holevo_profile(u, 3, LogBase::Two);
        const auto nats = local_holevo_profile(u, 3, LogBase::E);
        EXPECT_GE(bits.per_node_per_axis.minCoeff(), -1e-10);
        EXPECT_LE(bits.per_node_per_axis.maxCoeff(), 1.0 + 1e-10);
        EXPECT_LE(max_abs(nats.per_node_per_axis - std::log(2.0) * bits.per_node_per_axis), 1e-12);
        EXPECT_NEAR(bits.averaged, bits.per_node_per_axis.mean(), 1e-15);
    }
}

TEST(Holevo, DataProcessing) {
    Rng rng = make_rng(9);
    for (int rep = 0; rep < 5; ++rep) {
        const auto u = haar_unitary(16, rng);
        const auto [plus, minus] = pauli_eigenstates(PauliAxis::Z);
        const auto full = [&](const DensityMatrix &rho) {
            return DensityMatrix::unchecked(u.matrix() * oracle::injected_state(rho.matrix(), 3) * u.matrix().adjoint());
        };
        const std::pair<double, DensityMatrix> ens[2] = {{0.5, full(plus)}, {0.5, full(minus)}};
        EXPECT_NEAR(holevo_information(ens), 1.0, 1e-10);
        const auto local = local_holevo_profile(u, 3);
        EXPECT_LE(local.per_node_per_axis.col(2).maxCoeff(), 1.0 + 1e-10);
    }
}

TEST(Holevo, EnsembleFormula) {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    b(0, 0) = 0.5;
    b(1, 1) = 0.5;
    const std::pair<double, DensityMatrix> ens[2] = {{0.5, DensityMatrix(a)}, {0.5, DensityMatrix(b)}};
    // S(diag(3/4, 1/4)) - (0 + 1)/2
    EXPECT_NEAR(holevo_information(ens), oracle::entropy_two_level(0.75, 2.0) - 0.5, 1e-14);
    EXPECT_THROW(holevo_information(std::span<const std::pair<double, DensityMatrix>>{}), InvariantError);
}
