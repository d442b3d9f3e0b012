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

// Train a QELM readout on one fully connected reservoir and report how well it
// reconstructs unseen qubit states, along with the scrambling diagnostics.

#include <cstdio>
#include <vector>

#include "qelm/qelm.hpp"

int main() {
    using namespace qelm;

    HamiltonianSpec spec;
    spec.n_reservoir = 5;
    spec.topology = Topology::FullyConnected;
    spec.scheme = CouplingScheme::SingleLink;
    spec.seed = 7;
    const ReservoirHamiltonian h = sample_hamiltonian(spec);
    const SpectralDecomposition eig = herm_eig(h.h_total);

    Rng rng = make_rng(2024);
    std::vector<DensityMatrix> train, test;
    for (int k = 0; k < 50; ++k) train.push_back(random_pure_qubit_state(rng));
    for (int k = 0; k < 50; ++k) test.push_back(random_pure_qubit_state(rng));
    const TargetMatrix y_train = pauli_targets(train);
    const TargetMatrix y_test = pauli_targets(test);

    const ShotModel shots{ShotMode::JointBitstrings, 100000};
    std::printf("%6s %12s %12s %12s %12s\n", "t", "mse", "kappa", "otoc", "holevo");
    for (double t : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        const UnitaryMatrix u = evolve_unitary(eig, t);
        const FeatureMatrix p_train = sample_features(u, train, spec.n_reservoir, shots, rng);
        const FeatureMatrix p_test = sample_features(u, test, spec.n_reservoir, shots, rng);
        const TrainedReadout w = train_readout(p_train, y_train);
        std::printf("%6.2f %12.4e %12.4e %12.4e %12.4e\n", t, mse(y_test, predict(w, p_test)),
                    condition_number(p_train), averaged_otoc(u, spec.n_reservoir).averaged,
                    local_holevo_profile(u, spec.n_reservoir).averaged);
    }
    return 0;
}
