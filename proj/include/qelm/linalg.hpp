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

// Dense complex linear algebra on qubit Hilbert spaces.
//
// Qubit ordering: index 0 is the leftmost (most significant) tensor factor, so
// basis state |b_0 b_1 ... b_{n-1}> has row index sum_k b_k 2^(n-1-k).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qelm/error.hpp"
#include "qelm/random.hpp"

namespace qelm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr int kDefaultMaxQubits = 12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kEntropyCutoff = 1e-12;

enum class PauliAxis { X = 0, Y = 1, Z = 2 };
inline constexpr PauliAxis kPauliAxes[3] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

enum class LogBase { Two, E };

inline const char *to_string(PauliAxis a) {
    switch (a) {
        case PauliAxis::X:
            return "x";
        case PauliAxis::Y:
            return "y";
        case PauliAxis::Z:
            return "z";
    }
    return "?";
}

inline std::size_t max_dim_for(int max_qubits) {
    return std::size_t{1} << max_qubits;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived> &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived> &m) {
    return m.allFinite();
}

inline bool is_power_of_two(Index n) {
    return n > 0 && (n & (n - 1)) == 0;
}

inline int log2_dim(Index n) {
    int k = 0;
    while ((Index{1} << k) < n) {
        ++k;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Strong types

/// Square Hermitian matrix whose dimension is a power of two.
class HermitianOperator {
  public:
    explicit HermitianOperator(ComplexMatrix m, double tol = kHermitianTol) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || !is_power_of_two(m_.rows())) {
            throw InvariantError("HermitianOperator: matrix must be square with power-of-two dimension");
        }
        if (!all_finite(m_)) {
            throw InvariantError("HermitianOperator: non-finite entries");
        }
        double dev = max_abs(m_ - m_.adjoint());
        if (dev > tol) {
            throw InvariantError("HermitianOperator: ||A - A^dag||_max = " + std::to_string(dev));
        }
    }

    /// Accepts a matrix that is Hermitian up to `tol` and removes the anti-Hermitian residue.
    static HermitianOperator symmetrized(const ComplexMatrix &m, double tol = 1e-9) {
        HermitianOperator h(m, tol);
        h.m_ = (0.5 * (h.m_ + h.m_.adjoint())).eval();
        return h;
    }

    const ComplexMatrix &matrix() const noexcept {
        return m_;
    }
    Index dim() const noexcept {
        return m_.rows();
    }
    int n_qubits() const noexcept {
        return log2_dim(m_.rows());
    }

  private:
    ComplexMatrix m_;
};

/// Square matrix with U^dag U = I to 1e-10.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(ComplexMatrix m, double tol = kUnitaryTol) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) {
            throw InvariantError("UnitaryMatrix: matrix must be square and nonempty");
        }
        if (!all_finite(m_)) {
            throw InvariantError("UnitaryMatrix: non-finite entries");
        }
        double dev = max_abs(m_.adjoint() * m_ - ComplexMatrix::Identity(m_.rows(), m_.cols()));
        if (dev > tol) {
            throw InvariantError("UnitaryMatrix: ||U^dag U - I||_max = " + std::to_string(dev));
        }
    }

    static UnitaryMatrix identity(Index dim) {
        return UnitaryMatrix(ComplexMatrix::Identity(dim, dim));
    }

    const ComplexMatrix &matrix() const noexcept {
        return m_;
    }
    Index dim() const noexcept {
        return m_.rows();
    }

  private:
    ComplexMatrix m_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) {
            throw InvariantError("DensityMatrix: matrix must be square and nonempty");
        }
        if (!all_finite(m_)) {
            throw InvariantError("DensityMatrix: non-finite entries");
        }
        double herm = max_abs(m_ - m_.adjoint());
        if (herm > kHermitianTol) {
            throw InvariantError("DensityMatrix: not Hermitian, deviation " + std::to_string(herm));
        }
        double tr_dev = std::abs(m_.trace() - Complex(1.0, 0.0));
        if (tr_dev > kTraceTol) {
            throw InvariantError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_dev));
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw NumericalError("DensityMatrix: eigenvalue check did not converge");
        }
        if (es.eigenvalues().minCoeff() < -kPositivityTol) {
            throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
        }
    }

    /// For producers that preserve positivity and trace by construction (channel
    /// outputs, partial traces). Hermiticity is enforced, the spectrum is not rechecked.
    static DensityMatrix unchecked(const ComplexMatrix &m) {
        DensityMatrix d;
        d.m_ = 0.5 * (m + m.adjoint());
        return d;
    }

    static DensityMatrix pure(const ComplexVector &psi) {
        ComplexVector v = psi / psi.norm();
        return unchecked(v * v.adjoint());
    }

    const ComplexMatrix &matrix() const noexcept {
        return m_;
    }
    Index dim() const noexcept {
        return m_.rows();
    }
    double purity() const {
        return (m_ * m_).trace().real();
    }

  private:
    DensityMatrix() = default;
    ComplexMatrix m_;
};

/// Eigenvalues ascending; eigenvectors are the columns of a unitary.
struct SpectralDecomposition {
    RealVector eigenvalues;
    UnitaryMatrix eigenvectors;
};

// ---------------------------------------------------------------------------
// Construction

inline const ComplexMatrix &pauli_matrix(PauliAxis axis) {
    static const ComplexMatrix x = (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
    static const ComplexMatrix y = (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    static const ComplexMatrix z = (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished();
    switch (axis) {
        case PauliAxis::X:
            return x;
        case PauliAxis::Y:
            return y;
        case PauliAxis::Z:
            break;
    }
    return z;
}

/// Kronecker product a (x) b. Throws DimensionError when either product dimension exceeds `max_dim`.
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b,
                          std::size_t max_dim = max_dim_for(kDefaultMaxQubits)) {
    const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
    const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
    if (rows > max_dim || cols > max_dim) {
        throw DimensionError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " exceeds the dimension cap " + std::to_string(max_dim));
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Tensor product of single-qubit factors; factor 0 is leftmost. Identity where
/// `factors[k]` is empty.
inline ComplexMatrix pauli_string(const std::vector<std::optional<PauliAxis>> &factors,
                                  int max_qubits = kDefaultMaxQubits) {
    if (static_cast<int>(factors.size()) > max_qubits) {
        throw DimensionError("pauli_string: " + std::to_string(factors.size()) + " qubits exceeds cap of " +
                             std::to_string(max_qubits));
    }
    static const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const auto &f : factors) {
        out = kron(out, f ? pauli_matrix(*f) : id2, max_dim_for(max_qubits));
    }
    return out;
}

/// I (x) ... (x) sigma^axis (x) ... (x) I with sigma at `site`.
inline HermitianOperator embed_pauli(PauliAxis axis, int site, int n_qubits, int max_qubits = kDefaultMaxQubits) {
    if (n_qubits < 1 || site < 0 || site >= n_qubits) {
        throw DimensionError("embed_pauli: site " + std::to_string(site) + " out of range for " +
                             std::to_string(n_qubits) + " qubits");
    }
    std::vector<std::optional<PauliAxis>> factors(static_cast<std::size_t>(n_qubits));
    factors[static_cast<std::size_t>(site)] = axis;
    return HermitianOperator(pauli_string(factors, max_qubits));
}

// ---------------------------------------------------------------------------
// Spectral methods

inline SpectralDecomposition herm_eig(const HermitianOperator &a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericalError("herm_eig: eigensolver did not converge (dim " + std::to_string(a.dim()) + ")");
    }
    return {es.eigenvalues(), UnitaryMatrix(es.eigenvectors())};
}

/// exp(-i H t) from a precomputed decomposition of H (hbar = 1).
inline UnitaryMatrix evolve_unitary(const SpectralDecomposition &spec, double t) {
    if (!std::isfinite(t)) {
        throw InvariantError("evolve_unitary: time must be finite");
    }
    const ComplexMatrix &v = spec.eigenvectors.matrix();
    ComplexVector phases(spec.eigenvalues.size());
    for (Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::polar(1.0, -spec.eigenvalues(k) * t);
    }
    ComplexMatrix u = (v * phases.asDiagonal()) * v.adjoint();
    return UnitaryMatrix(std::move(u));
}

// ---------------------------------------------------------------------------
// Partial trace and entropy

/// Reduced state on the qubits in `keep`, in ascending qubit order.
inline DensityMatrix partial_trace(const DensityMatrix &rho, int n_qubits, std::vector<int> keep) {
    if (n_qubits < 1 || rho.dim() != (Index{1} << n_qubits)) {
        throw DimensionError("partial_trace: rho dimension " + std::to_string(rho.dim()) + " is not 2^" +
                             std::to_string(n_qubits));
    }
    if (keep.empty()) {
        throw DimensionError("partial_trace: keep set is empty");
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.front() < 0 || keep.back() >= n_qubits) {
        throw DimensionError("partial_trace: keep index out of range");
    }
    std::vector<int> traced;
    for (int q = 0; q < n_qubits; ++q) {
        if (!std::binary_search(keep.begin(), keep.end(), q)) {
            traced.push_back(q);
        }
    }
    const int nk = static_cast<int>(keep.size());
    const int nt = static_cast<int>(traced.size());
    const Index dk = Index{1} << nk;
    const Index dt = Index{1} << nt;

    auto bit_of = [n_qubits](int qubit) { return Index{1} << (n_qubits - 1 - qubit); };
    std::vector<Index> kept_part(static_cast<std::size_t>(dk), 0);
    for (Index i = 0; i < dk; ++i) {
        for (int b = 0; b < nk; ++b) {
            if ((i >> (nk - 1 - b)) & 1) {
                kept_part[static_cast<std::size_t>(i)] |= bit_of(keep[static_cast<std::size_t>(b)]);
            }
        }
    }
    std::vector<Index> traced_part(static_cast<std::size_t>(dt), 0);
    for (Index k = 0; k < dt; ++k) {
        for (int b = 0; b < nt; ++b) {
            if ((k >> (nt - 1 - b)) & 1) {
                traced_part[static_cast<std::size_t>(k)] |= bit_of(traced[static_cast<std::size_t>(b)]);
            }
        }
    }

    const ComplexMatrix &m = rho.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (Index i = 0; i < dk; ++i) {
        for (Index j = 0; j < dk; ++j) {
            Complex acc = 0;
            for (Index k = 0; k < dt; ++k) {
                const Index tk = traced_part[static_cast<std::size_t>(k)];
                acc += m(kept_part[static_cast<std::size_t>(i)] | tk, kept_part[static_cast<std::size_t>(j)] | tk);
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix::unchecked(out);
}

inline double log_in_base(double x, LogBase base) {
    return base == LogBase::Two ? std::log2(x) : std::log(x);
}

/// -sum lambda log(lambda) over eigenvalues above kEntropyCutoff.
inline double von_neumann_entropy(const DensityMatrix &rho, LogBase base = LogBase::Two) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("von_neumann_entropy: eigensolver did not converge");
    }
    double s = 0.0;
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double lam = es.eigenvalues()(k);
        if (lam > kEntropyCutoff) {
            s -= lam * log_in_base(lam, base);
        }
    }
    return std::max(s, 0.0);
}

// ---------------------------------------------------------------------------
// Random sampling

inline ComplexMatrix complex_gaussian(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's diagonal
/// moved into Q.
inline UnitaryMatrix haar_unitary(Index dim, Rng &rng) {
    if (dim < 1) {
        throw DimensionError("haar_unitary: dim must be >= 1");
    }
    ComplexMatrix g = complex_gaussian(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix &r = qr.matrixQR();
    for (Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= mag > 0 ? d / mag : Complex(1.0, 0.0);
    }
    return UnitaryMatrix(std::move(q));
}

/// Pure qubit state uniform on the Bloch sphere.
inline DensityMatrix random_pure_qubit_state(Rng &rng) {
    ComplexVector psi = complex_gaussian(2, 1, rng).col(0);
    return DensityMatrix::pure(psi);
}

// ---------------------------------------------------------------------------
// Pseudoinverse

inline double default_rcond(Index rows, Index cols) {
    return 1e-12 * static_cast<double>(std::max(rows, cols));
}

template <typename Derived>
RealVector singular_values(const Eigen::MatrixBase<Derived> &m) {
    using Plain = typename Derived::PlainObject;
    Eigen::JacobiSVD<Plain> svd(m.eval());
    return svd.singularValues();
}

/// Moore-Penrose pseudoinverse via SVD; singular values below rcond * sigma_max are
/// treated as zero. `rcond` defaults to 1e-12 * max(rows, cols).
template <typename Derived>
typename Derived::PlainObject pseudoinverse(const Eigen::MatrixBase<Derived> &m, std::optional<double> rcond = {}) {
    using Plain = typename Derived::PlainObject;
    const double rc = rcond.value_or(default_rcond(m.rows(), m.cols()));
    if (!(rc >= 0.0)) {
        throw InvariantError("pseudoinverse: rcond must be nonnegative");
    }
    Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector &s = svd.singularValues();
    RealVector inv = RealVector::Zero(s.size());
    const double cutoff = s.size() > 0 ? rc * s(0) : 0.0;
    for (Index k = 0; k < s.size(); ++k) {
        if (s(k) > 0.0 && s(k) >= cutoff) {
            inv(k) = 1.0 / s(k);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace qelm
