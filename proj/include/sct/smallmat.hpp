// Copyright 2026 The SCT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra for the small (d <= 8) Hermitian and unitary
// matrices that appear in the forward model.

#ifndef SCT_SMALLMAT_HPP
#define SCT_SMALLMAT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "sct/error.hpp"

namespace sct {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 8;

/// Square complex matrix with inline storage for up to 8x8 entries.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kHermitianTolerance = 1e-12;

inline void check_square(const CMatrix &m) {
    if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDim) {
        throw Error(Errc::wrong_dimension, "expected a square matrix of dimension 1..8");
    }
}

/// Largest deviation from Hermiticity, max_ij |M_ij - conj(M_ji)|.
inline double hermitian_defect(const CMatrix &m) {
    check_square(m);
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix &m, double rel_tol = kHermitianTolerance) {
    return hermitian_defect(m) <= rel_tol * m.norm();
}

inline Complex trace(const CMatrix &m) { return m.trace(); }

/// tr(A B) without forming the product.
inline Complex trace_product(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw Error(Errc::dimension_mismatch, "trace_product operands do not conform");
    }
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            acc += a(i, k) * b(k, i);
        }
    }
    return acc;
}

struct HermitianEigen {
    RVector values;  // ascending
    CMatrix vectors;
};

/// Eigendecomposition of (M + M^dag)/2. The input must already be Hermitian
/// to within `rel_tol` relative to its Frobenius norm.
inline HermitianEigen hermitian_eigen(const CMatrix &m, double rel_tol = kHermitianTolerance) {
    check_square(m);
    if (!is_hermitian(m, rel_tol)) {
        throw Error(Errc::non_hermitian_input, "matrix is not Hermitian within tolerance");
    }
    CMatrix sym = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::eigen_failure, "Hermitian eigendecomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// U = exp(-i G) for Hermitian G, via U = V diag(exp(-i lambda_k)) V^dag.
inline CMatrix expi_neg(const CMatrix &g) {
    HermitianEigen eig = hermitian_eigen(g, 1e-10);
    const Eigen::Index n = g.rows();
    CMatrix scaled = eig.vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
        scaled.col(k) *= std::exp(Complex(0.0, -eig.values(k)));
    }
    return scaled * eig.vectors.adjoint();
}

inline RVector eigenvalues(const CMatrix &m) { return hermitian_eigen(m).values; }

inline double min_eigenvalue(const CMatrix &m) { return hermitian_eigen(m).values(0); }

/// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm(const CMatrix &m) { return hermitian_eigen(m).values.cwiseAbs().sum(); }

inline bool is_positive_semidefinite(const CMatrix &m) {
    HermitianEigen eig = hermitian_eigen(m);
    return eig.values(0) >= -1e-10 * eig.values.cwiseAbs().sum();
}

inline CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

inline double unitarity_defect(const CMatrix &u) {
    return (u * u.adjoint() - identity(static_cast<int>(u.rows()))).cwiseAbs().maxCoeff();
}

struct PsdClip {
    CMatrix matrix;
    double clipped = 0.0;  // total weight of the removed negative eigenvalues
};

/// Projects onto the PSD cone by zeroing negative eigenvalues, then restores
/// the original trace.
inline PsdClip psd_clip(const CMatrix &m) {
    HermitianEigen eig = hermitian_eigen(m);
    const double original_trace = eig.values.sum();
    RVector clipped = eig.values.cwiseMax(0.0);
    PsdClip out;
    out.clipped = (clipped - eig.values).sum();
    const double kept = clipped.sum();
    if (kept > 0.0) {
        clipped *= original_trace / kept;
    }
    out.matrix = eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    return out;
}

/// Principal square root of a PSD matrix (negative round-off eigenvalues clamp to 0).
inline CMatrix psd_sqrt(const CMatrix &m) {
    HermitianEigen eig = hermitian_eigen(m);
    RVector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two
/// unit-trace PSD matrices.
inline double fidelity(const CMatrix &rho, const CMatrix &sigma) {
    CMatrix root = psd_sqrt(rho);
    CMatrix inner = root * sigma * root;
    inner = (inner + inner.adjoint()) * 0.5;
    const double t = psd_sqrt(inner).trace().real();
    return std::clamp(t * t, 0.0, 1.0);
}

}  // namespace sct

#endif  // SCT_SMALLMAT_HPP
