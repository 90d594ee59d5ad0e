// Copyright 2026 The qhist Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/hilbert/tensor_space.hpp"

namespace qhist {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw InvariantError(std::string(what) + ": operator is not square");
}

inline double hermiticity_error(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m.size() == 0 || hermiticity_error(m) <= tol);
}

inline bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.size() == 0 || d.cwiseAbs().maxCoeff() <= tol;
}

inline bool is_projector(const Matrix& p, double tol) {
  if (!is_hermitian(p, tol)) return false;
  return p.size() == 0 || (p * p - p).cwiseAbs().maxCoeff() <= tol;
}

inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  if (std::min(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<Matrix>(m).singularValues();
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

/// ||W||_1 = Tr sqrt(W^dagger W), the sum of singular values.
inline double trace_norm(const Matrix& w) { return singular_values(w).sum(); }

inline double spectral_norm(const Matrix& w) {
  const RealVector s = singular_values(w);
  return s.size() == 0 ? 0.0 : s(0);
}

namespace detail {

// Upper-triangular factor of a thin QR, so that X = Q R with Q having
// orthonormal columns.
inline Matrix thin_r(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  const Eigen::Index k = std::min(x.rows(), x.cols());
  Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  return r;
}

}  // namespace detail

/// Singular values of X Y^dagger without forming the (possibly large) product
/// when X and Y are tall: with X = Q_x R_x and Y = Q_y R_y the product has the
/// singular values of R_x R_y^dagger.
inline RealVector product_singular_values(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) throw InvariantError("product_singular_values: inner dimension mismatch");
  if (x.cols() >= x.rows() || x.cols() >= y.rows()) return singular_values(x * y.adjoint());
  return singular_values(detail::thin_r(x) * detail::thin_r(y).adjoint());
}

/// ||X Y^dagger||_1.
inline double trace_norm_product(const Matrix& x, const Matrix& y) { return product_singular_values(x, y).sum(); }

inline double spectral_norm_product(const Matrix& x, const Matrix& y) {
  const RealVector s = product_singular_values(x, y);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Eigen-decomposition of a Hermitian PSD matrix with rounding residue
/// removed: eigenvalues below -tol.psd raise InvariantError, the remaining
/// negative ones and those under the spectral noise floor are set to zero.
struct PsdSpectrum {
  RealVector values;  // ascending
  Matrix vectors;
};

inline double spectral_noise_floor(Eigen::Index dim, double largest) {
  return 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Eigen::Index>(dim, 1)) *
         std::max(largest, 0.0);
}

inline PsdSpectrum psd_spectrum(const Matrix& rho, double tol_psd) {
  require_square(rho, "psd_spectrum");
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  if (es.info() != Eigen::Success) throw Error("eigen-decomposition failed to converge");
  PsdSpectrum out{es.eigenvalues(), es.eigenvectors()};
  if (out.values.size() == 0) return out;
  if (out.values(0) < -tol_psd) {
    throw InvariantError("matrix is not positive semidefinite (eigenvalue " + std::to_string(out.values(0)) + ")");
  }
  const double floor = spectral_noise_floor(rho.rows(), out.values.maxCoeff());
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    if (out.values(i) <= floor) out.values(i) = 0.0;
  }
  return out;
}

inline Matrix psd_sqrt(const Matrix& rho, double tol_psd) {
  const PsdSpectrum s = psd_spectrum(rho, tol_psd);
  return s.vectors * s.values.cwiseSqrt().asDiagonal() * s.vectors.adjoint();
}

/// Un-squared quantum fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1.
inline double fidelity(const Matrix& rho, const Matrix& sigma, const Tolerances& tol = {}) {
  require_square(rho, "fidelity");
  require_square(sigma, "fidelity");
  if (rho.rows() != sigma.rows()) throw InvariantError("fidelity: dimension mismatch");
  return trace_norm(psd_sqrt(rho, tol.psd) * psd_sqrt(sigma, tol.psd));
}

/// Orthogonal projector onto the eigenspace of rho with eigenvalues > rank_tol.
inline Matrix support_projector(const Matrix& rho, double rank_tol, double tol_psd = Tolerances{}.psd) {
  const PsdSpectrum s = psd_spectrum(rho, tol_psd);
  Matrix p = Matrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (s.values(i) > rank_tol) p += s.vectors.col(i) * s.vectors.col(i).adjoint();
  }
  return p;
}

/// Orthonormal basis (as columns) of the support of rho.
inline Matrix support_basis(const Matrix& rho, double rank_tol, double tol_psd = Tolerances{}.psd) {
  const PsdSpectrum s = psd_spectrum(rho, tol_psd);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) count += s.values(i) > rank_tol ? 1 : 0;
  Matrix basis(rho.rows(), count);
  Eigen::Index c = 0;
  for (Eigen::Index i = s.values.size(); i-- > 0;) {
    if (s.values(i) > rank_tol) basis.col(c++) = s.vectors.col(i);
  }
  return basis;
}

/// Orthonormal basis of the column span of m (columns with singular value > tol).
inline Matrix column_span(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > tol ? 1 : 0;
  return svd.matrixU().leftCols(rank);
}

/// Spectral factor K with K K^dagger = rho, keeping only non-zero eigenvalues.
inline Matrix psd_factor(const Matrix& rho, double tol_psd) {
  const PsdSpectrum s = psd_spectrum(rho, tol_psd);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) count += s.values(i) > 0.0 ? 1 : 0;
  Matrix k(rho.rows(), count);
  Eigen::Index c = 0;
  for (Eigen::Index i = s.values.size(); i-- > 0;) {
    if (s.values(i) > 0.0) k.col(c++) = s.vectors.col(i) * std::sqrt(s.values(i));
  }
  return k;
}

}  // namespace qhist
