#pragma once

// Seeded generators for random Hermitian matrices, unitaries and pencils.

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <vector>

#include "spectra/hermat.hpp"
#include "spectra/pencil.hpp"

namespace spectra {

using Rng = std::mt19937_64;

inline Matrix random_complex(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline HermitianMatrix random_hermitian(Rng& rng, Index n) {
  const Matrix m = random_complex(rng, n, n);
  return HermitianMatrix::symmetrized(0.5 * (m + m.adjoint()));
}

/// Haar-like unitary from the QR factorization of a Gaussian matrix.
inline Matrix random_unitary(Rng& rng, Index n) {
  if (n == 0) return Matrix(0, 0);
  Eigen::HouseholderQR<Matrix> qr(random_complex(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Q diag(values) Q* for a random unitary Q.
inline HermitianMatrix planted_hermitian(Rng& rng, const std::vector<double>& values) {
  const auto n = static_cast<Index>(values.size());
  const Matrix q = random_unitary(rng, n);
  RealVector d(n);
  for (Index i = 0; i < n; ++i) d(i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix::symmetrized(q * d.cast<Complex>().asDiagonal() * q.adjoint());
}

/// M* M + I, positive definite.
inline HermitianMatrix random_gram(Rng& rng, Index n) {
  const Matrix m = random_complex(rng, n, n);
  return HermitianMatrix::symmetrized(m.adjoint() * m + Matrix::Identity(n, n));
}

/// U diag(s) V* with log-uniform singular values in [1, cond].
inline Matrix random_conditioned(Rng& rng, Index n, double cond) {
  std::uniform_real_distribution<double> u(0.0, std::log(cond));
  RealVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::exp(u(rng));
  if (n > 0) {
    s(0) = 1.0;
    if (n > 1) s(n - 1) = cond;
  }
  return random_unitary(rng, n) * s.cast<Complex>().asDiagonal() * random_unitary(rng, n).adjoint();
}

/// Gaussian blocks with Gram matrices M* M + I.
inline RiggedBlockPencil random_pencil(Rng& rng, Index n1, Index n2) {
  HermitianMatrix a11 = random_hermitian(rng, n1);
  Matrix a12 = random_complex(rng, n1, n2);
  HermitianMatrix a22 = random_hermitian(rng, n2);
  HermitianMatrix g1 = random_gram(rng, n1);
  HermitianMatrix g2 = random_gram(rng, n2);
  return RiggedBlockPencil(std::move(a11), std::move(a12), std::move(a22), std::move(g1),
                           std::move(g2));
}

}  // namespace spectra
