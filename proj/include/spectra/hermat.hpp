#pragma once

// Dense Hermitian linear algebra: pivoted LDL* with inertia, Cholesky,
// linear solves and reference eigensolvers.  Scalars are complex throughout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "spectra/errors.hpp"

namespace spectra {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Dense complex Hermitian matrix.
///
/// The checked constructor rejects inputs whose relative Hermitian defect
/// max|A - A*| / max|A| exceeds `kDefectTol`; accepted inputs are replaced by
/// (A + A*)/2 and the measured defect is kept.  `symmetrized` skips the check
/// and is meant for results of floating-point computations.
class HermitianMatrix {
 public:
  static constexpr double kDefectTol = 1e-12;

  HermitianMatrix() = default;

  explicit HermitianMatrix(Matrix a) : HermitianMatrix(std::move(a), true) {}

  static HermitianMatrix symmetrized(Matrix a) { return HermitianMatrix(std::move(a), false); }

  static HermitianMatrix zero(Index n) { return symmetrized(Matrix::Zero(n, n)); }
  static HermitianMatrix identity(Index n) { return symmetrized(Matrix::Identity(n, n)); }
  static HermitianMatrix diagonal(const RealVector& d) {
    return symmetrized(d.cast<Complex>().asDiagonal());
  }

  Index size() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double defect() const { return defect_; }
  double max_abs() const { return spectra::max_abs(m_); }

 private:
  HermitianMatrix(Matrix a, bool check) {
    if (a.rows() != a.cols()) throw DimensionMismatch("Hermitian matrix must be square");
    const double scale = spectra::max_abs(a);
    const double diff = a.size() == 0 ? 0.0 : (a - a.adjoint()).cwiseAbs().maxCoeff();
    defect_ = scale > 0.0 ? diff / scale : 0.0;
    if (check && defect_ > kDefectTol) throw NotHermitian(defect_);
    m_ = (a + a.adjoint()) * 0.5;
  }

  Matrix m_;
  double defect_ = 0.0;
};

inline HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch("size mismatch in Hermitian sum");
  return HermitianMatrix::symmetrized(a.matrix() + b.matrix());
}

inline HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch("size mismatch in Hermitian difference");
  return HermitianMatrix::symmetrized(a.matrix() - b.matrix());
}

inline HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix::symmetrized(s * a.matrix());
}

/// a - shift * b, the shifted form used by every pencil evaluation.
inline HermitianMatrix shifted(const HermitianMatrix& a, double shift, const HermitianMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch("size mismatch in shifted form");
  return HermitianMatrix::symmetrized(a.matrix() - shift * b.matrix());
}

/// C* A C.
inline HermitianMatrix congruence(const HermitianMatrix& a, const Matrix& c) {
  if (c.rows() != a.size()) throw DimensionMismatch("size mismatch in congruence");
  return HermitianMatrix::symmetrized(c.adjoint() * a.matrix() * c);
}

struct Inertia {
  Index n_neg = 0;
  Index n_zero = 0;
  Index n_pos = 0;

  Index size() const { return n_neg + n_zero + n_pos; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

inline double default_zero_tol(Index n) { return 1e-10 * static_cast<double>(std::max<Index>(n, 1)); }

/// One diagonal block of D in P A P* = L D L*.
struct PivotBlock {
  Index start = 0;
  Matrix block;  // 1x1 or 2x2, Hermitian

  Index size() const { return block.rows(); }
};

struct LdlFactorization {
  // Row i of P A P* is row permutation[i] of A.
  std::vector<Index> permutation;
  Matrix unit_lower;
  std::vector<PivotBlock> block_diag;
  Inertia inertia;
  double zero_tol_used = 0.0;
  // Absolute threshold t separating zero from nonzero pivots.
  double threshold = 0.0;

  Index size() const { return unit_lower.rows(); }

  Matrix block_diagonal() const {
    Matrix d = Matrix::Zero(size(), size());
    for (const auto& b : block_diag) d.block(b.start, b.start, b.size(), b.size()) = b.block;
    return d;
  }

  /// P* L D L* P.
  Matrix reconstruct() const {
    const Matrix m = unit_lower * block_diagonal() * unit_lower.adjoint();
    Matrix a(size(), size());
    for (Index i = 0; i < size(); ++i)
      for (Index j = 0; j < size(); ++j) a(permutation[i], permutation[j]) = m(i, j);
    return a;
  }

  /// Smallest and largest pivot magnitudes (eigenvalue magnitudes of the blocks).
  std::pair<double, double> pivot_range() const;
};

namespace detail {

// Eigenvalues of a 2x2 Hermitian block, ascending.
inline std::pair<double, double> block2_eigenvalues(const Matrix& e) {
  const double a = e(0, 0).real();
  const double c = e(1, 1).real();
  const double b = std::abs(e(1, 0));
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid - rad, mid + rad};
}

inline void classify(double d, double t, Inertia& in) {
  if (d < -t)
    ++in.n_neg;
  else if (d > t)
    ++in.n_pos;
  else
    ++in.n_zero;
}

}  // namespace detail

inline std::pair<double, double> LdlFactorization::pivot_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& b : block_diag) {
    if (b.size() == 1) {
      const double m = std::abs(b.block(0, 0).real());
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    } else {
      const auto [e0, e1] = detail::block2_eigenvalues(b.block);
      lo = std::min({lo, std::abs(e0), std::abs(e1)});
      hi = std::max({hi, std::abs(e0), std::abs(e1)});
    }
  }
  if (block_diag.empty()) lo = 0.0;
  return {lo, hi};
}

/// Bunch-Kaufman symmetric-pivoted factorization P A P* = L D L*.
///
/// Inertia is read from D: a 1x1 pivot d is negative if d < -t, zero if
/// |d| <= t, positive if d > t, where t = zero_tol times the largest diagonal
/// magnitude met during elimination.  2x2 pivots are indefinite by the pivot
/// rule and are classified through their two eigenvalues with the same t.
inline LdlFactorization ldl_factor(const HermitianMatrix& a, double zero_tol) {
  const Index n = a.size();
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

  // Only the lower triangle of the working matrix is kept current.
  Matrix w = a.matrix();
  Matrix l = Matrix::Identity(n, n);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<PivotBlock> blocks;
  double scale = 0.0;

  for (Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(w(i, i).real()));

  Index k = 0;
  // Symmetric interchange of rows/columns i < j of the trailing matrix.
  auto swap_sym = [&](Index i, Index j) {
    if (i == j) return;
    if (j + 1 < n) w.col(i).tail(n - j - 1).swap(w.col(j).tail(n - j - 1));
    for (Index c = i + 1; c < j; ++c) {
      const Complex t = std::conj(w(c, i));
      w(c, i) = std::conj(w(j, c));
      w(j, c) = t;
    }
    w(j, i) = std::conj(w(j, i));
    std::swap(w(i, i), w(j, j));
    // Columns of the current step left of i (the first pivot column for 2x2).
    if (i > k) w.block(i, k, 1, i - k).swap(w.block(j, k, 1, i - k));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    if (k > 0) l.block(i, 0, 1, k).swap(l.block(j, 0, 1, k));
  };

  while (k < n) {
    const double absakk = std::abs(w(k, k).real());
    double colmax = 0.0;
    Index imax = k;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        imax = i;
      }
    }

    if (std::max(absakk, colmax) == 0.0) {
      // Column already eliminated: zero pivot, zero multipliers.
      blocks.push_back({k, Matrix::Zero(1, 1)});
      ++k;
      continue;
    }

    Index kp = k;
    Index step = 1;
    if (absakk < alpha * colmax) {
      double rowmax = 0.0;
      for (Index j = k; j < imax; ++j) rowmax = std::max(rowmax, std::abs(w(imax, j)));
      for (Index j = imax + 1; j < n; ++j) rowmax = std::max(rowmax, std::abs(w(j, imax)));
      if (absakk * rowmax >= alpha * colmax * colmax) {
        kp = k;
      } else if (std::abs(w(imax, imax).real()) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        step = 2;
      }
    }

    const Index m = n - k - step;
    if (step == 1) {
      swap_sym(k, kp);
      const double d = w(k, k).real();
      scale = std::max(scale, std::abs(d));
      blocks.push_back({k, Matrix::Constant(1, 1, Complex(d, 0.0))});
      if (m > 0) {
        const Vector col = w.block(k + 1, k, m, 1);
        l.block(k + 1, k, m, 1) = col / d;
        w.bottomRightCorner(m, m).triangularView<Eigen::Lower>() -= (col / d) * col.adjoint();
      }
    } else {
      swap_sym(k + 1, kp);
      Matrix e(2, 2);
      e(0, 0) = w(k, k).real();
      e(1, 1) = w(k + 1, k + 1).real();
      e(1, 0) = w(k + 1, k);
      e(0, 1) = std::conj(e(1, 0));
      scale = std::max({scale, std::abs(e(0, 0)), std::abs(e(1, 1))});
      blocks.push_back({k, e});
      if (m > 0) {
        const Matrix cols = w.block(k + 2, k, m, 2);
        const Matrix mult = cols * e.inverse();
        l.block(k + 2, k, m, 2) = mult;
        w.bottomRightCorner(m, m).triangularView<Eigen::Lower>() -= mult * cols.adjoint();
      }
    }
    k += step;
  }

  LdlFactorization f;
  f.permutation = std::move(perm);
  f.unit_lower = std::move(l);
  f.block_diag = std::move(blocks);
  f.zero_tol_used = zero_tol;
  f.threshold = zero_tol * scale;
  for (const auto& b : f.block_diag) {
    if (b.size() == 1) {
      detail::classify(b.block(0, 0).real(), f.threshold, f.inertia);
    } else {
      const auto [e0, e1] = detail::block2_eigenvalues(b.block);
      detail::classify(e0, f.threshold, f.inertia);
      detail::classify(e1, f.threshold, f.inertia);
    }
  }
  return f;
}

inline LdlFactorization ldl_factor(const HermitianMatrix& a) {
  return ldl_factor(a, default_zero_tol(a.size()));
}

inline Inertia inertia_of(const HermitianMatrix& a, double zero_tol) {
  return ldl_factor(a, zero_tol).inertia;
}

inline Inertia inertia_of(const HermitianMatrix& a) { return ldl_factor(a).inertia; }

/// Solves A X = B from a factorization with no zero pivots.
inline Matrix solve_with(const LdlFactorization& f, const Matrix& b) {
  if (f.inertia.n_zero > 0) throw SingularFactor();
  const Index n = f.size();
  if (b.rows() != n) throw DimensionMismatch("right-hand side has wrong row count");

  Matrix y(n, b.cols());
  for (Index i = 0; i < n; ++i) y.row(i) = b.row(f.permutation[static_cast<std::size_t>(i)]);
  f.unit_lower.triangularView<Eigen::UnitLower>().solveInPlace(y);
  for (const auto& blk : f.block_diag) {
    if (blk.size() == 1) {
      y.row(blk.start) /= blk.block(0, 0);
    } else {
      y.middleRows(blk.start, 2) = blk.block.inverse() * y.middleRows(blk.start, 2);
    }
  }
  f.unit_lower.adjoint().triangularView<Eigen::UnitUpper>().solveInPlace(y);
  Matrix x(n, b.cols());
  for (Index i = 0; i < n; ++i) x.row(f.permutation[static_cast<std::size_t>(i)]) = y.row(i);
  return x;
}

/// Upper-triangular R with A = R* R.  Throws NotPositiveDefinite naming the
/// first pivot that is not strictly positive.
inline Matrix cholesky(const HermitianMatrix& a) {
  const Index n = a.size();
  Matrix r = Matrix::Zero(n, n);
  const Matrix& m = a.matrix();
  for (Index j = 0; j < n; ++j) {
    Complex s = m(j, j);
    for (Index k = 0; k < j; ++k) s -= std::norm(r(k, j));
    const double d = s.real();
    if (!(d > 0.0) || !std::isfinite(d)) throw NotPositiveDefinite(static_cast<long>(j));
    r(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      Complex t = m(j, i);
      for (Index k = 0; k < j; ++k) t -= std::conj(r(k, j)) * r(k, i);
      r(j, i) = t / r(j, j);
    }
  }
  return r;
}

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

/// Hermitian eigensolver (Eigen's tridiagonal QR).  Eigen caps the implicit QR
/// sweep at 30 iterations per eigenvalue; hitting the cap raises NoConvergence.
inline EigenDecomposition eigh(const HermitianMatrix& a, bool vectors = true) {
  if (a.size() == 0) return {RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      a.matrix(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NoConvergence("Hermitian eigensolver did not converge");
  return {es.eigenvalues(), vectors ? es.eigenvectors() : Matrix(0, 0)};
}

/// Solves A x = mu B x for Hermitian A and positive definite B by reduction to
/// R^{-*} A R^{-1} with B = R* R.  Returned vectors are B-orthonormal.
inline EigenDecomposition eigh_gen(const HermitianMatrix& a, const HermitianMatrix& b,
                                   bool vectors = false) {
  if (a.size() != b.size()) throw DimensionMismatch("pencil matrices differ in size");
  if (a.size() == 0) return {RealVector(0), Matrix(0, 0)};
  const Matrix r = cholesky(b);
  const auto rt = r.triangularView<Eigen::Upper>();
  // C = R^{-*} A R^{-1}
  Matrix c = rt.adjoint().solve(a.matrix());
  c = rt.adjoint().solve(Matrix(c.adjoint())).adjoint();
  EigenDecomposition ed = eigh(HermitianMatrix::symmetrized(std::move(c)), vectors);
  if (vectors) ed.vectors = rt.solve(ed.vectors);
  return ed;
}

}  // namespace spectra
