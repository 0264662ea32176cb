#pragma once

// Discrete self-adjoint block pencils
//
//   T(lambda) = [[A11 - lambda G1, A12], [A12*, A22 - lambda G2]]
//
// with positive definite Gram matrices G1, G2.  Between consecutive
// eigenvalues of (A22, G2) the lower-right block D(lambda) is invertible and
// the pencil is congruent to diag(S(lambda), D(lambda)), S being the Schur
// complement (transfer function) over the second block.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/hermat.hpp"

namespace spectra {

/// Shift pair (kappa, tau) defining the D1 Gram of a pencil.
struct D1Shift {
  double kappa = 0.0;
  double tau = 1.0;
};

class RiggedBlockPencil {
 public:
  /// Validates shapes and the definiteness of both Gram matrices.  `a12` is
  /// n1 x n2; the (2,1) block is always its adjoint.
  RiggedBlockPencil(HermitianMatrix a11, Matrix a12, HermitianMatrix a22, HermitianMatrix g1,
                    HermitianMatrix g2)
      : a11_(std::move(a11)),
        a12_(std::move(a12)),
        a22_(std::move(a22)),
        g1_(std::move(g1)),
        g2_(std::move(g2)) {
    const Index n1 = a11_.size();
    const Index n2 = a22_.size();
    if (g1_.size() != n1 || g2_.size() != n2)
      throw DimensionMismatch("Gram matrices do not match the diagonal blocks");
    if (n2 == 0 && a12_.size() == 0) a12_.resize(n1, 0);
    if (a12_.rows() != n1 || a12_.cols() != n2)
      throw DimensionMismatch("coupling block must be n1 x n2");
    cholesky(g1_);
    cholesky(g2_);
    t22_ = eigh_gen(a22_, g2_).values;
  }

  /// Single-block pencil A11 - lambda G1.
  RiggedBlockPencil(HermitianMatrix a11, HermitianMatrix g1)
      : RiggedBlockPencil(a11, Matrix(a11.size(), 0), HermitianMatrix::zero(0), std::move(g1),
                          HermitianMatrix::zero(0)) {}

  Index n1() const { return a11_.size(); }
  Index n2() const { return a22_.size(); }
  const HermitianMatrix& a11() const { return a11_; }
  const Matrix& a12() const { return a12_; }
  const HermitianMatrix& a22() const { return a22_; }
  const HermitianMatrix& g1() const { return g1_; }
  const HermitianMatrix& g2() const { return g2_; }

  /// Eigenvalues of (A22, G2), ascending; computed once at construction.
  const RealVector& t22_eigenvalues() const { return t22_; }

  const std::optional<D1Shift>& d1_shift() const { return shift_; }
  RiggedBlockPencil& with_d1_shift(D1Shift s) {
    shift_ = s;
    return *this;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  RiggedBlockPencil& with_labels(std::vector<std::string> l) {
    labels_ = std::move(l);
    return *this;
  }

 private:
  HermitianMatrix a11_;
  Matrix a12_;
  HermitianMatrix a22_;
  HermitianMatrix g1_;
  HermitianMatrix g2_;
  RealVector t22_;
  std::optional<D1Shift> shift_;
  std::vector<std::string> labels_;
};

/// Tunables shared by every Schur complement evaluation.
struct GapOptions {
  double guard_rel = 1e-8;
  double cond_guard = 1e-13;
};

inline HermitianMatrix assemble_full(const RiggedBlockPencil& p, double lambda) {
  const Index n1 = p.n1();
  const Index n2 = p.n2();
  Matrix t(n1 + n2, n1 + n2);
  t.topLeftCorner(n1, n1) = p.a11().matrix() - lambda * p.g1().matrix();
  t.topRightCorner(n1, n2) = p.a12();
  t.bottomLeftCorner(n2, n1) = p.a12().adjoint();
  t.bottomRightCorner(n2, n2) = p.a22().matrix() - lambda * p.g2().matrix();
  return HermitianMatrix::symmetrized(std::move(t));
}

/// Block-diagonal Gram diag(G1, G2).
inline HermitianMatrix full_gram(const RiggedBlockPencil& p) {
  const Index n1 = p.n1();
  const Index n2 = p.n2();
  Matrix m = Matrix::Zero(n1 + n2, n1 + n2);
  m.topLeftCorner(n1, n1) = p.g1().matrix();
  m.bottomRightCorner(n2, n2) = p.g2().matrix();
  return HermitianMatrix::symmetrized(std::move(m));
}

inline RealVector t22_spectrum(const RiggedBlockPencil& p) { return p.t22_eigenvalues(); }

struct GapInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double guard = 0.0;

  bool contains(double x) const { return lo < x && x < hi; }
  friend bool operator==(const GapInterval&, const GapInterval&) = default;
};

/// Absolute guard width: guard_rel times max(1, max |t|, spectral diameter).
inline double gap_guard(const RiggedBlockPencil& p, double guard_rel) {
  const RealVector& t = p.t22_eigenvalues();
  if (t.size() == 0) return guard_rel;
  const double diameter = t(t.size() - 1) - t(0);
  const double reach = std::max(std::abs(t(0)), std::abs(t(t.size() - 1)));
  return guard_rel * std::max({1.0, reach, diameter});
}

/// Open interval of the resolvent set of (A22, G2) containing lambda, shrunk
/// by the guard at finite ends.
inline GapInterval gap_of(const RiggedBlockPencil& p, double lambda, double guard_rel = 1e-8) {
  const RealVector& t = p.t22_eigenvalues();
  const double g = gap_guard(p, guard_rel);
  constexpr double inf = std::numeric_limits<double>::infinity();
  GapInterval gap{-inf, inf, g};
  for (Index i = 0; i < t.size(); ++i) {
    if (std::abs(lambda - t(i)) <= g) throw InsideT22Spectrum(lambda, t(i));
    if (t(i) < lambda)
      gap.lo = t(i) + g;
    else if (gap.hi == inf)
      gap.hi = t(i) - g;
  }
  return gap;
}

/// Every gap of the pencil, clipped to [-bound, bound] at the unbounded ends.
/// Finite ends sit two guard widths from the (A22, G2) eigenvalues so that
/// both ends are valid evaluation points.
inline std::vector<GapInterval> all_gaps(const RiggedBlockPencil& p, double bound,
                                         double guard_rel = 1e-8) {
  const RealVector& t = p.t22_eigenvalues();
  const double g = gap_guard(p, guard_rel);
  std::vector<GapInterval> gaps;
  double lo = -bound;
  for (Index i = 0; i < t.size(); ++i) {
    const double hi = t(i) - 2.0 * g;
    if (hi > lo) gaps.push_back({lo, hi, g});
    lo = std::max(lo, t(i) + 2.0 * g);
  }
  if (bound > lo) gaps.push_back({lo, bound, g});
  return gaps;
}

/// Upper bound on |lambda| over the whole spectrum of (T, diag(G1, G2)):
/// ||T||_F / lambda_min(diag(G1, G2)).
inline double spectral_bound(const RiggedBlockPencil& p) {
  const HermitianMatrix t = assemble_full(p, 0.0);
  const RealVector m = eigh(full_gram(p), false).values;
  if (m.size() == 0) return 1.0;
  return t.matrix().norm() / m(0);
}

namespace detail {

struct SchurParts {
  HermitianMatrix s;
  LdlFactorization d_factor;
  Matrix d_inv_a21;  // D^{-1} A12*
};

// S = top_left - off D^{-1} off*, D factored with exact-sign pivots.
inline SchurParts schur_complement(const HermitianMatrix& top_left, const Matrix& off,
                                   const HermitianMatrix& d, double lambda, double cond_guard) {
  if (d.size() == 0) return {top_left, ldl_factor(d, 0.0), Matrix(0, top_left.size())};
  LdlFactorization f = ldl_factor(d, 0.0);
  const auto [lo, hi] = f.pivot_range();
  if (!(lo >= cond_guard * hi) || f.inertia.n_zero > 0)
    throw IllConditioned(lambda, hi > 0.0 ? lo / hi : 0.0);
  Matrix x = solve_with(f, off.adjoint());
  HermitianMatrix s = HermitianMatrix::symmetrized(top_left.matrix() - off * x);
  return {std::move(s), std::move(f), std::move(x)};
}

inline SchurParts schur_parts(const RiggedBlockPencil& p, double lambda, const GapOptions& opt) {
  gap_of(p, lambda, opt.guard_rel);
  return schur_complement(shifted(p.a11(), lambda, p.g1()), p.a12(),
                          shifted(p.a22(), lambda, p.g2()), lambda, opt.cond_guard);
}

}  // namespace detail

/// S(lambda) = (A11 - lambda G1) - A12 D(lambda)^{-1} A12*, D = A22 - lambda G2.
inline HermitianMatrix schur(const RiggedBlockPencil& p, double lambda, const GapOptions& opt = {}) {
  return detail::schur_parts(p, lambda, opt).s;
}

/// dS/dlambda = -G1 - X* G2 X with X = D^{-1} A12*; negative definite.
inline HermitianMatrix schur_derivative(const RiggedBlockPencil& p, double lambda,
                                        const GapOptions& opt = {}) {
  const auto parts = detail::schur_parts(p, lambda, opt);
  const Matrix& x = parts.d_inv_a21;
  return HermitianMatrix::symmetrized(-p.g1().matrix() - x.adjoint() * p.g2().matrix() * x);
}

/// Relative max-norm residual of the Frobenius-Schur congruence
/// T(lambda) = U* diag(S, D) U, U = [[1, 0], [D^{-1} A12*, 1]].
inline double fs_residual(const RiggedBlockPencil& p, double lambda, const GapOptions& opt = {}) {
  const auto parts = detail::schur_parts(p, lambda, opt);
  const Index n1 = p.n1();
  const Index n2 = p.n2();
  Matrix u = Matrix::Identity(n1 + n2, n1 + n2);
  u.bottomLeftCorner(n2, n1) = parts.d_inv_a21;
  Matrix mid = Matrix::Zero(n1 + n2, n1 + n2);
  mid.topLeftCorner(n1, n1) = parts.s.matrix();
  mid.bottomRightCorner(n2, n2) = p.a22().matrix() - lambda * p.g2().matrix();
  const HermitianMatrix t = assemble_full(p, lambda);
  const double scale = t.max_abs();
  const double diff = max_abs(t.matrix() - u.adjoint() * mid * u);
  return scale > 0.0 ? diff / scale : diff;
}

/// Gram matrix of the D1 norm,
///   G = sign * [(A11 - kappa G1) + A12 (tau G2 - A22)^{-1} A12*],
/// which is the Schur complement of T at the shift pair (kappa, tau).  tau
/// must lie above the top of the (A22, G2) spectrum; the result is checked by
/// Cholesky and an indefinite result raises NotPositiveDefinite.
inline HermitianMatrix d1_gram(const RiggedBlockPencil& p, double kappa, double tau, int sign = 1) {
  const RealVector& t = p.t22_eigenvalues();
  if (t.size() > 0 && !(tau > t(t.size() - 1)))
    throw DomainError("tau must lie above the lower-right block spectrum");
  const HermitianMatrix top = shifted(p.a11(), kappa, p.g1());
  HermitianMatrix g = top;
  if (p.n2() > 0) {
    const HermitianMatrix e =
        HermitianMatrix::symmetrized(tau * p.g2().matrix() - p.a22().matrix());
    const LdlFactorization f = ldl_factor(e, 0.0);
    if (f.inertia.n_zero > 0) throw SingularFactor();
    const Matrix x = solve_with(f, p.a12().adjoint());
    g = HermitianMatrix::symmetrized(top.matrix() + p.a12() * x);
  }
  if (sign < 0) g = -1.0 * g;
  cholesky(g);
  return g;
}

/// Blocks of an operator function at one spectral parameter value.
struct PencilBlocks {
  Matrix a11;
  Matrix a12;
  Matrix a22;
};

/// lambda -> T(lambda) with derivative, for nonlinear operator functions.
///
/// `a22(lambda)` must stay uniformly negative: A22(lambda) <= -epsilon * W,
/// W = `lower_gram` when supplied, the identity otherwise.  The check runs on
/// every evaluation.
struct OperatorFunctionPencil {
  Index n1 = 0;
  Index n2 = 0;
  std::function<PencilBlocks(double)> eval;
  std::function<PencilBlocks(double)> deriv;
  double epsilon = 1e-12;
  std::optional<HermitianMatrix> lower_gram;
  // Callers may evaluate concurrently only when set.
  bool reentrant = false;
};

namespace detail {

inline void check_negativity(const OperatorFunctionPencil& f, const HermitianMatrix& a22,
                             double lambda) {
  if (a22.size() == 0) return;
  const HermitianMatrix w =
      f.lower_gram ? *f.lower_gram : HermitianMatrix::identity(a22.size());
  // A22 + eps W must be negative semidefinite.
  const Inertia in = inertia_of(shifted(a22, -f.epsilon, w), 1e-14);
  if (in.n_pos > 0) throw NegativityViolated(lambda);
}

inline SchurParts opfunc_parts(const OperatorFunctionPencil& f, double lambda,
                               double cond_guard = 1e-13) {
  const PencilBlocks b = f.eval(lambda);
  if (b.a11.rows() != f.n1 || b.a22.rows() != f.n2 || b.a12.rows() != f.n1 ||
      b.a12.cols() != f.n2)
    throw DimensionMismatch("operator function returned blocks of the wrong shape");
  const HermitianMatrix a22 = HermitianMatrix::symmetrized(b.a22);
  check_negativity(f, a22, lambda);
  return schur_complement(HermitianMatrix::symmetrized(b.a11), b.a12, a22, lambda, cond_guard);
}

}  // namespace detail

/// S(lambda) = A11(lambda) - A12(lambda) A22(lambda)^{-1} A12(lambda)*.
inline HermitianMatrix opfunc_schur(const OperatorFunctionPencil& f, double lambda) {
  return detail::opfunc_parts(f, lambda).s;
}

/// Linear pencil as an operator function; derivative blocks (-G1, 0, -G2).
/// The uniform negativity margin is measured in the G2 metric.
inline OperatorFunctionPencil opfunc_from_linear(const RiggedBlockPencil& p, double epsilon = 1e-12) {
  OperatorFunctionPencil f;
  f.n1 = p.n1();
  f.n2 = p.n2();
  f.eval = [p](double lambda) {
    return PencilBlocks{shifted(p.a11(), lambda, p.g1()).matrix(), p.a12(),
                        shifted(p.a22(), lambda, p.g2()).matrix()};
  };
  f.deriv = [p](double) {
    return PencilBlocks{-p.g1().matrix(), Matrix::Zero(p.n1(), p.n2()), -p.g2().matrix()};
  };
  f.epsilon = epsilon;
  f.lower_gram = p.g2();
  f.reentrant = true;
  return f;
}

}  // namespace spectra
