#pragma once

// Eigenvalue localization inside a spectral gap of the lower-right block.
//
// nu(lambda) = ind S(lambda), the negative inertia index of the Schur
// complement, is a nondecreasing step function on each gap of a linear
// pencil; it jumps exactly at pencil eigenvalues, by their multiplicity, and
// nu(b) - nu(a) counts the eigenvalues in [a, b).  Bisection on nu therefore
// brackets every eigenvalue with its multiplicity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/hermat.hpp"
#include "spectra/pencil.hpp"

namespace spectra {

struct SolverConfig {
  double lambda_tol_abs = 1e-10;
  double lambda_tol_rel = 1e-10;
  // Relative zero band for the inertia of S(lambda).  Tiny by default: a
  // wide band delays the sign change of the crossing pivot and biases every
  // located eigenvalue.
  double zero_tol = 1e-14;
  // Relative eigenvalue threshold (times ||S||_max) for kernel_basis.
  double kernel_tol = 1e-8;
  double epsilon_cap = 1.0;
  int max_bisections = 200;
  // Maximum number of grid doublings when checking monotonicity of nu_F.
  int max_refinements = 6;
  int initial_grid = 16;
  GapOptions gap;

  void validate() const {
    if (!(lambda_tol_abs > 0.0) || !(lambda_tol_rel > 0.0) || !(zero_tol > 0.0) ||
        !(kernel_tol > 0.0) || !(epsilon_cap > 0.0) || max_bisections < 1 ||
        max_refinements < 0 || initial_grid < 1)
      throw DomainError("invalid solver configuration");
  }

  double bracket_tol(double lambda) const {
    return lambda_tol_abs + lambda_tol_rel * std::abs(lambda);
  }
};

struct EigenvalueHit {
  double lambda = 0.0;
  Index multiplicity = 0;
  double lo = 0.0;
  double hi = 0.0;
  // <S'(lambda) y, y> for each unit vector y of the approximate kernel.
  std::vector<double> negative_type;
  bool certified = false;
  // Dimension of kernel_basis at lambda; differs from multiplicity only when
  // the tolerance-based kernel disagrees with the jump of nu.
  Index kernel_dimension = 0;
};

class BisectionBudgetExceeded : public Error {
 public:
  explicit BisectionBudgetExceeded(std::vector<EigenvalueHit> partial)
      : Error("bisection budget exhausted before brackets reached tolerance"),
        partial_(std::move(partial)) {}
  const std::vector<EigenvalueHit>& partial() const { return partial_; }

 private:
  std::vector<EigenvalueHit> partial_;
};

/// Counting convention: `negative` counts eigenvalues in [a, b) as
/// ind S(b) - ind S(a); `positive` counts those in (a, b] as
/// ind[-S(a)] - ind[-S(b)].
enum class CountBy { negative, positive };

inline Inertia schur_inertia(const RiggedBlockPencil& p, double lambda, const SolverConfig& cfg) {
  return inertia_of(schur(p, lambda, cfg.gap), cfg.zero_tol);
}

inline Index nu(const RiggedBlockPencil& p, double lambda, const SolverConfig& cfg = {}) {
  return schur_inertia(p, lambda, cfg).n_neg;
}

namespace detail {

inline void require_same_gap(const RiggedBlockPencil& p, double a, double b,
                             const SolverConfig& cfg) {
  if (!(a < b)) throw DomainError("interval endpoints must satisfy a < b");
  const GapInterval gap = gap_of(p, a, cfg.gap.guard_rel);
  if (!gap.contains(b)) throw GapMismatch(a, b);
}

struct Bracket {
  double lo;
  double hi;
  Index nu_lo;
  Index nu_hi;
};

// Splits [a, b] until every jump of `count` sits in a bracket of width at
// most the configured tolerance.  Brackets come out in ascending order.
// `count` must be nondecreasing; `on_nonmonotone` is invoked otherwise.
template <typename CountFn, typename OnNonMonotone>
std::vector<Bracket> bisect(CountFn&& count, double a, double b, Index nu_a, Index nu_b,
                            const SolverConfig& cfg, OnNonMonotone&& on_nonmonotone) {
  struct Item {
    Bracket br;
    int depth;
  };
  std::vector<Bracket> done;
  std::vector<Item> stack{{{a, b, nu_a, nu_b}, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const Bracket br = it.br;
    if (br.nu_hi == br.nu_lo) continue;
    if (br.nu_hi < br.nu_lo) on_nonmonotone(br.lo, br.hi);
    const double width = br.hi - br.lo;
    if (width <= cfg.bracket_tol(std::max(std::abs(br.lo), std::abs(br.hi)))) {
      done.push_back(br);
      continue;
    }
    if (it.depth >= cfg.max_bisections) {
      std::vector<EigenvalueHit> partial;
      for (const auto& d : done)
        partial.push_back({0.5 * (d.lo + d.hi), d.nu_hi - d.nu_lo, d.lo, d.hi, {}, false, 0});
      throw BisectionBudgetExceeded(std::move(partial));
    }
    const double mid = br.lo + 0.5 * width;
    const Index nu_mid = count(mid);
    if (nu_mid < br.nu_lo || nu_mid > br.nu_hi) on_nonmonotone(br.lo, br.hi);
    // Right half first so that the left half is processed next.
    stack.push_back({{mid, br.hi, nu_mid, br.nu_hi}, it.depth + 1});
    stack.push_back({{br.lo, mid, br.nu_lo, nu_mid}, it.depth + 1});
  }
  return done;
}

// Eigenvectors of s belonging to the `count` eigenvalues of smallest
// magnitude, as unit columns.
inline Matrix smallest_eigenvectors(const HermitianMatrix& s, Index count) {
  const EigenDecomposition ed = eigh(s);
  std::vector<Index> order(static_cast<std::size_t>(ed.values.size()));
  for (Index i = 0; i < ed.values.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return std::abs(ed.values(i)) < std::abs(ed.values(j));
  });
  count = std::min<Index>(count, ed.values.size());
  Matrix v(s.size(), count);
  for (Index k = 0; k < count; ++k) v.col(k) = ed.vectors.col(order[static_cast<std::size_t>(k)]);
  return v;
}

inline std::vector<double> form_values(const HermitianMatrix& a, const Matrix& vectors) {
  std::vector<double> out;
  for (Index k = 0; k < vectors.cols(); ++k) {
    const Vector y = vectors.col(k) / vectors.col(k).norm();
    out.push_back((y.adjoint() * a.matrix() * y)(0, 0).real());
  }
  return out;
}

}  // namespace detail

/// Number of eigenvalues in [a, b) (or (a, b] for CountBy::positive).
inline Index count_between(const RiggedBlockPencil& p, double a, double b,
                           const SolverConfig& cfg = {}, CountBy by = CountBy::negative) {
  detail::require_same_gap(p, a, b, cfg);
  const Inertia ia = schur_inertia(p, a, cfg);
  const Inertia ib = schur_inertia(p, b, cfg);
  return by == CountBy::negative ? ib.n_neg - ia.n_neg : ia.n_pos - ib.n_pos;
}

/// Orthonormal eigenvectors of S(lambda) whose eigenvalues are at most
/// kernel_tol * ||S||_max in magnitude.  Possibly empty.
inline Matrix kernel_basis(const RiggedBlockPencil& p, double lambda, const SolverConfig& cfg = {}) {
  const HermitianMatrix s = schur(p, lambda, cfg.gap);
  const EigenDecomposition ed = eigh(s);
  const double tol = cfg.kernel_tol * std::max(s.max_abs(), 1e-300);
  std::vector<Index> keep;
  for (Index i = 0; i < ed.values.size(); ++i)
    if (std::abs(ed.values(i)) <= tol) keep.push_back(i);
  Matrix v(s.size(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Index>(k)) = ed.vectors.col(keep[k]);
  return v;
}

/// The `count` eigenvectors of S(lambda) closest to the kernel.
inline Matrix approximate_kernel(const RiggedBlockPencil& p, double lambda, Index count,
                                 const SolverConfig& cfg = {}) {
  return detail::smallest_eigenvectors(schur(p, lambda, cfg.gap), count);
}

/// (y, z) with z = -D(lambda)^{-1} A12* y; maps ker S(lambda) onto ker T(lambda).
inline Vector lift(const RiggedBlockPencil& p, double lambda, const Vector& y,
                   const SolverConfig& cfg = {}) {
  if (y.size() != p.n1()) throw DimensionMismatch("lift expects an n1-vector");
  const auto parts = detail::schur_parts(p, lambda, cfg.gap);
  Vector full(p.n1() + p.n2());
  full.head(p.n1()) = y;
  full.tail(p.n2()) = -parts.d_inv_a21 * y;
  return full;
}

/// <S'(lambda) y, y> for the given kernel columns of a linear pencil.
inline std::vector<double> linear_type_values(const RiggedBlockPencil& p, double lambda,
                                              const Matrix& kernel, const SolverConfig& cfg = {}) {
  return detail::form_values(schur_derivative(p, lambda, cfg.gap), kernel);
}

/// Brackets every eigenvalue in [a, b) with its multiplicity.  Each hit is
/// certified through the derivative of the Schur complement on its
/// approximate kernel (always negative for linear pencils).
inline std::vector<EigenvalueHit> locate(const RiggedBlockPencil& p, double a, double b,
                                         const SolverConfig& cfg = {}) {
  cfg.validate();
  detail::require_same_gap(p, a, b, cfg);
  auto count = [&](double x) { return nu(p, x, cfg); };
  auto defect = [](double lo, double hi) {
    throw InternalError("counting function decreased on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "] of a linear pencil");
  };
  std::vector<detail::Bracket> brackets = detail::bisect(count, a, b, count(a), count(b), cfg, defect);

  std::vector<EigenvalueHit> hits;
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    detail::Bracket br = brackets[i];
    double mid = 0.5 * (br.lo + br.hi);
    Index mult = br.nu_hi - br.nu_lo;
    Index kdim = kernel_basis(p, mid, cfg).cols();
    if (mult > 1 && kdim != mult) {
      // One extra split; if it separates the cluster both halves become hits.
      const Index nu_mid = count(mid);
      if (nu_mid > br.nu_lo && nu_mid < br.nu_hi) {
        brackets.insert(brackets.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                        {mid, br.hi, nu_mid, br.nu_hi});
        br = {br.lo, mid, br.nu_lo, nu_mid};
        mid = 0.5 * (br.lo + br.hi);
        mult = br.nu_hi - br.nu_lo;
        kdim = kernel_basis(p, mid, cfg).cols();
      }
    }
    EigenvalueHit hit{mid, mult, br.lo, br.hi, {}, false, kdim};
    const HermitianMatrix sd = schur_derivative(p, mid, cfg.gap);
    hit.negative_type = detail::form_values(sd, approximate_kernel(p, mid, mult, cfg));
    const double thr = -cfg.zero_tol * std::max(sd.max_abs(), 1e-300);
    hit.certified = !hit.negative_type.empty() &&
                    *std::max_element(hit.negative_type.begin(), hit.negative_type.end()) < thr;
    hits.push_back(std::move(hit));
  }
  return hits;
}

/// inf{lambda in (zeta, gap end) : nu(lambda) > nu(zeta) + n}, or nullopt when
/// the count is never exceeded inside the gap.
inline std::optional<double> nth_eigenvalue(const RiggedBlockPencil& p, double zeta, Index n,
                                            const SolverConfig& cfg = {}) {
  cfg.validate();
  const GapInterval gap = gap_of(p, zeta, cfg.gap.guard_rel);
  double top = gap.hi - 2.0 * gap.guard;
  if (!std::isfinite(top)) {
    const double bound = spectral_bound(p);
    top = std::max(zeta, bound) + 1.0 + std::abs(bound);
  }
  if (!(top > zeta)) return std::nullopt;
  const Index target = nu(p, zeta, cfg) + n;
  Index nu_top = nu(p, top, cfg);
  if (nu_top <= target) return std::nullopt;
  double lo = zeta;
  double hi = top;
  for (int it = 0; it < cfg.max_bisections; ++it) {
    if (hi - lo <= cfg.bracket_tol(std::max(std::abs(lo), std::abs(hi))))
      return 0.5 * (lo + hi);
    const double mid = lo + 0.5 * (hi - lo);
    if (nu(p, mid, cfg) > target)
      hi = mid;
    else
      lo = mid;
  }
  throw BisectionBudgetExceeded({});
}

struct LambdaCurveTable {
  std::vector<double> grid;
  // curves[n][i] = min(epsilon, mu_{n}(grid[i])), mu ascending eigenvalues of
  // (S(lambda), G_D1).
  std::vector<std::vector<double>> curves;
  double epsilon = 1.0;

  /// Number of negative curve values at grid point i.
  Index negative_count(std::size_t i) const {
    Index c = 0;
    for (const auto& curve : curves)
      if (curve[i] < 0.0) ++c;
    return c;
  }
};

/// Capped min-max values of S(lambda) in the D1 metric.  Curves with index
/// >= n1 are not representable and are clipped to m <= n1.
inline LambdaCurveTable lambda_curves(const RiggedBlockPencil& p, double kappa, double tau,
                                      const std::vector<double>& grid, Index m,
                                      const SolverConfig& cfg = {}) {
  cfg.validate();
  if (grid.empty()) throw DomainError("empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly ascending");
  if (grid.size() > 1) detail::require_same_gap(p, grid.front(), grid.back(), cfg);
  const HermitianMatrix gd1 = d1_gram(p, kappa, tau);
  m = std::min(m, p.n1());
  LambdaCurveTable table;
  table.grid = grid;
  table.epsilon = cfg.epsilon_cap;
  table.curves.assign(static_cast<std::size_t>(m), std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RealVector mu = eigh_gen(schur(p, grid[i], cfg.gap), gd1).values;
    for (Index n = 0; n < m; ++n)
      table.curves[static_cast<std::size_t>(n)][i] = std::min(cfg.epsilon_cap, mu(n));
  }
  return table;
}

struct Certificate {
  std::vector<double> values;
  bool certified = false;
};

/// Derivative of <S(lambda) y, y> at mu for each kernel column y (normalized),
/// from the operator-function derivative blocks:
///   S' = A11' - A12' X - X* A12'* + X* A22' X,  X = A22^{-1} A12*.
inline Certificate negative_type_certificate(const OperatorFunctionPencil& f, double mu,
                                             const Matrix& kernel, const SolverConfig& cfg = {}) {
  if (kernel.cols() == 0) throw DomainError("negative-type certificate needs a nonempty kernel");
  const auto parts = detail::opfunc_parts(f, mu, cfg.gap.cond_guard);
  const PencilBlocks d = f.deriv(mu);
  const Matrix& x = parts.d_inv_a21;
  Matrix sd = d.a11;
  if (f.n2 > 0) sd += -d.a12 * x - x.adjoint() * d.a12.adjoint() + x.adjoint() * d.a22 * x;
  const HermitianMatrix sdh = HermitianMatrix::symmetrized(std::move(sd));
  Certificate c;
  c.values = detail::form_values(sdh, kernel);
  const double thr = -cfg.zero_tol * std::max(sdh.max_abs(), 1e-300);
  c.certified = *std::max_element(c.values.begin(), c.values.end()) < thr;
  return c;
}

inline Index nu_general(const OperatorFunctionPencil& f, double lambda, const SolverConfig& cfg = {}) {
  return inertia_of(detail::opfunc_parts(f, lambda, cfg.gap.cond_guard).s, cfg.zero_tol).n_neg;
}

/// Localization for operator functions whose eigenvalues in [a, b) all have
/// negative type.  The hypothesis is verified, not assumed: nu_F is sampled on
/// a grid doubled until it is nondecreasing (TypeViolation after
/// max_refinements), bisection rejects any decrease, and every hit must carry
/// a negative certificate.
inline std::vector<EigenvalueHit> locate_general(const OperatorFunctionPencil& f, double a,
                                                 double b, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (!(a < b)) throw DomainError("interval endpoints must satisfy a < b");
  auto count = [&](double x) { return nu_general(f, x, cfg); };

  const Index nu_a = count(a);
  const Index nu_b = count(b);
  int cells = cfg.initial_grid;
  for (int r = 0;; ++r) {
    bool monotone = true;
    Index prev = nu_a;
    for (int i = 1; i <= cells && monotone; ++i) {
      const Index cur = i == cells ? nu_b : count(a + (b - a) * i / cells);
      monotone = cur >= prev;
      prev = cur;
    }
    if (monotone) break;
    if (r == cfg.max_refinements)
      throw TypeViolation(a, "counting function is not monotone on the sampled grid");
    cells *= 2;
  }

  auto nonmonotone = [](double lo, double) {
    throw TypeViolation(lo, "counting function decreased during bisection");
  };
  const auto brackets = detail::bisect(count, a, b, nu_a, nu_b, cfg, nonmonotone);
  std::vector<EigenvalueHit> hits;
  for (const auto& br : brackets) {
    const double mid = 0.5 * (br.lo + br.hi);
    const Index mult = br.nu_hi - br.nu_lo;
    const HermitianMatrix s = detail::opfunc_parts(f, mid, cfg.gap.cond_guard).s;
    const Matrix kernel = detail::smallest_eigenvectors(s, mult);
    const Certificate c = negative_type_certificate(f, mid, kernel, cfg);
    if (!c.certified) throw TypeViolation(mid, "eigenvalue is not of negative type");
    hits.push_back({mid, mult, br.lo, br.hi, c.values, true, kernel.cols()});
  }
  return hits;
}

}  // namespace spectra
