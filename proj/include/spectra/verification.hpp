#pragma once

// Verification suites: each check compares the inertia-based solver against
// an independent reference (dense eigensolves, shooting determinants, closed
// forms) at a fixed tolerance and reports pass/fail with a short note.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spectra/galerkin.hpp"
#include "spectra/hermat.hpp"
#include "spectra/oracle.hpp"
#include "spectra/pencil.hpp"
#include "spectra/random.hpp"
#include "spectra/solver.hpp"

namespace spectra::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = true;
  std::vector<std::string> notes;
  double seconds = 0.0;

  void fail(const std::string& msg) {
    passed = false;
    if (notes.size() < 8) notes.push_back(msg);
  }
  void note(const std::string& msg) { notes.push_back(msg); }
};

/// Parts of the shared criteria (counting, certificates, lift) to run.
struct Scope {
  bool random = true;
  bool quartic = true;
  bool dirac = true;
  bool opfunc = true;
};

inline constexpr std::uint64_t kSeed = 0x5eedf00dULL;
inline constexpr int kRandomTrials = 100;

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

template <typename Body>
CriterionResult timed(int id, std::string title, Body&& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.fail(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<double> expand(const std::vector<EigenvalueHit>& hits) {
  std::vector<double> v;
  for (const auto& h : hits)
    for (Index k = 0; k < h.multiplicity; ++k) v.push_back(h.lambda);
  return v;
}

inline std::vector<double> expand(const std::vector<SpectralPoint>& pts) {
  std::vector<double> v;
  for (const auto& p : pts)
    for (Index k = 0; k < p.multiplicity; ++k) v.push_back(p.lambda);
  return v;
}

/// One random pencil with every gap located and cross-checked.
struct RandomCase {
  RiggedBlockPencil pencil;
  std::vector<GapInterval> gaps;
  std::vector<std::vector<EigenvalueHit>> hits;  // per gap
  double scale = 1.0;                            // max(1, max |eigenvalue|)
};

inline RandomCase random_case(Rng& rng, const SolverConfig& cfg) {
  std::uniform_int_distribution<Index> d1(1, 8);
  std::uniform_int_distribution<Index> d2(0, 8);
  const Index n1 = d1(rng);
  const Index n2 = d2(rng);
  RandomCase c{random_pencil(rng, n1, n2), {}, {}, 1.0};
  const double bound = 1.01 * spectral_bound(c.pencil) + 1.0;
  c.gaps = all_gaps(c.pencil, bound, cfg.gap.guard_rel);
  for (const auto& g : c.gaps) c.hits.push_back(locate(c.pencil, g.lo, g.hi, cfg));
  const RealVector all = eigh_gen(assemble_full(c.pencil, 0.0), full_gram(c.pencil)).values;
  for (Index i = 0; i < all.size(); ++i) c.scale = std::max(c.scale, std::abs(all(i)));
  return c;
}

template <typename Visit>
void for_each_random_case(Visit&& visit, int trials = kRandomTrials, std::uint64_t seed = kSeed) {
  Rng rng(seed);
  const SolverConfig cfg;
  for (int t = 0; t < trials; ++t) visit(t, random_case(rng, cfg));
}

// Shift pair making the D1 Gram definite for any pencil.
inline D1Shift safe_shift(const RiggedBlockPencil& p) {
  const RealVector e = eigh_gen(p.a11(), p.g1()).values;
  const RealVector& t = p.t22_eigenvalues();
  return {e(0) - 1.0, t.size() > 0 ? t(t.size() - 1) + 1.0 : 1.0};
}

inline double hermitian_norm2(const HermitianMatrix& a) {
  const RealVector e = eigh(a, false).values;
  return e.size() == 0 ? 0.0 : std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
}

struct LiftStats {
  double worst = 0.0;
  int vectors = 0;
  // Hits where T(lambda) is the zero matrix to within sqrt(eps) of its
  // coefficient scale ||A|| + |lambda| ||G||; the ratio against ||T(lambda)||
  // is then 1 whatever the accuracy, so those use the coefficient scale.
  int degenerate = 0;

  void merge(const LiftStats& o) {
    worst = std::max(worst, o.worst);
    vectors += o.vectors;
    degenerate += o.degenerate;
  }
};

// Lift residual ratios over the approximate kernel of each hit.
inline LiftStats lift_stats(const RiggedBlockPencil& p, const std::vector<EigenvalueHit>& hits,
                            const SolverConfig& cfg) {
  LiftStats st;
  for (const auto& h : hits) {
    const Matrix ker = approximate_kernel(p, h.lambda, h.multiplicity, cfg);
    const HermitianMatrix t = assemble_full(p, h.lambda);
    double tn = hermitian_norm2(t);
    const double coeff = hermitian_norm2(assemble_full(p, 0.0)) +
                         std::abs(h.lambda) * hermitian_norm2(full_gram(p));
    if (tn <= 1.5e-8 * coeff) {
      tn = coeff;
      ++st.degenerate;
    }
    for (Index k = 0; k < ker.cols(); ++k) {
      const Vector x = lift(p, h.lambda, ker.col(k), cfg);
      st.worst = std::max(st.worst, (t.matrix() * x).norm() / (tn * x.norm()));
      ++st.vectors;
    }
  }
  return st;
}

struct QuarticRun {
  Index n;
  std::vector<EigenvalueHit> hits;
};

inline constexpr double kQuarticLo = 0.5;
inline constexpr double kQuarticHi = 200.0;

inline QuarticRun quartic_run(Index n, const SolverConfig& cfg = {}) {
  const RiggedBlockPencil p = build_example_quartic(n);
  return {n, locate(p, kQuarticLo, kQuarticHi, cfg)};
}

inline RootReport quartic_reference() {
  return quartic_char_roots(kQuarticLo, kQuarticHi, 0.25, 1e-10);
}

}  // namespace detail

/// 1. Random pencils: located eigenvalues match the dense generalized
/// eigenvalues in every gap.
inline CriterionResult random_oracle_equivalence() {
  return detail::timed(1, "random-pencil oracle equivalence", [](CriterionResult& r) {
    double worst = 0.0;
    int gaps = 0;
    detail::for_each_random_case([&](int trial, const detail::RandomCase& c) {
      for (std::size_t g = 0; g < c.gaps.size(); ++g) {
        ++gaps;
        const auto dense = dense_spectrum(c.pencil, c.gaps[g].lo, c.gaps[g].hi);
        const auto got = detail::expand(c.hits[g]);
        const auto want = detail::expand(dense);
        if (got.size() != want.size()) {
          r.fail("trial " + std::to_string(trial) + ": multiplicity " + std::to_string(got.size()) +
                 " vs dense " + std::to_string(want.size()));
          continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i)
          worst = std::max(worst, std::abs(got[i] - want[i]) / c.scale);
      }
    });
    if (worst > 1e-9) r.fail("max relative deviation " + detail::fmt(worst) + " > 1e-9");
    r.note(std::to_string(gaps) + " gaps, max |dlambda|/scale = " + detail::fmt(worst));
  });
}

/// 2. Sylvester's law: inertia is invariant under congruence.
inline CriterionResult sylvester_suite() {
  return detail::timed(2, "Sylvester congruence invariance", [](CriterionResult& r) {
    Rng rng(kSeed + 2);
    std::uniform_int_distribution<Index> dn(1, 12);
    int bad = 0;
    for (int t = 0; t < 200; ++t) {
      const Index n = dn(rng);
      const HermitianMatrix a = random_hermitian(rng, n);
      const Matrix c = random_conditioned(rng, n, 1e3);
      if (!(inertia_of(a) == inertia_of(congruence(a, c)))) {
        ++bad;
        r.fail("trial " + std::to_string(t) + " changed inertia");
      }
    }
    r.note("200 congruences, " + std::to_string(bad) + " mismatches");
  });
}

namespace detail {

// Random (pencil, lambda) with lambda uniform in a random bounded gap.
template <typename Visit>
void for_each_gap_point(std::uint64_t seed, int trials, Visit&& visit) {
  Rng rng(seed);
  std::uniform_int_distribution<Index> d1(1, 8);
  std::uniform_int_distribution<Index> d2(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, d1(rng), d2(rng));
    const auto gaps = all_gaps(p, 1.01 * spectral_bound(p) + 1.0);
    const GapInterval& g = gaps[std::uniform_int_distribution<std::size_t>(0, gaps.size() - 1)(rng)];
    const double a = g.lo + (g.hi - g.lo) * u(rng);
    const double b = g.lo + (g.hi - g.lo) * u(rng);
    visit(t, p, std::min(a, b), std::max(a, b));
  }
}

}  // namespace detail

/// 3. Frobenius-Schur factorization residual.
///
/// Forming X* D X in double costs about eps ||X||^2 ||D|| whatever the
/// accuracy of S and X, so the residual is reported next to that floor.
inline CriterionResult fs_residual_suite() {
  return detail::timed(3, "Frobenius-Schur residual", [](CriterionResult& r) {
    double worst = 0.0;
    double worst_floor = 0.0;
    double worst_dist = 0.0;
    int over = 0;
    detail::for_each_gap_point(kSeed + 3, 100, [&](int, const RiggedBlockPencil& p, double a, double) {
      const double res = fs_residual(p, a);
      if (res > 1e-12) ++over;
      if (res > worst) {
        const auto parts = spectra::detail::schur_parts(p, a, {});
        const Matrix d = shifted(p.a22(), a, p.g2()).matrix();
        const double xn = parts.d_inv_a21.norm();
        worst = res;
        worst_floor = std::numeric_limits<double>::epsilon() * xn * xn * d.norm() /
                      assemble_full(p, a).max_abs();
        const RealVector& t = p.t22_eigenvalues();
        worst_dist = (t.array() - a).abs().minCoeff();
      }
    });
    if (worst > 1e-12)
      r.fail(std::to_string(over) + " of 100 points above 1e-12, max residual " + detail::fmt(worst));
    r.note("100 points, max residual " + detail::fmt(worst) + " at distance " + detail::fmt(worst_dist) +
           " from the lower-right spectrum; rounding floor eps ||X||^2 ||D|| / ||T|| there " +
           detail::fmt(worst_floor));
  });
}

/// 4. S(l2) - S(l1) + (l2 - l1) G1 is negative semidefinite for l1 < l2 in a gap.
inline CriterionResult monotonicity_suite() {
  return detail::timed(4, "Schur complement monotonicity", [](CriterionResult& r) {
    double worst = -1.0;
    detail::for_each_gap_point(kSeed + 4, 100, [&](int, const RiggedBlockPencil& p, double a, double b) {
      const HermitianMatrix s1 = schur(p, a);
      const HermitianMatrix s2 = schur(p, b);
      const HermitianMatrix diff = (s2 - s1) + (b - a) * p.g1();
      const double scale = std::max({1.0, s1.max_abs(), s2.max_abs()});
      const RealVector e = eigh(diff, false).values;
      worst = std::max(worst, e(e.size() - 1) / scale);
    });
    if (worst > 1e-10) r.fail("max eigenvalue / scale " + detail::fmt(worst) + " > 1e-10");
    r.note("100 pairs, max eigenvalue / scale " + detail::fmt(worst));
  });
}

/// 5. Quartic example against the shooting oracle, N = 64 and N = 128.
inline CriterionResult quartic_suite() {
  return detail::timed(5, "quartic example vs shooting oracle", [](CriterionResult& r) {
    const RootReport ref = detail::quartic_reference();
    std::vector<double> roots;
    for (const auto& x : ref.roots)
      for (int k = 0; k < x.multiplicity; ++k) roots.push_back(x.lambda);
    std::vector<double> err64;
    for (Index n : {Index{64}, Index{128}}) {
      const auto run = detail::quartic_run(n);
      const auto got = detail::expand(run.hits);
      if (got.size() != roots.size()) {
        r.fail("N=" + std::to_string(n) + ": " + std::to_string(got.size()) + " eigenvalues vs " +
               std::to_string(roots.size()) + " oracle roots");
        return;
      }
      std::ostringstream os;
      os << "N=" << n << " rel errors:";
      for (std::size_t i = 0; i < got.size(); ++i) {
        const double e = std::abs(got[i] - roots[i]) / std::abs(roots[i]);
        os << ' ' << detail::fmt(e);
        if (n == 64) {
          err64.push_back(e);
          if (e > 1e-4) r.fail("N=64 root " + std::to_string(i) + " rel error " + detail::fmt(e));
        } else if (e * 8.0 > err64[i]) {
          r.fail("root " + std::to_string(i) + " error reduction below 8 under mesh halving");
        }
      }
      r.note(os.str());
    }
    r.note(std::to_string(roots.size()) + " oracle roots in (0.5, 200]");
  });
}

/// 6. Dirac example against the closed-form spectrum, N = 128 and 256.
inline CriterionResult dirac_suite() {
  return detail::timed(6, "dirac example vs closed form", [](CriterionResult& r) {
    const std::vector<double> exact = dirac_exact(1.0, 12.0);
    const double pi = std::numbers::pi;
    for (double named : {pi * (std::sqrt(5.0) - 1.0), pi * (1.0 + std::sqrt(5.0))}) {
      if (std::none_of(exact.begin(), exact.end(), [&](double v) { return std::abs(v - named) < 1e-12; }))
        r.fail("closed form misses " + detail::fmt(named));
    }
    std::vector<double> err128;
    for (Index n : {Index{128}, Index{256}}) {
      const auto got = detail::expand(locate(build_example_dirac(n), 1.0, 12.0));
      if (got.size() != exact.size()) {
        r.fail("N=" + std::to_string(n) + ": " + std::to_string(got.size()) +
               " eigenvalues vs " + std::to_string(exact.size()) + " exact");
        return;
      }
      std::ostringstream os;
      os << "N=" << n << " rel errors:";
      for (std::size_t i = 0; i < got.size(); ++i) {
        const double e = std::abs(got[i] - exact[i]) / exact[i];
        os << ' ' << detail::fmt(e);
        if (n == 128) {
          err128.push_back(e);
        } else {
          if (e > 1e-2) r.fail("N=256 eigenvalue " + std::to_string(i) + " rel error " + detail::fmt(e));
          const double order = std::log2(err128[i] / e);
          os << " (order " << std::round(order * 100.0) / 100.0 << ")";
          if (order < 1.5 || order > 2.5) r.fail("observed order " + detail::fmt(order) + " not about 2");
        }
      }
      r.note(os.str());
    }
  });
}

/// 7. Transport example: spectrum near {0, +-2 pi} and the resolvent kernel.
inline CriterionResult transport_suite() {
  return detail::timed(7, "transport example and resolvent kernel", [](CriterionResult& r) {
    SolverConfig cfg;
    cfg.lambda_tol_abs = 1e-13;
    const auto hits = locate(build_example_transport(256), -7.0, 7.0, cfg);
    const double tp = 2.0 * std::numbers::pi;
    for (double target : {-tp, 0.0, tp}) {
      const auto it = std::min_element(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.lambda - target) < std::abs(b.lambda - target);
      });
      if (it == hits.end()) {
        r.fail("no eigenvalue found");
        return;
      }
      const double err = target == 0.0 ? std::abs(it->lambda) : std::abs(it->lambda - target) / tp;
      if (err > (target == 0.0 ? 1e-12 : 1e-2))
        r.fail("eigenvalue near " + detail::fmt(target) + " off by " + detail::fmt(err));
      r.note("nearest to " + detail::fmt(target) + ": " + detail::fmt(it->lambda));
    }
    auto cosine = [](double x) { return Complex(std::cos(2.0 * std::numbers::pi * x), 0.0); };
    const double e128 = resolvent_check_transport(128, cosine).error;
    const double e256 = resolvent_check_transport(256, cosine).error;
    if (e256 > 1e-3) r.fail("resolvent error " + detail::fmt(e256) + " > 1e-3");
    if (e256 > 0.3 * e128) r.fail("resolvent error ratio " + detail::fmt(e256 / e128) + " > 0.3");
    const double e1 = resolvent_check_transport(256, [](double) { return Complex(1.0, 0.0); }).error;
    if (e1 > 1e-10) r.fail("constant right-hand side error " + detail::fmt(e1));
    r.note("resolvent errors N=128 " + detail::fmt(e128) + ", N=256 " + detail::fmt(e256) +
           ", constant rhs " + detail::fmt(e1));
  });
}

/// 8. Counting identities: multiplicity sums equal inertia differences and
/// the negative curve count equals nu on sampled grids.
inline CriterionResult counting_suite(Scope scope = {}) {
  return detail::timed(8, "counting identities", [scope](CriterionResult& r) {
    const SolverConfig cfg;
    auto check = [&](const std::string& tag, const RiggedBlockPencil& p, double lo, double hi,
                     const std::vector<EigenvalueHit>& hits, D1Shift shift, int samples) {
      Index total = 0;
      for (const auto& h : hits) total += h.multiplicity;
      if (total != nu(p, hi, cfg) - nu(p, lo, cfg)) r.fail(tag + ": multiplicity sum != nu jump");
      std::vector<double> grid;
      for (int k = 0; k < samples; ++k) grid.push_back(lo + (hi - lo) * (k + 0.5) / samples);
      const auto table = lambda_curves(p, shift.kappa, shift.tau, grid, p.n1(), cfg);
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (table.negative_count(i) != nu(p, grid[i], cfg))
          r.fail(tag + ": curve count != nu at " + detail::fmt(grid[i]));
    };
    if (scope.random) {
      detail::for_each_random_case([&](int t, const detail::RandomCase& c) {
        for (std::size_t g = 0; g < c.gaps.size(); ++g)
          check("random " + std::to_string(t), c.pencil, c.gaps[g].lo, c.gaps[g].hi, c.hits[g],
                detail::safe_shift(c.pencil), 7);
      });
      r.note("random suite checked");
    }
    if (scope.quartic) {
      const RiggedBlockPencil p = build_example_quartic(64);
      const auto run = detail::quartic_run(64);
      check("quartic", p, detail::kQuarticLo, detail::kQuarticHi, run.hits, *p.d1_shift(), 41);
      r.note("quartic N=64 checked");
    }
  });
}

namespace detail {

// Quadratic operator function A11 - lambda G1 - lambda^2 C, with the interval
// placed above the lower-right spectrum where A22 - lambda G2 < 0.
struct QuadraticCase {
  OperatorFunctionPencil f;
  double lo;
  double hi;
};

inline QuadraticCase quadratic_case() {
  Rng rng(kSeed + 9);
  const RiggedBlockPencil p = random_pencil(rng, 6, 4);
  const Matrix m = random_complex(rng, 6, 6);
  const Matrix c = 1e-3 * (m.adjoint() * m);
  const RealVector& t = p.t22_eigenvalues();
  const double lo = std::max(0.0, t(t.size() - 1)) + 0.1;
  const double hi = lo + 2.0 * spectral_bound(p);
  OperatorFunctionPencil f;
  f.n1 = p.n1();
  f.n2 = p.n2();
  f.eval = [p, c](double x) {
    return PencilBlocks{p.a11().matrix() - x * p.g1().matrix() - x * x * c, p.a12(),
                        p.a22().matrix() - x * p.g2().matrix()};
  };
  f.deriv = [p, c](double x) {
    return PencilBlocks{-p.g1().matrix() - 2.0 * x * c, Matrix::Zero(p.n1(), p.n2()),
                        -p.g2().matrix()};
  };
  f.epsilon = 1e-3;
  f.lower_gram = p.g2();
  return {f, lo, hi};
}

}  // namespace detail

/// 9. Negative-type certificates for linear pencils and the quadratic
/// operator-function localization against a 10^4-point scan of nu_F.
inline CriterionResult negative_type_suite(Scope scope = {}) {
  return detail::timed(9, "negative-type certificates", [scope](CriterionResult& r) {
    int certified = 0;
    auto tally = [&](const std::string& tag, const std::vector<EigenvalueHit>& hits) {
      for (const auto& h : hits) {
        if (h.certified)
          ++certified;
        else
          r.fail(tag + ": eigenvalue " + detail::fmt(h.lambda) + " not certified");
      }
    };
    if (scope.random)
      detail::for_each_random_case([&](int t, const detail::RandomCase& c) {
        for (const auto& hs : c.hits) tally("random " + std::to_string(t), hs);
      });
    if (scope.quartic) tally("quartic", detail::quartic_run(64).hits);
    r.note(std::to_string(certified) + " linear-pencil eigenvalues certified");

    if (scope.opfunc) {
      const auto qc = detail::quadratic_case();
      const auto hits = locate_general(qc.f, qc.lo, qc.hi);
      constexpr int kCells = 10000;
      std::vector<Index> scan(kCells + 1);
      for (int i = 0; i <= kCells; ++i)
        scan[static_cast<std::size_t>(i)] = nu_general(qc.f, qc.lo + (qc.hi - qc.lo) * i / kCells);
      std::vector<Index> claimed(kCells, 0);
      Index total = 0;
      for (const auto& h : hits) {
        total += h.multiplicity;
        const auto cell = std::clamp(
            static_cast<int>(std::ceil((h.lambda - qc.lo) / (qc.hi - qc.lo) * kCells)) - 1, 0, kCells - 1);
        claimed[static_cast<std::size_t>(cell)] += h.multiplicity;
      }
      for (int i = 0; i < kCells; ++i) {
        const Index jump = scan[static_cast<std::size_t>(i) + 1] - scan[static_cast<std::size_t>(i)];
        if (jump != claimed[static_cast<std::size_t>(i)])
          r.fail("scan cell " + std::to_string(i) + ": jump " + std::to_string(jump) + " vs " +
                 std::to_string(claimed[static_cast<std::size_t>(i)]) + " located");
      }
      if (total != scan.back() - scan.front()) r.fail("operator-function count mismatch");
      r.note("quadratic operator function: " + std::to_string(hits.size()) +
             " certified eigenvalues, scan agrees");
    }
  });
}

/// 10. Kernel vectors lift to kernel vectors of the full pencil.
inline CriterionResult kernel_lift_suite(Scope scope = {}) {
  return detail::timed(10, "kernel lift residual", [scope](CriterionResult& r) {
    const SolverConfig cfg;
    detail::LiftStats st;
    if (scope.random)
      detail::for_each_random_case([&](int, const detail::RandomCase& c) {
        for (const auto& hs : c.hits) st.merge(detail::lift_stats(c.pencil, hs, cfg));
      });
    if (scope.quartic)
      st.merge(detail::lift_stats(build_example_quartic(64), detail::quartic_run(64).hits, cfg));
    if (scope.dirac) {
      const RiggedBlockPencil p = build_example_dirac(256);
      st.merge(detail::lift_stats(p, locate(p, 1.0, 12.0, cfg), cfg));
    }
    if (st.worst > 1e-8) r.fail("max lift residual ratio " + detail::fmt(st.worst) + " > 1e-8");
    r.note(std::to_string(st.vectors) + " kernel vectors, max residual ratio " + detail::fmt(st.worst) +
           ", " + std::to_string(st.degenerate) + " with T(lambda) = 0 to roundoff");
  });
}

/// Every criterion in order.
inline std::vector<std::function<CriterionResult()>> all_criteria() {
  return {random_oracle_equivalence,
          sylvester_suite,
          fs_residual_suite,
          monotonicity_suite,
          quartic_suite,
          dirac_suite,
          transport_suite,
          [] { return counting_suite(); },
          [] { return negative_type_suite(); },
          [] { return kernel_lift_suite(); }};
}

}  // namespace spectra::verify
