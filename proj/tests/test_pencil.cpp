#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "spectra/galerkin.hpp"
#include "spectra/pencil.hpp"
#include "spectra/random.hpp"

using namespace spectra;

namespace {

HermitianMatrix diag(std::initializer_list<double> v) {
  RealVector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return HermitianMatrix::diagonal(d);
}

// A11 = diag(2, 3), A12 = (1, 0)^T, A22 = (-1), G1 = I, G2 = I.
RiggedBlockPencil two_plus_one() {
  Matrix a12 = Matrix::Zero(2, 1);
  a12(0, 0) = 1.0;
  return {diag({2.0, 3.0}), a12, diag({-1.0}), HermitianMatrix::identity(2), HermitianMatrix::identity(1)};
}

RiggedBlockPencil decoupled(std::initializer_list<double> a11, std::initializer_list<double> a22) {
  const HermitianMatrix d1 = diag(a11);
  const HermitianMatrix d2 = diag(a22);
  return {d1, Matrix::Zero(d1.size(), d2.size()), d2, HermitianMatrix::identity(d1.size()),
          HermitianMatrix::identity(d2.size())};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Pencil, RejectsBadShapes) {
  EXPECT_THROW(RiggedBlockPencil(diag({1.0, 2.0}), Matrix::Zero(1, 1), diag({1.0}),
                                 HermitianMatrix::identity(2), HermitianMatrix::identity(1)),
               DimensionMismatch);
  EXPECT_THROW(RiggedBlockPencil(diag({1.0}), HermitianMatrix::identity(2)), DimensionMismatch);
}

TEST(Pencil, RejectsIndefiniteGram) {
  EXPECT_THROW(RiggedBlockPencil(diag({1.0, 2.0}), diag({1.0, -1.0})), NotPositiveDefinite);
}

TEST(AssembleFull, AtZeroHasPlainBlocks) {
  Rng rng(30);
  const RiggedBlockPencil p = random_pencil(rng, 3, 2);
  const Matrix t = assemble_full(p, 0.0).matrix();
  EXPECT_EQ(Matrix(t.topLeftCorner(3, 3)), p.a11().matrix());
  EXPECT_EQ(Matrix(t.topRightCorner(3, 2)), p.a12());
  EXPECT_EQ(Matrix(t.bottomLeftCorner(2, 3)), Matrix(p.a12().adjoint()));
  EXPECT_EQ(Matrix(t.bottomRightCorner(2, 2)), p.a22().matrix());
}

TEST(AssembleFull, ShiftedBlocksAndHermitian) {
  Rng rng(31);
  const RiggedBlockPencil p = random_pencil(rng, 4, 3);
  const Matrix t = assemble_full(p, 1.0).matrix();
  EXPECT_EQ(t, Matrix(t.adjoint()));
  EXPECT_LE(max_abs(t.topLeftCorner(4, 4) - (p.a11().matrix() - p.g1().matrix())), 1e-15);
  EXPECT_LE(max_abs(t.bottomRightCorner(3, 3) - (p.a22().matrix() - p.g2().matrix())), 1e-15);
}

TEST(AssembleFull, SingleBlock) {
  const RiggedBlockPencil p(diag({1.0, 5.0}), diag({2.0, 1.0}));
  EXPECT_EQ(assemble_full(p, 2.0).matrix(), diag({-3.0, 3.0}).matrix());
}

TEST(T22Spectrum, ZeroBlockGivesZeros) {
  const RiggedBlockPencil p = decoupled({1.0}, {0.0, 0.0, 0.0});
  EXPECT_EQ(t22_spectrum(p), RealVector::Zero(3));
}

TEST(T22Spectrum, EmptyForSingleBlock) {
  EXPECT_EQ(t22_spectrum(RiggedBlockPencil(diag({1.0}), diag({1.0}))).size(), 0);
}

TEST(T22Spectrum, ResidualChecked) {
  Rng rng(32);
  const RiggedBlockPencil p = random_pencil(rng, 2, 5);
  const EigenDecomposition ed = eigh_gen(p.a22(), p.g2(), true);
  for (Index k = 0; k < 5; ++k) {
    EXPECT_NEAR(ed.values(k), t22_spectrum(p)(k), 1e-12);
    const Vector x = ed.vectors.col(k);
    EXPECT_LE((p.a22().matrix() * x - ed.values(k) * (p.g2().matrix() * x)).norm(), 1e-10 * x.norm() * 10.0);
  }
}

TEST(GapOf, AboveZeroBlock) {
  const RiggedBlockPencil p = decoupled({1.0}, {0.0});
  const GapInterval g = gap_of(p, 1.0);
  EXPECT_EQ(g.lo, g.guard);
  EXPECT_EQ(g.hi, kInf);
}

TEST(GapOf, WholeLineForSingleBlock) {
  const GapInterval g = gap_of(RiggedBlockPencil(diag({1.0}), diag({1.0})), 123.0);
  EXPECT_EQ(g.lo, -kInf);
  EXPECT_EQ(g.hi, kInf);
}

TEST(GapOf, BetweenTwoEigenvalues) {
  const RiggedBlockPencil p = decoupled({1.0}, {-2.0, 3.0});
  const GapInterval g = gap_of(p, 0.0);
  EXPECT_GT(g.guard, 0.0);
  EXPECT_EQ(g.lo, -2.0 + g.guard);
  EXPECT_EQ(g.hi, 3.0 - g.guard);
}

TEST(GapOf, InsideGuardRaises) {
  const RiggedBlockPencil p = decoupled({1.0}, {-2.0, 3.0});
  EXPECT_THROW(gap_of(p, 3.0), InsideT22Spectrum);
  EXPECT_THROW(schur(p, -2.0), InsideT22Spectrum);
}

TEST(AllGaps, CoverTheLineBetweenEigenvalues) {
  const RiggedBlockPencil p = decoupled({1.0}, {-2.0, 3.0});
  const auto gaps = all_gaps(p, 10.0);
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_EQ(gaps[0].lo, -10.0);
  EXPECT_LT(gaps[0].hi, -2.0);
  EXPECT_GT(gaps[1].lo, -2.0);
  EXPECT_LT(gaps[1].hi, 3.0);
  EXPECT_EQ(gaps[2].hi, 10.0);
  for (const auto& g : gaps) {
    EXPECT_NO_THROW(schur(p, g.lo));
    EXPECT_NO_THROW(schur(p, g.hi));
  }
}

TEST(Schur, DecoupledIsShiftedA11) {
  const RiggedBlockPencil p = decoupled({1.0, 4.0}, {7.0});
  EXPECT_EQ(schur(p, 2.0).matrix(), diag({-1.0, 2.0}).matrix());
}

TEST(Schur, SingleBlockIsShiftedA11) {
  const RiggedBlockPencil p(diag({1.0, 4.0}), diag({2.0, 2.0}));
  EXPECT_EQ(schur(p, 1.0).matrix(), diag({-1.0, 2.0}).matrix());
}

TEST(Schur, TwoPlusOneHandExample) {
  EXPECT_LE(max_abs(schur(two_plus_one(), 0.0).matrix() - diag({3.0, 3.0}).matrix()), 1e-15);
}

TEST(Schur, IllConditionedBlockRaises) {
  // The guard passes but D has pivots of very different size.
  const RiggedBlockPencil p = decoupled({1.0}, {0.0, 1e20});
  GapOptions opt;
  opt.guard_rel = 1e-40;
  EXPECT_THROW(schur(p, 1e-9, opt), IllConditioned);
}

TEST(SchurDerivative, DecoupledIsMinusG1) {
  const RiggedBlockPencil p = decoupled({1.0, 4.0}, {7.0});
  EXPECT_EQ(schur_derivative(p, 0.0).matrix(), (-1.0 * HermitianMatrix::identity(2)).matrix());
}

TEST(SchurDerivative, BoundedByMinusG1AndMatchesFiniteDifference) {
  Rng rng(33);
  for (int t = 0; t < 30; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, 1 + t % 6, 1 + t % 5);
    const auto gaps = all_gaps(p, spectral_bound(p) + 1.0);
    const GapInterval& g = gaps[static_cast<std::size_t>(t) % gaps.size()];
    const double lam = 0.5 * (g.lo + g.hi);
    const HermitianMatrix sd = schur_derivative(p, lam);
    const double g1min = eigh(p.g1(), false).values(0);
    EXPECT_LE(eigh(sd, false).values(sd.size() - 1), -g1min * (1.0 - 1e-10));
    const double h = 1e-5;
    const Matrix fd = (schur(p, lam + h).matrix() - schur(p, lam - h).matrix()) / (2.0 * h);
    EXPECT_LE(max_abs(fd - sd.matrix()), 1e-6 * sd.max_abs() * std::max(1.0, 1.0 / std::pow(std::min(lam - g.lo, g.hi - lam), 2)));
  }
}

TEST(FsResidual, DecoupledIsExact) {
  EXPECT_LE(fs_residual(decoupled({1.0, 4.0}, {7.0, -3.0}), 0.5), 1e-15);
}

TEST(FsResidual, TwoPlusOneExample) { EXPECT_LE(fs_residual(two_plus_one(), 0.0), 1e-14); }

TEST(FsResidual, RandomPencilsAwayFromGapEdges) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, 1 + t % 8, 1 + (t / 8) % 8);
    for (const auto& g : all_gaps(p, spectral_bound(p) + 1.0))
      EXPECT_LE(fs_residual(p, 0.5 * (g.lo + g.hi)), 1e-12);
  }
}

TEST(Haynsworth, InertiaAdditivityOnRandomPencils) {
  Rng rng(35);
  for (int t = 0; t < 40; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, 1 + t % 7, 1 + t % 5);
    for (const auto& g : all_gaps(p, spectral_bound(p) + 1.0)) {
      const double lam = g.lo + 0.37 * (g.hi - g.lo);
      const Inertia full = inertia_of(assemble_full(p, lam), 1e-14);
      const Inertia s = inertia_of(schur(p, lam), 1e-14);
      const Inertia d = inertia_of(shifted(p.a22(), lam, p.g2()), 1e-14);
      EXPECT_EQ(full.n_neg, s.n_neg + d.n_neg);
      EXPECT_EQ(full.n_zero, s.n_zero);
    }
  }
}

TEST(Haynsworth, KernelDimensionAtEigenvalue) {
  // Eigenvalue 2 of the decoupled block with multiplicity 2.
  const RiggedBlockPencil p = decoupled({2.0, 2.0, 5.0}, {-1.0});
  EXPECT_EQ(inertia_of(assemble_full(p, 2.0), 1e-12).n_zero, 2);
  EXPECT_EQ(inertia_of(schur(p, 2.0), 1e-12).n_zero, 2);
}

TEST(Monotonicity, SchurDecreasesAtLeastLikeG1) {
  Rng rng(36);
  for (int t = 0; t < 100; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, 1 + t % 8, t % 9);
    const auto gaps = all_gaps(p, spectral_bound(p) + 1.0);
    const GapInterval& g = gaps[static_cast<std::size_t>(t) % gaps.size()];
    const double l1 = g.lo + 0.2 * (g.hi - g.lo);
    const double l2 = g.lo + 0.7 * (g.hi - g.lo);
    const HermitianMatrix s1 = schur(p, l1);
    const HermitianMatrix s2 = schur(p, l2);
    const RealVector e = eigh((s2 - s1) + (l2 - l1) * p.g1(), false).values;
    EXPECT_LE(e(e.size() - 1), 1e-10 * std::max({1.0, s1.max_abs(), s2.max_abs()}));
  }
}

TEST(D1Gram, DecoupledIsShiftedA11) {
  const RiggedBlockPencil p = decoupled({1.0, 4.0}, {0.0});
  const HermitianMatrix g = d1_gram(p, -1.0, 1.0);
  EXPECT_EQ(g.matrix(), diag({2.0, 5.0}).matrix());
}

TEST(D1Gram, KappaAboveSpectrumIsIndefinite) {
  EXPECT_THROW(d1_gram(decoupled({1.0, 4.0}, {0.0}), 5.0, 1.0), NotPositiveDefinite);
}

TEST(D1Gram, TauMustExceedLowerRightSpectrum) {
  EXPECT_THROW(d1_gram(decoupled({1.0}, {0.0, 3.0}), -1.0, 2.0), DomainError);
}

TEST(D1Gram, QuarticExampleIsDefinite) {
  const RiggedBlockPencil p = build_example_quartic(16);
  EXPECT_NO_THROW(d1_gram(p, 0.0, 1.0));
}

TEST(D1Gram, EqualsSchurComplementAtShiftPair) {
  // G_D1 = (A11 - kappa G1) + A12 (tau G2 - A22)^{-1} A12*, assembled
  // independently through a dense inverse.
  Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    const RiggedBlockPencil p = random_pencil(rng, 1 + t % 6, 1 + t % 4);
    const double kappa = eigh_gen(p.a11(), p.g1()).values(0) - 1.0;
    const double tau = p.t22_eigenvalues()(p.n2() - 1) + 1.0;
    const Matrix e = tau * p.g2().matrix() - p.a22().matrix();
    const Matrix ref = p.a11().matrix() - kappa * p.g1().matrix() + p.a12() * e.inverse() * p.a12().adjoint();
    const HermitianMatrix g = d1_gram(p, kappa, tau);
    EXPECT_LE(max_abs(g.matrix() - ref), 1e-10 * max_abs(ref));
    // It is the Schur complement of [[A11 - kappa G1, A12], [A12*, A22 - tau G2]]
    // over its second block.
    const HermitianMatrix top = shifted(p.a11(), kappa, p.g1());
    const Matrix sc = top.matrix() - p.a12() * (p.a22().matrix() - tau * p.g2().matrix()).inverse() * p.a12().adjoint();
    EXPECT_LE(max_abs(g.matrix() - sc), 1e-10 * max_abs(ref));
  }
}

TEST(OpFunc, LinearAdapterBlocks) {
  Rng rng(38);
  const RiggedBlockPencil p = random_pencil(rng, 3, 2);
  const OperatorFunctionPencil f = opfunc_from_linear(p);
  const PencilBlocks b0 = f.eval(0.0);
  EXPECT_EQ(b0.a11, p.a11().matrix());
  EXPECT_EQ(b0.a12, p.a12());
  EXPECT_EQ(b0.a22, p.a22().matrix());
  const PencilBlocks d = f.deriv(1.7);
  EXPECT_EQ(d.a11, Matrix(-p.g1().matrix()));
  EXPECT_EQ(d.a12, Matrix::Zero(3, 2));
  EXPECT_EQ(d.a22, Matrix(-p.g2().matrix()));
  EXPECT_TRUE(f.reentrant);
}

TEST(OpFunc, DerivativeMatchesFiniteDifference) {
  Rng rng(39);
  const RiggedBlockPencil p = random_pencil(rng, 3, 3);
  const OperatorFunctionPencil f = opfunc_from_linear(p);
  const double h = 1e-4;
  const PencilBlocks plus = f.eval(0.3 + h);
  const PencilBlocks minus = f.eval(0.3 - h);
  const PencilBlocks d = f.deriv(0.3);
  EXPECT_LE(max_abs((plus.a11 - minus.a11) / (2 * h) - d.a11), 1e-9);
  EXPECT_LE(max_abs((plus.a22 - minus.a22) / (2 * h) - d.a22), 1e-9);
}

TEST(OpFunc, LinearAdapterMatchesSchurAboveLowerSpectrum) {
  Rng rng(40);
  const RiggedBlockPencil p = random_pencil(rng, 4, 3);
  const OperatorFunctionPencil f = opfunc_from_linear(p);
  const double lam = p.t22_eigenvalues()(2) + 0.5;
  EXPECT_EQ(opfunc_schur(f, lam).matrix(), schur(p, lam).matrix());
}

TEST(OpFunc, ConstantNegativeBlock) {
  const RiggedBlockPencil p = two_plus_one();
  OperatorFunctionPencil f;
  f.n1 = 2;
  f.n2 = 1;
  f.eval = [&p](double) { return PencilBlocks{p.a11().matrix(), p.a12(), p.a22().matrix()}; };
  f.deriv = [](double) { return PencilBlocks{Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 1)}; };
  for (double lam : {-3.0, 0.0, 5.0}) EXPECT_EQ(opfunc_schur(f, lam).matrix(), schur(p, 0.0).matrix());
}

TEST(OpFunc, PositiveLowerBlockViolatesNegativity) {
  OperatorFunctionPencil f;
  f.n1 = 1;
  f.n2 = 1;
  f.eval = [](double) { return PencilBlocks{Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Identity(1, 1)}; };
  f.deriv = [](double) { return PencilBlocks{Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1)}; };
  EXPECT_THROW(opfunc_schur(f, 0.0), NegativityViolated);
}
