#pragma once

// Reference spectra computed along paths independent of the Schur-complement
// machinery: dense generalized eigensolves of the full pencil, RK4 shooting
// for the clamped fourth-order boundary problem, and closed-form spectra of
// the periodic first-order examples.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/hermat.hpp"
#include "spectra/pencil.hpp"

namespace spectra {

struct SpectralPoint {
  double lambda = 0.0;
  Index multiplicity = 1;
};

/// Groups ascending values whose consecutive distance is at most tol.
inline std::vector<SpectralPoint> cluster_values(const std::vector<double>& sorted, double tol) {
  std::vector<SpectralPoint> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    double sum = sorted[i];
    while (j < sorted.size() && sorted[j] - sorted[j - 1] <= tol) sum += sorted[j++];
    out.push_back({sum / static_cast<double>(j - i), static_cast<Index>(j - i)});
    i = j;
  }
  return out;
}

/// Generalized eigenvalues of (T, diag(G1, G2)) in [lo, hi), clustered at
/// cluster_rel * max(1, max |lambda| in range).
inline std::vector<SpectralPoint> dense_spectrum(const RiggedBlockPencil& p, double lo, double hi,
                                                 double cluster_rel = 1e-9) {
  const RealVector all = eigh_gen(assemble_full(p, 0.0), full_gram(p)).values;
  std::vector<double> in;
  double scale = 1.0;
  for (Index i = 0; i < all.size(); ++i) {
    if (all(i) >= lo && all(i) < hi) {
      in.push_back(all(i));
      scale = std::max(scale, std::abs(all(i)));
    }
  }
  return cluster_values(in, cluster_rel * scale);
}

inline Index total_multiplicity(const std::vector<SpectralPoint>& pts) {
  Index s = 0;
  for (const auto& p : pts) s += p.multiplicity;
  return s;
}

/// Characteristic determinant of y'''' - lambda y'' - lambda^2 y = 0 with
/// y(0) = y'(0) = y(1) = y'(1) = 0: u1, u2 start from (y, y', y'', y''')(0)
/// = (0,0,1,0) and (0,0,0,1); d = u1(1) u2'(1) - u2(1) u1'(1).  Classical RK4
/// with `steps` uniform steps.
inline double quartic_shooting_determinant(double lambda, int steps = 2048) {
  using State = std::array<double, 4>;
  auto rhs = [lambda](const State& s) {
    return State{s[1], s[2], s[3], lambda * s[2] + lambda * lambda * s[0]};
  };
  auto integrate = [&](State s) {
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
      const State k1 = rhs(s);
      State t;
      for (int i = 0; i < 4; ++i) t[i] = s[i] + 0.5 * h * k1[i];
      const State k2 = rhs(t);
      for (int i = 0; i < 4; ++i) t[i] = s[i] + 0.5 * h * k2[i];
      const State k3 = rhs(t);
      for (int i = 0; i < 4; ++i) t[i] = s[i] + h * k3[i];
      const State k4 = rhs(t);
      for (int i = 0; i < 4; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return s;
  };
  const State u1 = integrate({0.0, 0.0, 1.0, 0.0});
  const State u2 = integrate({0.0, 0.0, 0.0, 1.0});
  return u1[0] * u2[1] - u2[0] * u1[1];
}

struct RootReport {
  struct Root {
    double lambda = 0.0;
    int multiplicity = 1;
    // Bracketing data: scan cell and the determinant signs at its ends.
    double cell_lo = 0.0;
    double cell_hi = 0.0;
    int sign_lo = 0;
    int sign_hi = 0;
  };
  std::vector<Root> roots;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  int rk_steps = 0;
  int refinements = 0;
};

namespace detail {

template <typename F>
double bisect_root(F&& d, double a, double b, double da, double tol) {
  while (b - a > tol * std::max(1.0, std::abs(a))) {
    const double m = 0.5 * (a + b);
    const double dm = d(m);
    if (dm == 0.0) return m;
    if ((dm < 0.0) == (da < 0.0)) {
      a = m;
      da = dm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace detail

/// Roots of the shooting determinant in [lo, hi]: a scan with the given step
/// locates sign changes, bisection refines them to relative tol, and every
/// root is recomputed with half the RK step; a shift above 10 tol raises
/// StepTooCoarse.  Sign-touching local minima of |d| (relative depth below
/// 1e-8) are reported with multiplicity 2.
inline RootReport quartic_char_roots(double lo, double hi, double step, double tol,
                                     int rk_steps = 2048) {
  if (!(lo < hi) || !(step > 0.0) || !(tol > 0.0)) throw DomainError("invalid scan parameters");
  if (lo <= 0.0 && hi >= 0.0) throw DomainError("scan interval must exclude lambda = 0");
  if (rk_steps < 2048) throw DomainError("RK4 step must not exceed 1/2048");

  RootReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.step = step;
  rep.rk_steps = rk_steps;
  rep.refinements = 1;

  auto d1 = [&](double x) { return quartic_shooting_determinant(x, rk_steps); };
  auto d2 = [&](double x) { return quartic_shooting_determinant(x, 2 * rk_steps); };

  const auto cells = static_cast<long>(std::ceil((hi - lo) / step));
  std::vector<double> xs;
  std::vector<double> ds;
  for (long i = 0; i <= cells; ++i) {
    const double x = i == cells ? hi : lo + static_cast<double>(i) * step;
    xs.push_back(x);
    ds.push_back(d1(x));
  }

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const int sa = detail::sign_of(ds[i]);
    const int sb = detail::sign_of(ds[i + 1]);
    if (sa == 0) {
      rep.roots.push_back({xs[i], 1, xs[i], xs[i], 0, 0});
      continue;
    }
    if (sb != 0 && sa != sb) {
      const double r1 = detail::bisect_root(d1, xs[i], xs[i + 1], ds[i], tol);
      const double r2 = detail::bisect_root(d2, xs[i], xs[i + 1], d2(xs[i]), tol);
      if (std::abs(r1 - r2) > 10.0 * tol * std::max(1.0, std::abs(r1)))
        throw StepTooCoarse("shooting root moved under RK step halving");
      rep.roots.push_back({r1, 1, xs[i], xs[i + 1], sa, sb});
    } else if (i > 0 && sa == sb && sa == detail::sign_of(ds[i - 1]) &&
               std::abs(ds[i]) < std::abs(ds[i - 1]) && std::abs(ds[i]) < std::abs(ds[i + 1])) {
      // Golden-section search for a touching zero inside [x_{i-1}, x_{i+1}].
      double a = xs[i - 1];
      double b = xs[i + 1];
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - g * (b - a);
      double e = a + g * (b - a);
      double fc = std::abs(d1(c));
      double fe = std::abs(d1(e));
      while (b - a > tol * std::max(1.0, std::abs(a))) {
        if (fc < fe) {
          b = e;
          e = c;
          fe = fc;
          c = b - g * (b - a);
          fc = std::abs(d1(c));
        } else {
          a = c;
          c = e;
          fc = fe;
          e = a + g * (b - a);
          fe = std::abs(d1(e));
        }
      }
      const double depth = std::min(fc, fe) / std::max(std::abs(ds[i - 1]), std::abs(ds[i + 1]));
      if (depth < 1e-8) rep.roots.push_back({0.5 * (a + b), 2, xs[i - 1], xs[i + 1], sa, sa});
    }
  }
  if (!xs.empty() && detail::sign_of(ds.back()) == 0)
    rep.roots.push_back({xs.back(), 1, xs.back(), xs.back(), 0, 0});
  return rep;
}

/// pi n (-1 +- sqrt 5), n != 0, in [lo, hi): roots of
/// lambda^2 + 2 pi n lambda - 4 pi^2 n^2 = 0 from y = exp(2 pi i n x).
inline std::vector<double> dirac_exact(double lo, double hi) {
  if (lo <= 0.0 && hi > 0.0) throw DomainError("interval must exclude lambda = 0");
  const double pi = std::numbers::pi;
  const double s5 = std::sqrt(5.0);
  const double reach = std::max(std::abs(lo), std::abs(hi));
  const auto nmax = static_cast<long>(reach / (pi * (s5 - 1.0))) + 1;
  std::vector<double> out;
  for (long n = -nmax; n <= nmax; ++n) {
    if (n == 0) continue;
    for (double branch : {-1.0 + s5, -1.0 - s5}) {
      const double v = pi * static_cast<double>(n) * branch;
      if (v >= lo && v < hi) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// 2 pi Z in [lo, hi).
inline std::vector<double> transport_exact(double lo, double hi) {
  const double tp = 2.0 * std::numbers::pi;
  std::vector<double> out;
  for (auto n = static_cast<long>(std::floor(lo / tp)); tp * static_cast<double>(n) < hi; ++n) {
    const double v = tp * static_cast<double>(n);
    if (v >= lo) out.push_back(v);
  }
  return out;
}

}  // namespace spectra
