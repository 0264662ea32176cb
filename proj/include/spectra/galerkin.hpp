#pragma once

// One-dimensional Galerkin discretizations on [0, 1] and the three model
// pencils built from them:
//
//   quartic    [[-d2, -d2], [-d2, 0]] on clamped C1 cubics x discontinuous P1
//   dirac      [[i d, -d], [d, 0]]    on periodic P1 x P0
//   transport  -i d                   on periodic P1 (single block)
//
// Every integrand is piecewise polynomial of degree <= 6, so 5-point
// Gauss-Legendre quadrature per element is exact up to rounding.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/hermat.hpp"
#include "spectra/pencil.hpp"

namespace spectra {

class Mesh1D {
 public:
  static Mesh1D uniform(Index n) {
    if (n < 1) throw DomainError("mesh needs at least one element");
    std::vector<double> nodes(static_cast<std::size_t>(n + 1));
    for (Index i = 0; i <= n; ++i) nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    nodes.back() = 1.0;
    return Mesh1D(std::move(nodes));
  }

  explicit Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2 || nodes_.front() != 0.0 || nodes_.back() != 1.0)
      throw DomainError("mesh must start at 0 and end at 1");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      if (!(nodes_[i] > nodes_[i - 1])) throw DomainError("mesh nodes must be strictly increasing");
  }

  Index elements() const { return static_cast<Index>(nodes_.size()) - 1; }
  double node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  double width(Index e) const { return node(e + 1) - node(e); }
  const std::vector<double>& nodes() const { return nodes_; }

  friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

 private:
  std::vector<double> nodes_;
};

enum class BasisKind { hermite_clamped, p1_periodic, p1_discontinuous, p0 };

struct BasisSpec {
  BasisKind kind;
  Mesh1D mesh;

  BasisSpec(BasisKind k, Mesh1D m) : kind(k), mesh(std::move(m)) {
    if (kind == BasisKind::hermite_clamped && mesh.elements() < 2)
      throw DomainError("clamped Hermite basis needs at least 2 elements");
    if (kind == BasisKind::p1_periodic && mesh.elements() < 2)
      throw DomainError("periodic P1 basis needs at least 2 elements");
  }

  Index dim() const {
    const Index n = mesh.elements();
    switch (kind) {
      case BasisKind::hermite_clamped: return 2 * (n - 1);
      case BasisKind::p1_periodic: return n;
      case BasisKind::p1_discontinuous: return 2 * n;
      case BasisKind::p0: return n;
    }
    return 0;
  }

  /// Highest derivative order with an L2 representative.
  int max_order() const {
    switch (kind) {
      case BasisKind::hermite_clamped: return 2;
      case BasisKind::p1_periodic:
      case BasisKind::p1_discontinuous: return 1;
      case BasisKind::p0: return 0;
    }
    return 0;
  }
};

enum class FormKind { mass, grad, dd_vs_val, d_vs_val, i_d_vs_val, dd_vs_dd };

namespace detail {

struct LocalShape {
  // Global index per local function, -1 when constrained away.
  std::vector<Index> dofs;
  // values[k][d]: d-th x-derivative of local function k at the point.
  std::vector<std::array<double, 3>> values;
};

inline LocalShape local_shape(const BasisSpec& b, Index e, double xi) {
  const double h = b.mesh.width(e);
  const Index n = b.mesh.elements();
  LocalShape s;
  switch (b.kind) {
    case BasisKind::hermite_clamped: {
      // Node i (1..N-1) carries value dof 2(i-1) and slope dof 2(i-1)+1.
      auto val = [&](Index node) { return node == 0 || node == n ? Index{-1} : 2 * (node - 1); };
      auto slp = [&](Index node) { return node == 0 || node == n ? Index{-1} : 2 * (node - 1) + 1; };
      s.dofs = {val(e), slp(e), val(e + 1), slp(e + 1)};
      const double x2 = xi * xi;
      const double x3 = x2 * xi;
      s.values = {
          {1 - 3 * x2 + 2 * x3, (-6 * xi + 6 * x2) / h, (-6 + 12 * xi) / (h * h)},
          {h * (xi - 2 * x2 + x3), 1 - 4 * xi + 3 * x2, (-4 + 6 * xi) / h},
          {3 * x2 - 2 * x3, (6 * xi - 6 * x2) / h, (6 - 12 * xi) / (h * h)},
          {h * (-x2 + x3), -2 * xi + 3 * x2, (-2 + 6 * xi) / h},
      };
      break;
    }
    case BasisKind::p1_periodic:
      s.dofs = {e, (e + 1) % n};
      s.values = {{1 - xi, -1 / h, 0.0}, {xi, 1 / h, 0.0}};
      break;
    case BasisKind::p1_discontinuous:
      s.dofs = {2 * e, 2 * e + 1};
      s.values = {{1 - xi, -1 / h, 0.0}, {xi, 1 / h, 0.0}};
      break;
    case BasisKind::p0:
      s.dofs = {e};
      s.values = {{1.0, 0.0, 0.0}};
      break;
  }
  return s;
}

// 5-point Gauss-Legendre rule on [0, 1]; exact for degree <= 9.
inline const std::array<std::pair<double, double>, 5>& gauss5() {
  static const std::array<std::pair<double, double>, 5> rule = [] {
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const double w0 = 128.0 / 225.0;
    std::array<std::pair<double, double>, 5> r{{{0.0, w0}, {-a, wa}, {a, wa}, {-b, wb}, {b, wb}}};
    for (auto& [x, w] : r) {
      x = 0.5 * (x + 1.0);
      w *= 0.5;
    }
    return r;
  }();
  return rule;
}

struct FormOrders {
  int trial;
  int test;
  Complex coeff;
};

inline FormOrders orders(FormKind f) {
  switch (f) {
    case FormKind::mass: return {0, 0, 1.0};
    case FormKind::grad: return {1, 1, 1.0};
    case FormKind::dd_vs_val: return {2, 0, 1.0};
    case FormKind::d_vs_val: return {1, 0, 1.0};
    case FormKind::i_d_vs_val: return {1, 0, Complex(0.0, 1.0)};
    case FormKind::dd_vs_dd: return {2, 2, 1.0};
  }
  return {0, 0, 1.0};
}

}  // namespace detail

/// Matrix of the form a(y, z) = coeff * int D^p y * conj(D^q z) dx with rows
/// indexed by test functions z and columns by trial functions y.
inline Matrix form_matrix(const BasisSpec& trial, const BasisSpec& test, FormKind form) {
  if (!(trial.mesh == test.mesh)) throw IncompatibleForm("trial and test bases use different meshes");
  const auto ord = detail::orders(form);
  if (ord.trial > trial.max_order() || ord.test > test.max_order())
    throw IncompatibleForm("derivative order not admissible for the basis");
  Matrix m = Matrix::Zero(test.dim(), trial.dim());
  const Index n = trial.mesh.elements();
  for (Index e = 0; e < n; ++e) {
    const double h = trial.mesh.width(e);
    for (const auto& [xi, w] : detail::gauss5()) {
      const auto ys = detail::local_shape(trial, e, xi);
      const auto zs = detail::local_shape(test, e, xi);
      for (std::size_t j = 0; j < zs.dofs.size(); ++j) {
        if (zs.dofs[j] < 0) continue;
        const double zv = zs.values[j][static_cast<std::size_t>(ord.test)];
        for (std::size_t k = 0; k < ys.dofs.size(); ++k) {
          if (ys.dofs[k] < 0) continue;
          const double yv = ys.values[k][static_cast<std::size_t>(ord.trial)];
          m(zs.dofs[j], ys.dofs[k]) += ord.coeff * (w * h * yv * zv);
        }
      }
    }
  }
  return m;
}

/// Nodal interpolation of f into a P1 periodic basis (f(0) is used for the
/// identified end node).
inline Vector interpolate_p1_periodic(const Mesh1D& mesh, const std::function<Complex(double)>& f) {
  Vector c(mesh.elements());
  for (Index i = 0; i < mesh.elements(); ++i) c(i) = f(mesh.node(i));
  return c;
}

/// Coefficients of a cubic-or-lower function in the clamped Hermite basis,
/// given its value and slope.
inline Vector interpolate_hermite(const Mesh1D& mesh, const std::function<double(double)>& f,
                                  const std::function<double(double)>& df) {
  const Index n = mesh.elements();
  Vector c(2 * (n - 1));
  for (Index i = 1; i < n; ++i) {
    c(2 * (i - 1)) = f(mesh.node(i));
    c(2 * (i - 1) + 1) = df(mesh.node(i));
  }
  return c;
}

/// Quartic-coupled pencil: A11 = int y'z', A21 = -int y'' w, A22 = 0,
/// G1/G2 the mass matrices of clamped Hermite cubics and discontinuous P1.
inline RiggedBlockPencil build_example_quartic(Index n, double kappa = 0.0, double tau = 1.0) {
  if (n < 2) throw DomainError("quartic example needs N >= 2");
  const Mesh1D mesh = Mesh1D::uniform(n);
  const BasisSpec h(BasisKind::hermite_clamped, mesh);
  const BasisSpec w(BasisKind::p1_discontinuous, mesh);
  const Matrix a21 = -form_matrix(h, w, FormKind::dd_vs_val);
  RiggedBlockPencil p(HermitianMatrix::symmetrized(form_matrix(h, h, FormKind::grad)),
                      a21.adjoint(), HermitianMatrix::zero(w.dim()),
                      HermitianMatrix::symmetrized(form_matrix(h, h, FormKind::mass)),
                      HermitianMatrix::symmetrized(form_matrix(w, w, FormKind::mass)));
  p.with_d1_shift({kappa, tau}).with_labels({"clamped Hermite cubic", "discontinuous P1"});
  return p;
}

/// Sign-indefinite first-order pencil: A11 = int i y' conj(z), A21 = int y' w,
/// A22 = 0 on periodic P1 x P0.
inline RiggedBlockPencil build_example_dirac(Index n) {
  if (n < 3) throw DomainError("dirac example needs N >= 3");
  const Mesh1D mesh = Mesh1D::uniform(n);
  const BasisSpec p1(BasisKind::p1_periodic, mesh);
  const BasisSpec p0(BasisKind::p0, mesh);
  const Matrix a21 = form_matrix(p1, p0, FormKind::d_vs_val);
  RiggedBlockPencil p(HermitianMatrix::symmetrized(form_matrix(p1, p1, FormKind::i_d_vs_val)),
                      a21.adjoint(), HermitianMatrix::zero(p0.dim()),
                      HermitianMatrix::symmetrized(form_matrix(p1, p1, FormKind::mass)),
                      HermitianMatrix::symmetrized(form_matrix(p0, p0, FormKind::mass)));
  p.with_labels({"periodic P1", "P0"});
  return p;
}

/// Single-block pencil of -i d/dx with y(0) = y(1) on periodic P1.
inline RiggedBlockPencil build_example_transport(Index n) {
  if (n < 3) throw DomainError("transport example needs N >= 3");
  const Mesh1D mesh = Mesh1D::uniform(n);
  const BasisSpec p1(BasisKind::p1_periodic, mesh);
  RiggedBlockPencil p(HermitianMatrix::symmetrized(-form_matrix(p1, p1, FormKind::i_d_vs_val)),
                      HermitianMatrix::symmetrized(form_matrix(p1, p1, FormKind::mass)));
  p.with_labels({"periodic P1"});
  return p;
}

/// Kernel of (T - 1)^{-1} for T y = -i y' on periodic W^1_2[0, 1].
inline Complex resolvent_kernel_value(double x, double t) {
  const Complex i(0.0, 1.0);
  const Complex e = std::exp(i * (x - t));
  if (x >= t) return i * e / (1.0 - std::exp(i));
  return -i * e / (1.0 - std::exp(-i));
}

struct ResolventCheck {
  double error = 0.0;  // relative L2 error of the nodal interpolants
  Vector discrete;     // Galerkin solution at the nodes
  Vector reference;    // kernel integral at the nodes
};

/// Solves (A11 - G1) u = G1 f for the transport pencil and compares u with
/// the kernel integral int K(x, t) f(t) dt evaluated by composite Gauss
/// quadrature on a 10x refined grid.
inline ResolventCheck resolvent_check_transport(Index n, const std::function<Complex(double)>& f) {
  const RiggedBlockPencil p = build_example_transport(n);
  const Mesh1D mesh = Mesh1D::uniform(n);
  const Vector fc = interpolate_p1_periodic(mesh, f);
  const HermitianMatrix op = shifted(p.a11(), 1.0, p.g1());
  const LdlFactorization fac = ldl_factor(op, 0.0);
  ResolventCheck out;
  out.discrete = solve_with(fac, p.g1().matrix() * fc);

  const Index panels = 10 * n;
  out.reference.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double x = mesh.node(j);
    Complex acc = 0.0;
    for (Index q = 0; q < panels; ++q) {
      const double a = static_cast<double>(q) / panels;
      const double b = static_cast<double>(q + 1) / panels;
      for (const auto& [xi, w] : detail::gauss5()) {
        const double t = a + (b - a) * xi;
        // x = j/N is a panel boundary, so no panel straddles the kernel jump.
        acc += w * (b - a) * resolvent_kernel_value(x, t) * f(t);
      }
    }
    out.reference(j) = acc;
  }
  const Vector diff = out.discrete - out.reference;
  const Matrix& g = p.g1().matrix();
  const double num = std::sqrt((diff.adjoint() * g * diff)(0, 0).real());
  const double den = std::sqrt((out.reference.adjoint() * g * out.reference)(0, 0).real());
  out.error = den > 0.0 ? num / den : num;
  return out;
}

}  // namespace spectra
