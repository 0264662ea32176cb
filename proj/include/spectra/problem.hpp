#pragma once

// Problem files, reports and CSV output for the command-line front end.
//
// A problem file is JSON, either a builtin example
//   {"builtin": {"name": "quartic", "N": 64, "kappa": 0, "tau": 1}}
// or explicit blocks as nested arrays of [re, im] pairs
//   {"explicit": {"n1": 2, "n2": 1, "A11": [[[1,0],[0,0]], ...], ...}}
// with optional "solver" overrides of SolverConfig fields.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spectra/errors.hpp"
#include "spectra/galerkin.hpp"
#include "spectra/hermat.hpp"
#include "spectra/pencil.hpp"
#include "spectra/solver.hpp"

namespace spectra {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Malformed problem file or report request; the CLI maps it to exit 2.
class ProblemFormatError : public Error {
 public:
  using Error::Error;
};

struct BuiltinProblem {
  std::string name;  // quartic | dirac | transport
  Index n = 0;
  std::optional<double> kappa;
  std::optional<double> tau;
  friend bool operator==(const BuiltinProblem&, const BuiltinProblem&) = default;
};

struct ExplicitProblem {
  Index n1 = 0;
  Index n2 = 0;
  Matrix a11;
  Matrix a12;
  Matrix a22;
  Matrix g1;
  Matrix g2;
  std::optional<double> kappa;
  std::optional<double> tau;
  friend bool operator==(const ExplicitProblem& x, const ExplicitProblem& y) {
    auto same = [](const Matrix& a, const Matrix& b) {
      return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
    };
    return x.n1 == y.n1 && x.n2 == y.n2 && same(x.a11, y.a11) && same(x.a12, y.a12) &&
           same(x.a22, y.a22) && same(x.g1, y.g1) && same(x.g2, y.g2) && x.kappa == y.kappa &&
           x.tau == y.tau;
  }
};

/// Optional SolverConfig overrides carried by a problem file.
struct SolverOverrides {
  std::optional<double> lambda_tol_abs;
  std::optional<double> lambda_tol_rel;
  std::optional<double> zero_tol;
  std::optional<double> kernel_tol;
  std::optional<double> epsilon_cap;
  std::optional<int> max_bisections;
  std::optional<int> max_refinements;
  std::optional<int> initial_grid;
  std::optional<double> guard_rel;
  std::optional<double> cond_guard;
  friend bool operator==(const SolverOverrides&, const SolverOverrides&) = default;

  void apply(SolverConfig& c) const {
    if (lambda_tol_abs) c.lambda_tol_abs = *lambda_tol_abs;
    if (lambda_tol_rel) c.lambda_tol_rel = *lambda_tol_rel;
    if (zero_tol) c.zero_tol = *zero_tol;
    if (kernel_tol) c.kernel_tol = *kernel_tol;
    if (epsilon_cap) c.epsilon_cap = *epsilon_cap;
    if (max_bisections) c.max_bisections = *max_bisections;
    if (max_refinements) c.max_refinements = *max_refinements;
    if (initial_grid) c.initial_grid = *initial_grid;
    if (guard_rel) c.gap.guard_rel = *guard_rel;
    if (cond_guard) c.gap.cond_guard = *cond_guard;
  }
};

struct ProblemSpec {
  std::variant<BuiltinProblem, ExplicitProblem> problem;
  SolverOverrides solver;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

namespace detail {

template <typename T>
std::optional<T> opt_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

inline Matrix matrix_from_json(const Json& j, Index rows, Index cols, const char* name) {
  const std::string what = std::string("block ") + name;
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw ProblemFormatError(what + " must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ProblemFormatError(what + " must have " + std::to_string(cols) + " columns");
    for (Index k = 0; k < cols; ++k) {
      const Json& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ProblemFormatError(what + " entries must be [re, im] pairs");
      m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline ProblemSpec problem_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ProblemFormatError("problem must be a JSON object");
    ProblemSpec spec;
    const bool has_builtin = j.contains("builtin");
    const bool has_explicit = j.contains("explicit");
    if (has_builtin == has_explicit)
      throw ProblemFormatError("problem needs exactly one of \"builtin\" or \"explicit\"");
    if (has_builtin) {
      const Json& b = j.at("builtin");
      BuiltinProblem p;
      p.name = b.at("name").get<std::string>();
      if (p.name != "quartic" && p.name != "dirac" && p.name != "transport")
        throw ProblemFormatError("unknown builtin problem '" + p.name + "'");
      p.n = b.at("N").get<Index>();
      if (p.n < 2) throw ProblemFormatError("builtin N must be at least 2");
      p.kappa = detail::opt_field<double>(b, "kappa");
      p.tau = detail::opt_field<double>(b, "tau");
      spec.problem = p;
    } else {
      const Json& e = j.at("explicit");
      ExplicitProblem p;
      p.n1 = e.at("n1").get<Index>();
      p.n2 = e.at("n2").get<Index>();
      if (p.n1 < 1 || p.n2 < 0) throw ProblemFormatError("need n1 >= 1 and n2 >= 0");
      p.a11 = detail::matrix_from_json(e.at("A11"), p.n1, p.n1, "A11");
      p.g1 = detail::matrix_from_json(e.at("G1"), p.n1, p.n1, "G1");
      p.a12 = p.n2 > 0 ? detail::matrix_from_json(e.at("A12"), p.n1, p.n2, "A12") : Matrix(p.n1, 0);
      p.a22 = p.n2 > 0 ? detail::matrix_from_json(e.at("A22"), p.n2, p.n2, "A22") : Matrix(0, 0);
      p.g2 = p.n2 > 0 ? detail::matrix_from_json(e.at("G2"), p.n2, p.n2, "G2") : Matrix(0, 0);
      p.kappa = detail::opt_field<double>(e, "kappa");
      p.tau = detail::opt_field<double>(e, "tau");
      spec.problem = std::move(p);
    }
    if (j.contains("solver")) {
      const Json& s = j.at("solver");
      if (!s.is_object()) throw ProblemFormatError("\"solver\" must be an object");
      SolverOverrides& o = spec.solver;
      o.lambda_tol_abs = detail::opt_field<double>(s, "lambda_tol_abs");
      o.lambda_tol_rel = detail::opt_field<double>(s, "lambda_tol_rel");
      o.zero_tol = detail::opt_field<double>(s, "zero_tol");
      o.kernel_tol = detail::opt_field<double>(s, "kernel_tol");
      o.epsilon_cap = detail::opt_field<double>(s, "epsilon_cap");
      o.max_bisections = detail::opt_field<int>(s, "max_bisections");
      o.max_refinements = detail::opt_field<int>(s, "max_refinements");
      o.initial_grid = detail::opt_field<int>(s, "initial_grid");
      o.guard_rel = detail::opt_field<double>(s, "guard_rel");
      o.cond_guard = detail::opt_field<double>(s, "cond_guard");
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ProblemFormatError(std::string("invalid problem file: ") + e.what());
  }
}

inline Json problem_to_json(const ProblemSpec& spec) {
  Json j = Json::object();
  if (const auto* b = std::get_if<BuiltinProblem>(&spec.problem)) {
    Json o = {{"name", b->name}, {"N", b->n}};
    detail::put_opt(o, "kappa", b->kappa);
    detail::put_opt(o, "tau", b->tau);
    j["builtin"] = std::move(o);
  } else {
    const auto& e = std::get<ExplicitProblem>(spec.problem);
    Json o = {{"n1", e.n1}, {"n2", e.n2}};
    o["A11"] = detail::matrix_to_json(e.a11);
    o["A12"] = detail::matrix_to_json(e.a12);
    o["A22"] = detail::matrix_to_json(e.a22);
    o["G1"] = detail::matrix_to_json(e.g1);
    o["G2"] = detail::matrix_to_json(e.g2);
    detail::put_opt(o, "kappa", e.kappa);
    detail::put_opt(o, "tau", e.tau);
    j["explicit"] = std::move(o);
  }
  const SolverOverrides& s = spec.solver;
  if (!(s == SolverOverrides{})) {
    Json o = Json::object();
    detail::put_opt(o, "lambda_tol_abs", s.lambda_tol_abs);
    detail::put_opt(o, "lambda_tol_rel", s.lambda_tol_rel);
    detail::put_opt(o, "zero_tol", s.zero_tol);
    detail::put_opt(o, "kernel_tol", s.kernel_tol);
    detail::put_opt(o, "epsilon_cap", s.epsilon_cap);
    detail::put_opt(o, "max_bisections", s.max_bisections);
    detail::put_opt(o, "max_refinements", s.max_refinements);
    detail::put_opt(o, "initial_grid", s.initial_grid);
    detail::put_opt(o, "guard_rel", s.guard_rel);
    detail::put_opt(o, "cond_guard", s.cond_guard);
    j["solver"] = std::move(o);
  }
  return j;
}

inline ProblemSpec parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ProblemFormatError(std::string("invalid JSON: ") + e.what());
  }
  return problem_from_json(j);
}

inline std::string emit_problem(const ProblemSpec& spec) { return problem_to_json(spec).dump(2) + "\n"; }

inline ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFormatError("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

/// Builds the pencil; Gram matrices are checked by Cholesky here.
inline RiggedBlockPencil make_pencil(const ProblemSpec& spec) {
  if (const auto* b = std::get_if<BuiltinProblem>(&spec.problem)) {
    if (b->name == "quartic") return build_example_quartic(b->n, b->kappa.value_or(0.0), b->tau.value_or(1.0));
    RiggedBlockPencil p = b->name == "dirac" ? build_example_dirac(b->n) : build_example_transport(b->n);
    if (b->kappa || b->tau) p.with_d1_shift({b->kappa.value_or(0.0), b->tau.value_or(1.0)});
    return p;
  }
  const auto& e = std::get<ExplicitProblem>(spec.problem);
  RiggedBlockPencil p(HermitianMatrix(e.a11), e.a12, HermitianMatrix(e.a22), HermitianMatrix(e.g1),
                      HermitianMatrix(e.g2));
  if (e.kappa || e.tau) p.with_d1_shift({e.kappa.value_or(0.0), e.tau.value_or(1.0)});
  return p;
}

// ---------------------------------------------------------------------------
// Output

/// 17 significant digits, '.' separator,
/// independent of the global locale.  Non-finite values print as inf, -inf, nan.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// CSV table; the header row is always written, lines end in '\n'.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw InternalError("CSV row width mismatch");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// JSON numbers cannot be infinite; infinite gap ends are written as strings.
inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

inline Json config_to_json(const SolverConfig& c) {
  return {{"lambda_tol_abs", c.lambda_tol_abs}, {"lambda_tol_rel", c.lambda_tol_rel},
          {"zero_tol", c.zero_tol},             {"kernel_tol", c.kernel_tol},
          {"epsilon_cap", c.epsilon_cap},       {"max_bisections", c.max_bisections},
          {"max_refinements", c.max_refinements}, {"initial_grid", c.initial_grid},
          {"guard_rel", c.gap.guard_rel},       {"cond_guard", c.gap.cond_guard}};
}

inline Json gap_to_json(const GapInterval& g) {
  return {{"lo", json_number(g.lo)}, {"hi", json_number(g.hi)}, {"guard", g.guard}};
}

inline Json hit_to_json(const EigenvalueHit& h) {
  return {{"lambda", h.lambda},
          {"multiplicity", h.multiplicity},
          {"bracket", {h.lo, h.hi}},
          {"negative_type", h.negative_type},
          {"certified", h.certified},
          {"kernel_dimension", h.kernel_dimension}};
}

inline double neg_type_max(const EigenvalueHit& h) {
  return h.negative_type.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : *std::max_element(h.negative_type.begin(), h.negative_type.end());
}

inline CsvTable hits_csv(const std::vector<EigenvalueHit>& hits) {
  CsvTable t({"lambda", "multiplicity", "bracket_lo", "bracket_hi", "neg_type_max"});
  for (const auto& h : hits)
    t.add_row({format_double(h.lambda), std::to_string(h.multiplicity), format_double(h.lo),
               format_double(h.hi), format_double(neg_type_max(h))});
  return t;
}

/// Eigenvalue run: problem and configuration echo, gap, hits, timing.
struct RunReport {
  ProblemSpec problem;
  SolverConfig config;
  double a = 0.0;
  double b = 0.0;
  GapInterval gap;
  std::vector<EigenvalueHit> hits;
  bool partial = false;
  double seconds = 0.0;

  Json to_json() const {
    Json hs = Json::array();
    for (const auto& h : hits) hs.push_back(hit_to_json(h));
    return {{"tool", {{"name", "spectra"}, {"version", kToolVersion}}},
            {"command", "eig"},
            {"problem", problem_to_json(problem)},
            {"config", config_to_json(config)},
            {"interval", {a, b}},
            {"gap", gap_to_json(gap)},
            {"partial", partial},
            {"hits", std::move(hs)},
            {"timings", {{"seconds", seconds}}}};
  }
};

}  // namespace spectra
