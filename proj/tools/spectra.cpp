// spectra: eigenvalue localization for block operator pencils.
//
//   spectra gap     --problem FILE --lambda X
//   spectra eig     --problem FILE --interval A B
//   spectra inertia --problem FILE --grid A B M
//   spectra curves  --problem FILE --grid A B M --curves K
//   spectra verify  quartic|dirac|transport|random|all
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 domain error,
// 4 bisection budget exceeded (partial output written).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "spectra/problem.hpp"
#include "spectra/solver.hpp"
#include "spectra/verification.hpp"

namespace {

using namespace spectra;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDomain = 3, kBudget = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string problem;
  std::vector<double> interval;
  std::vector<double> grid;
  double lambda = 0.0;
  int curves = 1;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;
  std::optional<double> zero_tol;
  std::optional<double> epsilon;
  std::string out;
  std::string format = "csv";
  std::optional<int> threads;
  std::string suite;
};

int resolve_threads(const Options& o) {
  if (o.threads) {
    if (*o.threads < 1) throw UsageError("--threads must be at least 1");
    return *o.threads;
  }
  if (const char* env = std::getenv("SPECTRA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw UsageError("SPECTRA_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  return 1;
}

// Runs f(i) for i in [0, n) on up to `threads` workers; results are written
// by index so the output does not depend on the thread count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Loaded {
  ProblemSpec spec;
  RiggedBlockPencil pencil;
  SolverConfig config;
};

Loaded load(const Options& o) {
  if (o.problem.empty()) throw UsageError("--problem FILE is required");
  ProblemSpec spec = load_problem(o.problem);
  SolverConfig cfg;
  spec.solver.apply(cfg);
  if (o.tol_abs) cfg.lambda_tol_abs = *o.tol_abs;
  if (o.tol_rel) cfg.lambda_tol_rel = *o.tol_rel;
  if (o.zero_tol) cfg.zero_tol = *o.zero_tol;
  if (o.epsilon) cfg.epsilon_cap = *o.epsilon;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  RiggedBlockPencil p = make_pencil(spec);
  return {std::move(spec), std::move(p), cfg};
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + o.out + "'");
  f << text;
}

Json header(const char* command, const Loaded& l) {
  return {{"tool", {{"name", "spectra"}, {"version", kToolVersion}}},
          {"command", command},
          {"problem", problem_to_json(l.spec)},
          {"config", config_to_json(l.config)}};
}

std::vector<double> make_grid(const Options& o) {
  const double a = o.grid[0];
  const double b = o.grid[1];
  const double m = o.grid[2];
  if (!(m >= 0.0) || m != std::floor(m)) throw UsageError("--grid M must be a nonnegative integer");
  if (m > 0 && !(a < b)) throw UsageError("--grid needs A < B");
  const auto cells = static_cast<long>(m);
  std::vector<double> g;
  for (long i = 0; i <= cells; ++i)
    g.push_back(i == cells && cells > 0 ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(std::max(cells, 1L)));
  return g;
}

// All grid points must share one gap; a single point only needs to avoid the guard bands.
void check_grid_gap(const Loaded& l, const std::vector<double>& grid) {
  if (grid.size() == 1)
    gap_of(l.pencil, grid.front(), l.config.gap.guard_rel);
  else
    spectra::detail::require_same_gap(l.pencil, grid.front(), grid.back(), l.config);
}

int cmd_gap(const Options& o) {
  const Loaded l = load(o);
  const GapInterval gap = gap_of(l.pencil, o.lambda, l.config.gap.guard_rel);
  const RealVector& t = l.pencil.t22_eigenvalues();
  if (o.format == "json") {
    Json j = header("gap", l);
    j["lambda"] = o.lambda;
    j["t22"] = std::vector<double>(t.data(), t.data() + t.size());
    j["gap"] = gap_to_json(gap);
    emit(o, j.dump(2) + "\n");
  } else {
    CsvTable csv({"quantity", "value"});
    csv.add_row({"lambda", format_double(o.lambda)});
    csv.add_row({"gap_lo", format_double(gap.lo)});
    csv.add_row({"gap_hi", format_double(gap.hi)});
    csv.add_row({"guard", format_double(gap.guard)});
    for (Index i = 0; i < t.size(); ++i) csv.add_row({"t22", format_double(t(i))});
    emit(o, csv.str());
  }
  return kOk;
}

int cmd_eig(const Options& o) {
  const Loaded l = load(o);
  RunReport rep{l.spec, l.config, o.interval[0], o.interval[1], {}, {}, false, 0.0};
  if (!(rep.a < rep.b)) throw UsageError("--interval needs A < B");
  rep.gap = gap_of(l.pencil, rep.a, l.config.gap.guard_rel);
  int code = kOk;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    rep.hits = locate(l.pencil, rep.a, rep.b, l.config);
  } catch (const BisectionBudgetExceeded& e) {
    rep.hits = e.partial();
    rep.partial = true;
    code = kBudget;
    std::cerr << "spectra: " << e.what() << "; output is partial\n";
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(o, o.format == "json" ? rep.to_json().dump(2) + "\n" : hits_csv(rep.hits).str());
  return code;
}

int cmd_inertia(const Options& o) {
  const Loaded l = load(o);
  const std::vector<double> grid = make_grid(o);
  check_grid_gap(l, grid);
  std::vector<Index> nus(grid.size());
  parallel_for(grid.size(), resolve_threads(o), [&](std::size_t i) { nus[i] = nu(l.pencil, grid[i], l.config); });
  if (o.format == "json") {
    Json j = header("inertia", l);
    j["gap"] = gap_to_json(gap_of(l.pencil, grid.front(), l.config.gap.guard_rel));
    j["lambda"] = grid;
    j["nu"] = nus;
    emit(o, j.dump(2) + "\n");
  } else {
    CsvTable csv({"lambda", "nu"});
    for (std::size_t i = 0; i < grid.size(); ++i) csv.add_row({format_double(grid[i]), std::to_string(nus[i])});
    emit(o, csv.str());
  }
  return kOk;
}

int cmd_curves(const Options& o) {
  const Loaded l = load(o);
  if (o.curves < 1) throw UsageError("--curves must be at least 1");
  const std::vector<double> grid = make_grid(o);
  check_grid_gap(l, grid);
  const D1Shift shift = l.pencil.d1_shift().value_or(D1Shift{});
  d1_gram(l.pencil, shift.kappa, shift.tau);  // definiteness check before any work
  const Index k = std::min<Index>(o.curves, l.pencil.n1());
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), resolve_threads(o), [&](std::size_t i) {
    const LambdaCurveTable t = lambda_curves(l.pencil, shift.kappa, shift.tau, {grid[i]}, k, l.config);
    for (const auto& c : t.curves) rows[i].push_back(c[0]);
  });
  if (o.format == "json") {
    Json j = header("curves", l);
    j["kappa"] = shift.kappa;
    j["tau"] = shift.tau;
    j["epsilon"] = l.config.epsilon_cap;
    j["lambda"] = grid;
    j["curves"] = rows;
    emit(o, j.dump(2) + "\n");
  } else {
    std::vector<std::string> head{"lambda"};
    for (Index n = 0; n < k; ++n) head.push_back("L" + std::to_string(n));
    CsvTable csv(head);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> cells{format_double(grid[i])};
      for (double v : rows[i]) cells.push_back(format_double(v));
      csv.add_row(std::move(cells));
    }
    emit(o, csv.str());
  }
  return kOk;
}

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_verify(const Options& o) {
  using namespace spectra::verify;
  std::vector<std::function<CriterionResult()>> runs;
  const std::string& s = o.suite;
  if (s == "all") {
    runs = all_criteria();
  } else if (s == "quartic") {
    const Scope sc{false, true, false, false};
    runs = {quartic_suite, [sc] { return counting_suite(sc); }, [sc] { return negative_type_suite(sc); },
            [sc] { return kernel_lift_suite(sc); }};
  } else if (s == "dirac") {
    const Scope sc{false, false, true, false};
    runs = {dirac_suite, [sc] { return kernel_lift_suite(sc); }};
  } else if (s == "transport") {
    runs = {transport_suite};
  } else if (s == "random") {
    const Scope sc{true, false, false, true};
    runs = {random_oracle_equivalence, sylvester_suite, fs_residual_suite, monotonicity_suite,
            [sc] { return counting_suite(sc); }, [sc] { return negative_type_suite(sc); },
            [sc] { return kernel_lift_suite(sc); }};
  } else {
    throw UsageError("unknown verification suite '" + s + "' (quartic, dirac, transport, random, all)");
  }
  bool ok = true;
  Json items = Json::array();
  CsvTable csv({"criterion", "name", "result", "seconds", "notes"});
  for (const auto& run : runs) {
    const CriterionResult r = run();
    ok = ok && r.passed;
    std::string notes;
    for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
    csv.add_row({std::to_string(r.id), csv_quote(r.title), r.passed ? "pass" : "fail",
                 format_double(r.seconds), csv_quote(notes)});
    items.push_back({{"criterion", r.id}, {"name", r.title}, {"passed", r.passed},
                     {"seconds", r.seconds}, {"notes", r.notes}});
  }
  if (o.format == "json") {
    Json j = {{"tool", {{"name", "spectra"}, {"version", kToolVersion}}},
              {"command", "verify"}, {"suite", s}, {"passed", ok}, {"criteria", std::move(items)}};
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, csv.str());
  }
  return ok ? kOk : kVerifyFailed;
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Write output to FILE instead of stdout");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_problem(CLI::App* sub, Options& o) {
  sub->add_option("--problem", o.problem, "Problem specification (JSON)")->required();
  sub->add_option("--tol-abs", o.tol_abs, "Absolute bracket tolerance");
  sub->add_option("--tol-rel", o.tol_rel, "Relative bracket tolerance");
  sub->add_option("--zero-tol", o.zero_tol, "Relative zero band for inertia counts");
  sub->add_option("--epsilon", o.epsilon, "Cap for the curve values");
  sub->add_option("--threads", o.threads, "Worker threads (fallback: SPECTRA_THREADS)");
  add_output(sub, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues of self-adjoint block operator pencils in spectral gaps", "spectra"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  Options o;

  CLI::App* gap = app.add_subcommand("gap", "Lower-right spectrum and the gap containing --lambda");
  add_problem(gap, o);
  gap->add_option("--lambda", o.lambda, "Spectral parameter")->required();

  CLI::App* eig = app.add_subcommand("eig", "Locate eigenvalues in [A, B) with multiplicities");
  add_problem(eig, o);
  eig->add_option("--interval", o.interval, "Interval A B inside one gap")->expected(2)->required();

  CLI::App* inertia = app.add_subcommand("inertia", "Counting function on a uniform grid");
  add_problem(inertia, o);
  inertia->add_option("--grid", o.grid, "Grid A B M (M+1 points)")->expected(3)->required();

  CLI::App* curves = app.add_subcommand("curves", "Capped min-max curves on a uniform grid");
  add_problem(curves, o);
  curves->add_option("--grid", o.grid, "Grid A B M (M+1 points)")->expected(3)->required();
  curves->add_option("--curves", o.curves, "Number of curves K");

  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("name", o.suite, "quartic | dirac | transport | random | all")->required();
  add_output(verify, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gap->parsed()) return cmd_gap(o);
    if (eig->parsed()) return cmd_eig(o);
    if (inertia->parsed()) return cmd_inertia(o);
    if (curves->parsed()) return cmd_curves(o);
    return cmd_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "spectra: " << e.what() << "\n";
    return kUsage;
  } catch (const ProblemFormatError& e) {
    std::cerr << "spectra: " << e.what() << "\n";
    return kUsage;
  } catch (const BisectionBudgetExceeded& e) {
    std::cerr << "spectra: " << e.what() << "\n";
    return kBudget;
  } catch (const DomainError& e) {
    std::cerr << "spectra: " << e.what() << "\n";
    return kDomain;
  } catch (const InternalError& e) {
    std::cerr << "spectra: internal error: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const Error& e) {
    // Malformed input matrices: shape or Hermitian symmetry.
    std::cerr << "spectra: " << e.what() << "\n";
    return kUsage;
  }
}
