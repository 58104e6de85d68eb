#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "hoif/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Options {
  std::string problem;
  int J = 5;
  std::string range;
  std::string mode = "exact";
  std::string out;
  int threads = 0;
  bool check_mmatrix = false;
};

std::pair<int, int> parse_range(const std::string& s) {
  static const std::regex re(R"(^\s*(\d+)\s*\.\.\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw std::invalid_argument("--J-range expects a..b, got '" + s + "'");
  const int a = std::stoi(m[1]), b = std::stoi(m[2]);
  if (b < a) throw std::invalid_argument("--J-range must be ascending");
  return {a, b};
}

// Writes to --out if given, otherwise to stdout.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

int report_audit(const hoif::MMatrixAudit& a) {
  std::cerr << "m-matrix audit: " << a.checked << " rows checked, " << a.failed << " failed, " << a.irregular
            << " irregular rows not audited; assembled signs " << (a.matrix_signs ? "ok" : "violated") << " ("
            << a.matrix_sign_failures << " rows)\n";
  for (size_t k = 0; k < a.failures.size() && k < 20; ++k) {
    const auto& f = a.failures[k];
    std::cerr << "  row " << f.index << " (" << hoif::row_kind_name(f.kind) << "):";
    for (const auto& v : f.report.violations)
      std::cerr << " [(" << v.offset.first << "," << v.offset.second << ") d=" << v.degree << " " << v.what << "]";
    std::cerr << "\n";
  }
  return a.pass() ? kOk : kNumerical;
}

int cmd_solve(const Options& o) {
  const hoif::Problem problem(hoif::load_problem(o.problem));
  const hoif::AssemblyOptions ao{true, o.threads};
  const hoif::GlobalSystem sys = hoif::assemble(problem, o.J, ao);
  const hoif::SolveReport rep = hoif::solve(sys);
  hoif::SolveOutput s;
  s.grid = sys.grid;
  s.u = rep.u;
  s.residual = rep.residual;
  emit(o.out, [&](std::ostream& os) { hoif::write_solution_csv(os, s); });
  std::cerr << problem.spec().name << " J=" << o.J << " h=" << sys.grid.h << " irregular=" << sys.n_irregular
            << " residual=" << rep.residual << " max|u_h|=" << rep.u.cwiseAbs().maxCoeff();
  if (problem.has_exact()) std::cerr << " error=" << hoif::max_error(problem, s);
  std::cerr << " time: stencils " << sys.seconds_regular << "s + " << sys.seconds_irregular << "s, form "
            << sys.seconds_form << "s, solve " << rep.seconds << "s\n";
  return o.check_mmatrix ? report_audit(hoif::audit_m_matrix(sys)) : kOk;
}

int cmd_convergence(const Options& o) {
  const hoif::Problem problem(hoif::load_problem(o.problem));
  auto [a, b] = o.range.empty() ? std::pair<int, int>{o.J, o.J} : parse_range(o.range);
  hoif::ErrorMode mode;
  if (o.mode == "exact")
    mode = hoif::ErrorMode::Exact;
  else if (o.mode == "successive")
    mode = hoif::ErrorMode::Successive;
  else
    throw std::invalid_argument("--mode must be exact or successive");
  const hoif::ConvergenceResult r = hoif::convergence(problem, a, b, mode, {true, o.threads});
  emit(o.out, [&](std::ostream& os) { hoif::write_convergence_csv(os, r); });
  std::cerr << "average order " << r.average_order << "\n";
  return kOk;
}

int cmd_check(const Options& o) {
  const hoif::Problem problem(hoif::load_problem(o.problem));
  const hoif::GlobalSystem sys = hoif::assemble(problem, o.J, {true, o.threads});
  return report_audit(hoif::audit_m_matrix(sys));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order finite differences for elliptic interface problems"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--problem", o.problem, "builtin name (ex31..ex34) or JSON configuration path")->required();
    c->add_option("--threads", o.threads, "worker threads for stencil generation (0: default)")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--out", o.out, "output CSV path (default: stdout)");
  };
  CLI::App* solve = app.add_subcommand("solve", "assemble and solve once; CSV of i,j,x,y,u_h");
  common(solve);
  solve->add_option("--J", o.J, "refinement level, h = (l2 - l1) / 2^J")->check(CLI::Range(1, 14));
  solve->add_flag("--check-mmatrix", o.check_mmatrix, "also run the M-matrix audit");

  CLI::App* conv = app.add_subcommand("convergence", "error table over a J range; CSV of J,h,error,order,seconds");
  common(conv);
  conv->add_option("--J-range", o.range, "ascending range a..b")->required();
  conv->add_option("--mode", o.mode, "exact or successive");

  CLI::App* check = app.add_subcommand("check-mmatrix", "per-row M-matrix audit of the assembled system");
  common(check);
  check->add_option("--J", o.J, "refinement level")->check(CLI::Range(1, 14));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*conv) return cmd_convergence(o);
    return cmd_check(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
