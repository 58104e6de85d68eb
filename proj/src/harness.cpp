#include "hoif/harness.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hoif {

SolveOutput run_solve(const Problem& problem, int J, const AssemblyOptions& options) {
  const GlobalSystem sys = assemble(problem, J, options);
  const SolveReport rep = solve(sys);
  SolveOutput out;
  out.grid = sys.grid;
  out.u = rep.u;
  out.n_irregular = sys.n_irregular;
  out.residual = rep.residual;
  out.seconds_regular = sys.seconds_regular;
  out.seconds_irregular = sys.seconds_irregular;
  out.seconds_form = sys.seconds_form;
  out.seconds_solve = rep.seconds;
  return out;
}

double max_error(const Problem& problem, const SolveOutput& s) {
  if (!problem.has_exact()) throw std::invalid_argument("exact error requested but the problem has no exact solution");
  const Grid& g = s.grid;
  double e = 0.0;
  for (int j = 0; j <= g.N2; ++j)
    for (int i = 0; i <= g.N1; ++i)
      e = std::max(e, std::abs(s.u(g.index(i, j)) - problem.u_exact(g.x(i), g.y(j))));
  return e;
}

double successive_error(const SolveOutput& coarse, const SolveOutput& fine) {
  const Grid& c = coarse.grid;
  const Grid& f = fine.grid;
  if (f.N1 != 2 * c.N1 || f.N2 != 2 * c.N2) throw std::invalid_argument("successive error needs grids J and J+1");
  double e = 0.0;
  for (int j = 0; j <= c.N2; ++j)
    for (int i = 0; i <= c.N1; ++i)
      e = std::max(e, std::abs(coarse.u(c.index(i, j)) - fine.u(f.index(2 * i, 2 * j))));
  return e;
}

ConvergenceResult convergence(const Problem& problem, int J_first, int J_last, ErrorMode mode,
                              const AssemblyOptions& options) {
  if (J_last < J_first) throw std::invalid_argument("convergence: empty J range");
  if (mode == ErrorMode::Exact && !problem.has_exact())
    throw std::invalid_argument("convergence: exact mode needs an exact solution");
  ConvergenceResult res;
  SolveOutput prev;
  if (mode == ErrorMode::Successive) prev = run_solve(problem, J_first, options);
  for (int J = J_first; J <= J_last; ++J) {
    ConvergenceRow row;
    row.J = J;
    if (mode == ErrorMode::Exact) {
      const SolveOutput s = run_solve(problem, J, options);
      row.h = s.grid.h;
      row.error = max_error(problem, s);
      row.seconds = s.seconds_total();
    } else {
      SolveOutput next = run_solve(problem, J + 1, options);
      row.h = prev.grid.h;
      row.error = successive_error(prev, next);
      row.seconds = prev.seconds_total();
      prev = std::move(next);
    }
    row.order = res.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : std::log2(res.rows.back().error / row.error);
    res.rows.push_back(row);
  }
  double sum = 0.0;
  int n = 0;
  for (const auto& r : res.rows)
    if (!std::isnan(r.order)) {
      sum += r.order;
      ++n;
    }
  res.average_order = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
  return res;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  (void)ec;
  return std::string(buf, ptr);
}

void write_solution_csv(std::ostream& out, const SolveOutput& s) {
  const Grid& g = s.grid;
  out << "i,j,x,y,u_h\n";
  for (int j = 0; j <= g.N2; ++j)
    for (int i = 0; i <= g.N1; ++i)
      out << i << ',' << j << ',' << csv_number(g.x(i)) << ',' << csv_number(g.y(j)) << ','
          << csv_number(s.u(g.index(i, j))) << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& r) {
  out << "J,h,error,order,seconds\n";
  for (const auto& row : r.rows)
    out << row.J << ',' << csv_number(row.h) << ',' << csv_number(row.error) << ',' << csv_number(row.order) << ','
        << csv_number(row.seconds) << '\n';
}

}  // namespace hoif
