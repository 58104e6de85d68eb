#include <cmath>
#include <cstdlib>

#include <doctest.h>

#include "hoif/assembly.hpp"
#include "hoif/harness.hpp"

using namespace hoif;

namespace {

ProblemSpec laplace_linear() {
  ProblemSpec p;
  p.name = "laplace-x";
  p.domain = {0, 1, 0, 1};
  p.plus.a = Expr::constant(1.0);
  p.plus.u = Expr::parse("x");
  p.minus = p.plus;
  return p;
}

}  // namespace

TEST_CASE("empty interface Laplace problem with u = x is solved exactly") {
  const Problem P(laplace_linear());
  const SolveOutput s = run_solve(P, 4);
  CHECK(s.n_irregular == 0);
  CHECK(max_error(P, s) < 1e-10);
  CHECK(s.residual < 1e-10);
}

TEST_CASE("serial and parallel assembly produce identical systems") {
  const Problem P(builtin("ex34"));
  const GlobalSystem a = assemble(P, 4, {false, 1});
  const GlobalSystem b = assemble(P, 4, {true, 2});
  CHECK(a.A.nonZeros() == b.A.nonZeros());
  CHECK((a.A - b.A).norm() == 0.0);
  CHECK((a.b - b.b).norm() == 0.0);
  CHECK(a.kind == b.kind);
  CHECK(a.n_irregular == b.n_irregular);
  CHECK(a.n_irregular > 0);
}

TEST_CASE("row kinds follow the boundary conditions") {
  const Problem P(builtin("ex31"));
  const GlobalSystem s = assemble(P, 4);
  const Grid& g = s.grid;
  CHECK(s.kind[g.index(0, 0)] == RowKind::Corner);
  CHECK(s.kind[g.index(0, 5)] == RowKind::Edge);
  CHECK(s.kind[g.index(5, 0)] == RowKind::Edge);
  CHECK(s.kind[g.index(g.N1, 5)] == RowKind::Dirichlet);
  CHECK(s.kind[g.index(5, g.N2)] == RowKind::Dirichlet);
  CHECK(s.kind[g.index(0, g.N2)] == RowKind::Dirichlet);
  CHECK(s.kind[g.index(g.N1 / 2, g.N2 / 2)] == RowKind::Regular);
  int irregular = 0;
  for (RowKind k : s.kind) irregular += k == RowKind::Irregular;
  CHECK(irregular == s.n_irregular);
}

TEST_CASE("M-matrix audit passes on the builtin examples and flags negative alpha") {
  for (const char* name : {"ex31", "ex34"}) {
    const MMatrixAudit a = audit_m_matrix(assemble(Problem(builtin(name)), 5));
    CHECK(a.failed == 0);
    CHECK(a.checked > 0);
    CHECK(a.irregular > 0);
  }
  CHECK(audit_m_matrix(assemble(Problem(builtin("ex34")), 5)).pass());

  ProblemSpec p = laplace_linear();
  p.boundary[kLeft] = BoundarySpec{BoundaryType::Robin, Expr::constant(-1.0), Expr::parse("auto")};
  const MMatrixAudit bad = audit_m_matrix(assemble(Problem(p), 4));
  CHECK_FALSE(bad.pass());
  bool edge_flagged = false;
  for (const auto& f : bad.failures) edge_flagged |= f.kind == RowKind::Edge;
  CHECK(edge_flagged);
}

TEST_CASE("example 3.4 at J = 4 has 289 nodes and a solution of moderate size") {
  const SolveOutput s = run_solve(Problem(builtin("ex34")), 4);
  CHECK(s.grid.size() == 289);
  CHECK(s.u.allFinite());
}

TEST_CASE("example 3.1 at J = 5 has the expected magnitude") {
  const Problem P(builtin("ex31"));
  const SolveOutput s = run_solve(P, 5);
  const double m = s.u.cwiseAbs().maxCoeff();
  CHECK(m > 106.95 / 2);
  CHECK(m < 106.95 * 2);
}

TEST_CASE("successive and exact convergence tables") {
  const Problem P(laplace_linear());
  const ConvergenceResult r = convergence(P, 2, 3, ErrorMode::Exact);
  REQUIRE(r.rows.size() == 2);
  CHECK(std::isnan(r.rows[0].order));
  CHECK(r.rows[1].h == doctest::Approx(0.125));
  CHECK(r.rows[1].error < 1e-10);
  CHECK_THROWS_AS(convergence(Problem(builtin("ex34")), 3, 4, ErrorMode::Exact), std::invalid_argument);
  CHECK_THROWS_AS(convergence(P, 3, 2, ErrorMode::Exact), std::invalid_argument);
}

TEST_CASE("CSV numbers are locale independent and round-trip") {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324}) {
    const std::string s = csv_number(v);
    CHECK(s.find(',') == std::string::npos);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(csv_number(std::nan("")) == "nan");
}
