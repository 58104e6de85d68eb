#include <cmath>
#include <random>

#include <doctest.h>

#include "hoif/assembly.hpp"
#include "hoif/stencil_regular.hpp"
#include "regular_closed_form.hpp"

using namespace hoif;

TEST_CASE("constant coefficient gives the 20 / -4 / -1 stencil") {
  const StencilResult r = regular_stencil(Jet2(0.0, 0.0, Taylor2(6, 3.5)));
  const StencilPoly& s = r.stencil;
  CHECK(s.scale == 2);
  for (int k = -1; k <= 1; ++k)
    for (int l = -1; l <= 1; ++l) {
      const double expect = (k == 0 && l == 0) ? 20.0 : (k == 0 || l == 0) ? -4.0 : -1.0;
      CHECK(std::abs(s.coef(k, l, 0) - expect) <= 1e-14);
      for (int p = 1; p <= s.D(); ++p) CHECK(std::abs(s.coef(k, l, p)) <= 1e-14);
    }
  CHECK(r.monotone);
}

TEST_CASE("linear coefficient matches the closed-form coefficients") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int it = 0; it < 20;) {
    const double r1 = U(rng), r2 = U(rng);
    if (r1 * r1 + r2 * r2 > 1.0) continue;
    ++it;
    const double a0 = 1.7;
    Taylor2 a(6, a0);
    a.coef(1, 0) = r1 * a0;
    a.coef(0, 1) = r2 * a0;
    const StencilPoly s = regular_stencil(Jet2(0.0, 0.0, a)).stencil;
    const closed_form::Coeffs ref = closed_form::regular_linear(r1, r2);
    for (int j = 0; j < 9; ++j)
      for (int d = 0; d <= 6; ++d) {
        const double got = d <= s.D() ? s.c(j, d) : 0.0;
        CHECK(std::abs(got - ref[j][d]) <= 1e-11 * std::max(1.0, std::abs(ref[j][d])));
      }
  }
}

TEST_CASE("regular stencil passes the per-degree M-matrix conditions and sums to zero") {
  Taylor2 a(6, 2.0);
  a.coef(1, 0) = 0.7;
  a.coef(0, 1) = -0.4;
  a.coef(2, 0) = 0.3;
  a.coef(1, 1) = -0.2;
  a.coef(0, 3) = 0.05;
  const StencilResult r = regular_stencil(Jet2(0.1, 0.2, a));
  CHECK(check_m_matrix(r.stencil).pass);
  CHECK(r.stencil.c(regular_col(0, 0), 0) == doctest::Approx(20.0));
  for (int p = 0; p <= r.stencil.D(); ++p) {
    double sum = 0.0;
    for (int j = 0; j < 9; ++j) sum += r.stencil.c(j, p);
    CHECK(std::abs(sum) < 1e-10 * std::max(1.0, r.stencil.c.col(p).cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("regular rows are exact on polynomials when a is constant") {
  ProblemSpec p;
  p.name = "poly";
  p.domain = {-1, 1, -1, 1};
  p.plus.a = Expr::constant(2.0);
  p.plus.u = Expr::parse("1 + x - 2*y + x^2*y - 3*x^3*y^2 + 0.5*y^5 + x^4*y");
  p.minus = p.plus;
  const Problem P(p);
  const RowBuilder rb(P, 4);
  const Grid& g = rb.grid();
  for (auto [i, j] : {std::pair{5, 7}, {8, 8}, {3, 12}}) {
    REQUIRE(rb.kind(i, j) == RowKind::Regular);
    const AssembledRow row = rb.build(i, j);
    double lhs = 0.0;
    for (auto [c, v] : row.entries) lhs += v * P.u_exact(g.x(c % (g.N1 + 1)), g.y(c / (g.N1 + 1)));
    CHECK(std::abs(lhs - row.rhs) < 1e-8 * std::max(1.0, std::abs(row.rhs)));
  }
}

TEST_CASE("M-matrix check flags sign violations") {
  StencilPoly s;
  s.offsets = {{-1, 0}, {0, 0}, {1, 0}};
  s.c = Eigen::MatrixXd::Zero(3, 2);
  s.c.col(0) << -1, 2, -1;
  CHECK(check_m_matrix(s).pass);
  s.c(0, 1) = 0.5;
  s.c(1, 1) = -0.5;
  const MMatrixReport rep = check_m_matrix(s);
  CHECK_FALSE(rep.pass);
  CHECK(rep.violations.size() >= 2);
}
