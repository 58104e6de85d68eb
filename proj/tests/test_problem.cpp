#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "hoif/problem.hpp"

using namespace hoif;

TEST_CASE("builtin problems construct and validate") {
  for (const auto& n : builtin_names()) {
    const ProblemSpec s = builtin(n);
    CHECK_NOTHROW(s.validate());
    const Problem P(s);
    CHECK(P.has_interface());
  }
  CHECK_THROWS_AS(builtin("ex99"), std::invalid_argument);
  CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), std::invalid_argument);
}

TEST_CASE("example 3.1 data") {
  const Problem P(builtin("ex31"));
  CHECK(P.has_exact());
  CHECK(P.side(0.0, 0.0) == Side::Minus);
  CHECK(P.side(2.0, 0.0) == Side::Plus);
  CHECK(P.u_exact(0.0, 0.0) == doctest::Approx(31.0));
  CHECK(P.u_exact(2.0, 0.0) == doctest::Approx(1.0));
  // Jump of u across the level set is -30.
  const double x = std::pow(2.0, 0.25);
  CHECK(P.u(Side::Plus, x, 0.0) - P.u(Side::Minus, x, 0.0) == doctest::Approx(-30.0));
  CHECK(P.boundary_type(kLeft) == BoundaryType::Robin);
  CHECK(P.boundary_type(kRight) == BoundaryType::Dirichlet);
  // Robin data from the exact solution: -u_x + alpha u on the left side.
  const double y = 0.4, h = 1e-5;
  const double ux = (P.u_exact(-2.5 + h, y) - P.u_exact(-2.5 - h, y)) / (2 * h);
  CHECK(P.boundary_g(kLeft, -2.5, y) == doctest::Approx(-ux + (std::cos(y) + 2) * P.u_exact(-2.5, y)).epsilon(1e-7));
}

TEST_CASE("derived source equals -div(a grad u)") {
  const Problem P(builtin("ex31"));
  const double x = 1.7, y = 0.9, h = 1e-3;
  auto flux_x = [&](double xx, double yy) {
    return P.a(Side::Plus, xx, yy) * (P.u(Side::Plus, xx + h / 2, yy) - P.u(Side::Plus, xx - h / 2, yy)) / h;
  };
  auto flux_y = [&](double xx, double yy) {
    return P.a(Side::Plus, xx, yy) * (P.u(Side::Plus, xx, yy + h / 2) - P.u(Side::Plus, xx, yy - h / 2)) / h;
  };
  const double div = (flux_x(x + h / 2, y) - flux_x(x - h / 2, y)) / h + (flux_y(x, y + h / 2) - flux_y(x, y - h / 2)) / h;
  CHECK(P.f(Side::Plus, x, y) == doctest::Approx(-div).epsilon(1e-4));
}

TEST_CASE("curvature and curvature-dependent jumps") {
  CHECK(curvature_from_derivatives(0.0, 2.0, -2.0, 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(curvature_from_derivatives(0.0, 0.0, 1.0, 0.0), std::domain_error);
  const Problem P(builtin("ex33"));
  // Ellipse (cos t, 0.5 sin t): curvature 4 at t = 0 and 0.5 at t = pi/2.
  const CurvatureJump c0 = curvature_jump(P, 0.0);
  CHECK(c0.kappa == doctest::Approx(4.0));
  CHECK(c0.g == doctest::Approx(3.0));
  CHECK(c0.g_gamma == doctest::Approx(4.0));
  CHECK(curvature_jump(P, M_PI / 2).kappa == doctest::Approx(0.5));
  const Problem Q(builtin("ex34"));
  CHECK(curvature_jump(Q, 0.3).g == doctest::Approx(-std::sin(0.3) - 1.0));
  CHECK_THROWS_AS(curvature_jump(Problem(builtin("ex31")), 0.0), std::invalid_argument);
}

TEST_CASE("JSON configuration round-trips") {
  for (const auto& n : builtin_names()) {
    const ProblemSpec a = builtin(n);
    const ProblemSpec b = problem_from_json(problem_to_json(a));
    CHECK(problem_to_json(b) == problem_to_json(a));
    CHECK(b.domain == a.domain);
    CHECK(b.plus.a.source() == a.plus.a.source());
  }
  CHECK_THROWS_AS(problem_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(problem_from_json(R"({"domain": [0, 1]})"), std::invalid_argument);
  CHECK_THROWS_AS(problem_from_json(R"({"domain": [0,1,0,1], "plus": {"a": "auto", "u": "x"},
      "boundary": {"left": {}, "right": {}, "bottom": {}, "top": {}}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(problem_from_json(R"({"domain": [0,1,0,1], "plus": {"a": "1"},
      "boundary": {"left": {}, "right": {}, "bottom": {}, "top": {}}})"),
                  std::invalid_argument);
}

TEST_CASE("manufactured problems are deterministic and consistent") {
  const ProblemSpec a = manufacture(7, 5, ManufacturedInterface::CircleLevelSet, true);
  const ProblemSpec b = manufacture(7, 5, ManufacturedInterface::CircleLevelSet, true);
  CHECK(problem_to_json(a) == problem_to_json(b));
  const Problem P(a);
  CHECK(P.boundary_type(kLeft) == BoundaryType::Robin);
  CHECK(P.boundary_type(kTop) == BoundaryType::Dirichlet);
  for (double x = -2.0; x <= 2.0; x += 0.25)
    for (double y = -2.0; y <= 2.0; y += 0.25) {
      CHECK(P.a(Side::Plus, x, y) > 0.0);
      CHECK(P.a(Side::Minus, x, y) > 0.0);
    }
  const double t = 0.8, x = std::cos(t), y = std::sin(t);
  CHECK(P.jump_g(x, y, t) == doctest::Approx(P.u(Side::Plus, x, y) - P.u(Side::Minus, x, y)));
  CHECK_THROWS_AS(manufacture(1, 8, ManufacturedInterface::None), std::invalid_argument);
}
