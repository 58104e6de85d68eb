#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoif/expr.hpp"
#include "hoif/interface.hpp"

namespace hoif {

enum class Side { Minus = 0, Plus = 1 };
enum class BoundaryType { Dirichlet, Robin };
enum class InterfaceKind { None, LevelSet, Parametric };

// Boundary sides in the order left (x = l1), right (x = l2), bottom (y = l3),
// top (y = l4). Robin conditions read du/dn + alpha u = g with n the outward
// normal.
enum BoundarySide { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct BoundarySpec {
  BoundaryType type = BoundaryType::Dirichlet;
  Expr alpha = Expr::constant(0.0);
  Expr g = Expr::parse("auto");
};

struct InterfaceSpec {
  InterfaceKind kind = InterfaceKind::None;
  Expr psi;     // level set, psi > 0 on the plus side
  Expr x, y;    // parametrization in theta (parametric only)
};

struct SideSpec {
  Expr a = Expr::constant(1.0);
  Expr f = Expr::parse("auto");
  std::optional<Expr> u;  // exact solution, if known
};

// Fields marked "auto" are derived from the exact solution: f = -div(a grad u),
// g = u+ - u-, g_gamma = (a+ grad u+ - a- grad u-) . grad psi / |grad psi|,
// boundary data from the boundary operator applied to u. Jump data may use
// theta (curve parameter, or atan2(y, x) for level sets) and kappa
// (curvature of the interface).
struct ProblemSpec {
  std::string name;
  std::array<double, 4> domain{0, 1, 0, 1};
  InterfaceSpec interface;
  SideSpec plus, minus;
  Expr g = Expr::constant(0.0), g_gamma = Expr::constant(0.0);
  std::array<BoundarySpec, 4> boundary;

  bool has_exact() const;
  void validate() const;
};

std::vector<std::string> builtin_names();
ProblemSpec builtin(const std::string& name);

// Structured text configuration (JSON).
std::string problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const std::string& text);
// A builtin name or a path to a JSON configuration.
ProblemSpec load_problem(const std::string& name_or_path);

// Point evaluation of a problem; safe for concurrent use.
class Problem {
 public:
  explicit Problem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  bool has_interface() const { return spec_.interface.kind != InterfaceKind::None; }
  bool has_exact() const { return spec_.has_exact(); }

  double psi(double x, double y) const;
  Side side(double x, double y) const;
  double a(Side s, double x, double y) const;
  double f(Side s, double x, double y) const;
  double u(Side s, double x, double y) const;
  double u_exact(double x, double y) const { return u(side(x, y), x, y); }

  double theta_at(double x, double y) const;
  double curvature(double x, double y, double theta) const;
  double jump_g(double x, double y, double theta) const;
  double jump_g_gamma(double x, double y, double theta) const;

  BoundaryType boundary_type(int b) const { return spec_.boundary[b].type; }
  double alpha(int b, double x, double y) const;
  double boundary_g(int b, double x, double y) const;

  InterfaceGeometry geometry() const;
  JumpData jumps() const;

 private:
  const SideSpec& side_spec(Side s) const { return s == Side::Plus ? spec_.plus : spec_.minus; }
  Eigen::Vector2d curve(double theta) const;

  ProblemSpec spec_;
};

// Curvature |x'y'' - x''y'| / (x'^2 + y'^2)^{3/2} of a parametric curve.
double curvature_from_derivatives(double xp, double yp, double xpp, double ypp);

struct CurvatureJump {
  double kappa = 0.0, g = 0.0, g_gamma = 0.0;
};
// Curvature and jump data of a parametric problem at parameter theta.
CurvatureJump curvature_jump(const Problem& problem, double theta);

enum class ManufacturedInterface { None, CircleLevelSet, CircleParametric };

// Random piecewise polynomial u of the given degree on (-2,2)^2 with positive
// polynomial coefficients a; all other data derived from u. With robin set,
// the left and bottom sides carry Robin conditions with positive alpha.
ProblemSpec manufacture(std::uint64_t seed, int degree, ManufacturedInterface iface, bool robin = false);

}  // namespace hoif
