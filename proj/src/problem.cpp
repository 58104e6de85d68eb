#include "hoif/problem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hoif/dual.hpp"

namespace hoif {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Dual2 eval_xy(const Expr& e, double x, double y) {
  return e.eval<Dual2>(Vars<Dual2>{Dual2::variable(0, x), Dual2::variable(1, y), Dual2(0.0), Dual2(0.0)});
}

// Value, first and second derivative in theta.
Dual2 eval_theta(const Expr& e, double theta) {
  return e.eval<Dual2>(Vars<Dual2>{Dual2(0.0), Dual2(0.0), Dual2::variable(0, theta), Dual2(0.0)});
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0.0 ? t + kTwoPi : t;
}

const char* kind_name(InterfaceKind k) {
  switch (k) {
    case InterfaceKind::None: return "none";
    case InterfaceKind::LevelSet: return "levelset";
    case InterfaceKind::Parametric: return "parametric";
  }
  return "none";
}

const char* const kSideNames[4] = {"left", "right", "bottom", "top"};

}  // namespace

bool ProblemSpec::has_exact() const {
  if (!plus.u) return false;
  return interface.kind == InterfaceKind::None || minus.u.has_value();
}

void ProblemSpec::validate() const {
  if (!(domain[1] > domain[0]) || !(domain[3] > domain[2])) throw std::invalid_argument(name + ": empty domain");
  const bool iface = interface.kind != InterfaceKind::None;
  auto need_u = [&](const std::string& what) {
    if (!has_exact()) throw std::invalid_argument(name + ": '" + what + "' is auto but no exact solution is given");
  };
  if (plus.a.is_auto() || minus.a.is_auto()) throw std::invalid_argument(name + ": coefficient a cannot be auto");
  if (plus.f.is_auto()) need_u("plus.f");
  if (iface) {
    if (interface.psi.is_auto()) throw std::invalid_argument(name + ": interface psi is required");
    if (interface.kind == InterfaceKind::Parametric && (interface.x.is_auto() || interface.y.is_auto()))
      throw std::invalid_argument(name + ": parametric interface needs x(theta) and y(theta)");
    if (minus.f.is_auto()) need_u("minus.f");
    if (g.is_auto()) need_u("jump.g");
    if (g_gamma.is_auto()) need_u("jump.g_gamma");
  }
  for (int b = 0; b < 4; ++b) {
    if (boundary[b].g.is_auto()) need_u(std::string("boundary.") + kSideNames[b] + ".g");
    if (boundary[b].type == BoundaryType::Robin && boundary[b].alpha.is_auto())
      throw std::invalid_argument(name + ": Robin alpha cannot be auto");
  }
}

// ---------------------------------------------------------------- builtins

std::vector<std::string> builtin_names() { return {"ex31", "ex32", "ex33", "ex34"}; }

ProblemSpec builtin(const std::string& name) {
  auto E = [](const char* s) { return Expr::parse(s); };
  auto robin = [&](const char* alpha, const char* g) {
    return BoundarySpec{BoundaryType::Robin, E(alpha), E(g)};
  };
  auto dirichlet = [&](const char* g) { return BoundarySpec{BoundaryType::Dirichlet, Expr::constant(0.0), E(g)}; };
  auto star = [&](ProblemSpec& p, const char* k) {
    const std::string r = std::string("(pi/3+0.4*sin(") + k + "*theta))";
    const std::string rp = std::string("(pi/3+0.4*sin(") + k + "*atan2(y,x)))";
    p.interface.kind = InterfaceKind::Parametric;
    p.interface.x = E((r + "*cos(theta)").c_str());
    p.interface.y = E((r + "*sin(theta)").c_str());
    p.interface.psi = E(("x^2+y^2-" + rp + "^2").c_str());
  };

  ProblemSpec p;
  p.name = name;
  if (name == "ex31") {
    p.domain = {-2.5, 2.5, -2.5, 2.5};
    p.interface.kind = InterfaceKind::LevelSet;
    p.interface.psi = E("x^4+2*y^4-2");
    p.plus = {E("2+sin(x)*sin(y)"), E("auto"), E("sin(2*x)*sin(2*y)*(x^4+2*y^4-2)+1")};
    p.minus = {E("1000*(2+sin(x)*sin(y))"), E("auto"), E("0.001*sin(2*x)*sin(2*y)*(x^4+2*y^4-2)+31")};
    p.g = E("-30");
    p.g_gamma = E("0");
    p.boundary = {robin("cos(y)+2", "auto"), dirichlet("auto"), robin("sin(x)+2", "auto"), dirichlet("auto")};
  } else if (name == "ex32") {
    p.domain = {-2.0, 2.0, -2.0, 2.0};
    star(p, "8");
    p.plus = {E("1"), E("cos(x)"), E("cos(x)")};
    p.minus = {E("0.001"), E("9*pi^2*sin(3*pi*y)"), E("1000*sin(3*pi*y)+1500")};
    p.g = E("auto");
    p.g_gamma = E("auto");
    p.boundary = {dirichlet("auto"), dirichlet("auto"), dirichlet("auto"), dirichlet("auto")};
  } else if (name == "ex33") {
    p.domain = {-1.5, 1.5, -1.5, 1.5};
    p.interface.kind = InterfaceKind::Parametric;
    p.interface.x = E("cos(theta)");
    p.interface.y = E("0.5*sin(theta)");
    p.interface.psi = E("x^2+4*y^2-1");
    p.plus = {E("2+sin(x+y)"), E("cos(pi*x)*cos(pi*y)"), std::nullopt};
    p.minus = {E("10000*(2+sin(x+y))"), E("sin(pi*(x-y))"), std::nullopt};
    p.g = E("kappa-1");
    p.g_gamma = E("kappa");
    p.boundary = {robin("cos(y)+2", "sin(2*pi*y)"), dirichlet("0"), robin("sin(x)+2", "cos(pi*x)"), dirichlet("0")};
  } else if (name == "ex34") {
    p.domain = {-2.0, 2.0, -2.0, 2.0};
    star(p, "10");
    p.plus = {E("1000*(2+cos(x)*cos(y))"), E("sin(pi*x)*sin(pi*y)"), std::nullopt};
    p.minus = {E("2+cos(x)*cos(y)"), E("cos(pi*x)*cos(pi*y)"), std::nullopt};
    p.g = E("-sin(theta)-1");
    p.g_gamma = E("cos(theta)");
    p.boundary = {dirichlet("0"), dirichlet("0"), dirichlet("0"), dirichlet("0")};
  } else {
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
  }
  return p;
}

// ---------------------------------------------------------------- JSON

namespace {

using nlohmann::json;

Expr expr_from(const json& j) {
  if (j.is_string()) return Expr::parse(j.get<std::string>());
  if (j.is_number()) return Expr::constant(j.get<double>());
  throw std::invalid_argument("expected an expression string or number, got " + j.dump());
}

json side_to_json(const SideSpec& s) {
  json j = {{"a", s.a.source()}, {"f", s.f.source()}};
  if (s.u) j["u"] = s.u->source();
  return j;
}

SideSpec side_from_json(const json& j) {
  SideSpec s;
  s.a = expr_from(j.at("a"));
  s.f = j.contains("f") ? expr_from(j.at("f")) : Expr::parse("auto");
  if (j.contains("u")) s.u = expr_from(j.at("u"));
  return s;
}

}  // namespace

std::string problem_to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["domain"] = {spec.domain[0], spec.domain[1], spec.domain[2], spec.domain[3]};
  json iface = {{"kind", kind_name(spec.interface.kind)}};
  if (spec.interface.kind != InterfaceKind::None) iface["psi"] = spec.interface.psi.source();
  if (spec.interface.kind == InterfaceKind::Parametric) {
    iface["x"] = spec.interface.x.source();
    iface["y"] = spec.interface.y.source();
  }
  j["interface"] = iface;
  j["plus"] = side_to_json(spec.plus);
  j["minus"] = side_to_json(spec.minus);
  j["jump"] = {{"g", spec.g.source()}, {"g_gamma", spec.g_gamma.source()}};
  json bnd = json::object();
  for (int b = 0; b < 4; ++b) {
    const BoundarySpec& bs = spec.boundary[b];
    json e = {{"type", bs.type == BoundaryType::Robin ? "robin" : "dirichlet"}, {"g", bs.g.source()}};
    if (bs.type == BoundaryType::Robin) e["alpha"] = bs.alpha.source();
    bnd[kSideNames[b]] = e;
  }
  j["boundary"] = bnd;
  return j.dump(2);
}

ProblemSpec problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("problem configuration: ") + e.what());
  }
  try {
    ProblemSpec p;
    p.name = j.value("name", std::string("custom"));
    const json& d = j.at("domain");
    if (!d.is_array() || d.size() != 4) throw std::invalid_argument("domain must be [l1, l2, l3, l4]");
    for (int k = 0; k < 4; ++k) p.domain[k] = d[k].get<double>();

    const json iface = j.value("interface", json{{"kind", "none"}});
    const std::string kind = iface.value("kind", std::string("none"));
    if (kind == "none") {
      p.interface.kind = InterfaceKind::None;
    } else if (kind == "levelset") {
      p.interface.kind = InterfaceKind::LevelSet;
      p.interface.psi = expr_from(iface.at("psi"));
    } else if (kind == "parametric") {
      p.interface.kind = InterfaceKind::Parametric;
      p.interface.psi = expr_from(iface.at("psi"));
      p.interface.x = expr_from(iface.at("x"));
      p.interface.y = expr_from(iface.at("y"));
    } else {
      throw std::invalid_argument("unknown interface kind '" + kind + "'");
    }

    p.plus = side_from_json(j.at("plus"));
    p.minus = j.contains("minus") ? side_from_json(j.at("minus")) : p.plus;
    if (j.contains("jump")) {
      const json& jj = j.at("jump");
      p.g = jj.contains("g") ? expr_from(jj.at("g")) : Expr::constant(0.0);
      p.g_gamma = jj.contains("g_gamma") ? expr_from(jj.at("g_gamma")) : Expr::constant(0.0);
    }
    const json& bnd = j.at("boundary");
    for (int b = 0; b < 4; ++b) {
      const json& e = bnd.at(kSideNames[b]);
      BoundarySpec& bs = p.boundary[b];
      const std::string type = e.value("type", std::string("dirichlet"));
      if (type == "robin") {
        bs.type = BoundaryType::Robin;
        bs.alpha = expr_from(e.at("alpha"));
      } else if (type == "dirichlet") {
        bs.type = BoundaryType::Dirichlet;
      } else {
        throw std::invalid_argument("unknown boundary type '" + type + "'");
      }
      bs.g = e.contains("g") ? expr_from(e.at("g")) : Expr::parse("auto");
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("problem configuration: ") + e.what());
  }
}

ProblemSpec load_problem(const std::string& name_or_path) {
  for (const auto& n : builtin_names())
    if (n == name_or_path) return builtin(n);
  std::ifstream in(name_or_path);
  if (!in) throw std::invalid_argument("'" + name_or_path + "' is neither a builtin problem nor a readable file");
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

// ---------------------------------------------------------------- evaluation

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double Problem::psi(double x, double y) const {
  return has_interface() ? spec_.interface.psi(x, y) : -1.0;
}

Side Problem::side(double x, double y) const { return psi(x, y) > 0.0 ? Side::Plus : Side::Minus; }

double Problem::a(Side s, double x, double y) const { return side_spec(s).a(x, y); }

double Problem::u(Side s, double x, double y) const {
  const SideSpec& ss = side_spec(s);
  if (!ss.u) throw std::logic_error(spec_.name + ": no exact solution");
  return (*ss.u)(x, y);
}

double Problem::f(Side s, double x, double y) const {
  const SideSpec& ss = side_spec(s);
  if (!ss.f.is_auto()) return ss.f(x, y);
  const Dual2 A = eval_xy(ss.a, x, y), U = eval_xy(*ss.u, x, y);
  return -(A.v * (U.xx + U.yy) + A.x * U.x + A.y * U.y);
}

Eigen::Vector2d Problem::curve(double theta) const {
  return {spec_.interface.x(0.0, 0.0, theta), spec_.interface.y(0.0, 0.0, theta)};
}

double Problem::theta_at(double x, double y) const {
  if (spec_.interface.kind != InterfaceKind::Parametric) return wrap_angle(std::atan2(y, x));
  // Closest parameter: coarse scan, then Newton on the squared distance.
  const int n = 1440;
  double best = 0.0, best_d = INFINITY;
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    const double d = (curve(t) - Eigen::Vector2d(x, y)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  double t = best;
  for (int it = 0; it < 50; ++it) {
    const Dual2 X = eval_theta(spec_.interface.x, t), Y = eval_theta(spec_.interface.y, t);
    const double dx = X.v - x, dy = Y.v - y;
    const double d1 = dx * X.x + dy * Y.x;
    const double d2 = X.x * X.x + Y.x * Y.x + dx * X.xx + dy * Y.xx;
    if (d2 <= 0.0) break;
    const double step = d1 / d2;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return wrap_angle(t);
}

double curvature_from_derivatives(double xp, double yp, double xpp, double ypp) {
  const double sp2 = xp * xp + yp * yp;
  if (!(sp2 > 0.0)) throw std::domain_error("curvature: degenerate tangent");
  return std::abs(xp * ypp - xpp * yp) / std::pow(sp2, 1.5);
}

double Problem::curvature(double x, double y, double theta) const {
  if (spec_.interface.kind == InterfaceKind::Parametric) {
    const Dual2 X = eval_theta(spec_.interface.x, theta), Y = eval_theta(spec_.interface.y, theta);
    return curvature_from_derivatives(X.x, Y.x, X.xx, Y.xx);
  }
  const Dual2 P = eval_xy(spec_.interface.psi, x, y);
  const double g2 = P.x * P.x + P.y * P.y;
  if (!(g2 > 0.0)) throw std::domain_error("curvature: vanishing level-set gradient");
  return std::abs(P.xx * P.y * P.y - 2.0 * P.xy * P.x * P.y + P.yy * P.x * P.x) / std::pow(g2, 1.5);
}

double Problem::jump_g(double x, double y, double theta) const {
  const Expr& e = spec_.g;
  if (e.is_auto()) return u(Side::Plus, x, y) - u(Side::Minus, x, y);
  const double k = e.uses(Var::Kappa) ? curvature(x, y, theta) : 0.0;
  return e(x, y, theta, k);
}

double Problem::jump_g_gamma(double x, double y, double theta) const {
  const Expr& e = spec_.g_gamma;
  if (e.is_auto()) {
    const Dual2 P = eval_xy(spec_.interface.psi, x, y);
    const Dual2 Ap = eval_xy(spec_.plus.a, x, y), Up = eval_xy(*spec_.plus.u, x, y);
    const Dual2 Am = eval_xy(spec_.minus.a, x, y), Um = eval_xy(*spec_.minus.u, x, y);
    const double fx = Ap.v * Up.x - Am.v * Um.x, fy = Ap.v * Up.y - Am.v * Um.y;
    return (fx * P.x + fy * P.y) / std::hypot(P.x, P.y);
  }
  const double k = e.uses(Var::Kappa) ? curvature(x, y, theta) : 0.0;
  return e(x, y, theta, k);
}

double Problem::alpha(int b, double x, double y) const { return spec_.boundary[b].alpha(x, y); }

double Problem::boundary_g(int b, double x, double y) const {
  const BoundarySpec& bs = spec_.boundary[b];
  if (!bs.g.is_auto()) return bs.g(x, y);
  const Side s = side(x, y);
  if (bs.type == BoundaryType::Dirichlet) return u(s, x, y);
  const Dual2 U = eval_xy(*side_spec(s).u, x, y);
  double dn = 0.0;
  switch (b) {
    case kLeft: dn = -U.x; break;
    case kRight: dn = U.x; break;
    case kBottom: dn = -U.y; break;
    default: dn = U.y; break;
  }
  return dn + alpha(b, x, y) * U.v;
}

InterfaceGeometry Problem::geometry() const {
  InterfaceGeometry geo;
  if (!has_interface()) return geo;
  const Expr psi_e = spec_.interface.psi;
  geo.psi = [psi_e](double x, double y) { return psi_e(x, y); };
  geo.grad = [psi_e](double x, double y) {
    const Dual2 P = eval_xy(psi_e, x, y);
    return Eigen::Vector2d(P.x, P.y);
  };
  const Problem self = *this;
  geo.theta_at = [self](double x, double y) { return self.theta_at(x, y); };
  if (spec_.interface.kind == InterfaceKind::Parametric) {
    const Expr xe = spec_.interface.x, ye = spec_.interface.y;
    geo.curve = [xe, ye](double t) { return Eigen::Vector2d(xe(0.0, 0.0, t), ye(0.0, 0.0, t)); };
    geo.tangent = [xe, ye](double t) { return Eigen::Vector2d(eval_theta(xe, t).x, eval_theta(ye, t).x); };
  }
  return geo;
}

JumpData Problem::jumps() const {
  const Problem self = *this;
  return {[self](double x, double y, double t) { return self.jump_g(x, y, t); },
          [self](double x, double y, double t) { return self.jump_g_gamma(x, y, t); }};
}

CurvatureJump curvature_jump(const Problem& problem, double theta) {
  if (problem.spec().interface.kind != InterfaceKind::Parametric)
    throw std::invalid_argument("curvature_jump: parametric interface required");
  const auto& itf = problem.spec().interface;
  const double x = itf.x(0.0, 0.0, theta), y = itf.y(0.0, 0.0, theta);
  CurvatureJump out;
  out.kappa = problem.curvature(x, y, theta);
  out.g = problem.jump_g(x, y, theta);
  out.g_gamma = problem.jump_g_gamma(x, y, theta);
  return out;
}

// ---------------------------------------------------------------- manufactured

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string("(") + buf + ")";
}

std::string random_poly(std::mt19937_64& rng, int degree, double scale) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::string s = num(scale * coef(rng));
  for (int t = 1; t <= degree; ++t)
    for (int m = 0; m <= t; ++m) {
      const double c = scale * coef(rng) / std::tgamma(t + 1.0);
      s += "+" + num(c) + "*x^" + std::to_string(m) + "*y^" + std::to_string(t - m);
    }
  return s;
}

// 1 + c0 + small linear and quadratic terms; positive on (-2.5,2.5)^2.
std::string random_coefficient(std::mt19937_64& rng, double magnitude) {
  std::uniform_real_distribution<double> c(0.0, 1.0), l(-0.1, 0.1);
  return num(magnitude) + "*(" + num(1.0 + c(rng)) + "+" + num(l(rng)) + "*x+" + num(l(rng)) + "*y+" +
         num(std::abs(l(rng))) + "*x^2+" + num(std::abs(l(rng))) + "*y^2)";
}

}  // namespace

ProblemSpec manufacture(std::uint64_t seed, int degree, ManufacturedInterface iface, bool robin) {
  if (degree < 0 || degree > 7) throw std::invalid_argument("manufacture: degree must be in 0..7");
  std::mt19937_64 rng(seed);
  ProblemSpec p;
  p.name = "manufactured-" + std::to_string(seed);
  p.domain = {-2.0, 2.0, -2.0, 2.0};
  p.plus.a = Expr::parse(random_coefficient(rng, 1.0));
  p.plus.u = Expr::parse(random_poly(rng, degree, 1.0));
  if (iface == ManufacturedInterface::None) {
    p.minus = p.plus;
  } else {
    p.minus.a = Expr::parse(random_coefficient(rng, 10.0));
    p.minus.u = Expr::parse(random_poly(rng, degree, 1.0));
    p.interface.psi = Expr::parse("x^2+y^2-1");
    if (iface == ManufacturedInterface::CircleLevelSet) {
      p.interface.kind = InterfaceKind::LevelSet;
    } else {
      p.interface.kind = InterfaceKind::Parametric;
      p.interface.x = Expr::parse("cos(theta)");
      p.interface.y = Expr::parse("sin(theta)");
    }
    p.g = Expr::parse("auto");
    p.g_gamma = Expr::parse("auto");
  }
  for (int b = 0; b < 4; ++b) {
    p.boundary[b] = BoundarySpec{};
    if (robin && (b == kLeft || b == kBottom)) {
      p.boundary[b].type = BoundaryType::Robin;
      p.boundary[b].alpha = Expr::parse(b == kLeft ? "cos(y)+2" : "sin(x)+2");
    }
  }
  p.validate();
  return p;
}

}  // namespace hoif
