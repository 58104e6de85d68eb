#include "hoif/interface.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "hoif/mls.hpp"

namespace hoif {

// ------------------------------------------------------------------ grid

Grid Grid::make(double l1, double l2, double l3, double l4, int J) {
  if (!(l2 > l1) || !(l4 > l3)) throw std::invalid_argument("grid: empty domain");
  if (J < 1 || J > 14) throw std::invalid_argument("grid: J out of range");
  const double ratio = (l4 - l3) / (l2 - l1);
  const long N0 = std::lround(ratio);
  if (N0 < 1 || std::abs(ratio - N0) > 1e-9 * ratio)
    throw std::invalid_argument("grid: l4 - l3 must be an integer multiple of l2 - l1");
  Grid g;
  g.l1 = l1;
  g.l2 = l2;
  g.l3 = l3;
  g.l4 = l4;
  g.J = J;
  g.N1 = 1 << J;
  g.N2 = static_cast<int>(N0) * g.N1;
  g.h = (l2 - l1) / g.N1;
  return g;
}

// ------------------------------------------------------------------ classification

StencilFootprint footprint(const Grid& grid, const ScalarField& psi, int i, int j) {
  StencilFootprint fp;
  for (int k = -1; k <= 1; ++k)
    for (int l = -1; l <= 1; ++l)
      (psi(grid.x(i + k), grid.y(j + l)) > 0.0 ? fp.d_plus : fp.d_minus).push_back({k, l});
  for (Index2 kl : {Index2{-2, 0}, Index2{2, 0}, Index2{0, -2}, Index2{0, 2}})
    (psi(grid.x(i + kl.first), grid.y(j + kl.second)) > 0.0 ? fp.e_plus : fp.e_minus).push_back(kl);
  return fp;
}

Classification classify_grid(const Grid& grid, const InterfaceGeometry& geo) {
  Classification c;
  const int n = grid.size();
  c.label.assign(n, PointLabel::RegularInterior);
  c.plus.assign(n, 1);
  c.straddle.assign(n, 0);
  std::vector<unsigned char> side(n, 1);
  if (geo.present())
    for (int j = 0; j <= grid.N2; ++j)
      for (int i = 0; i <= grid.N1; ++i) side[grid.index(i, j)] = geo.plus(grid.x(i), grid.y(j)) ? 1 : 0;
  c.plus = side;

  for (int j = 0; j <= grid.N2; ++j)
    for (int i = 0; i <= grid.N1; ++i) {
      const int idx = grid.index(i, j);
      const bool bx = (i == 0 || i == grid.N1), by = (j == 0 || j == grid.N2);
      bool mixed = false;
      for (int k = -1; k <= 1; ++k)
        for (int l = -1; l <= 1; ++l)
          if (grid.inside(i + k, j + l) && side[grid.index(i + k, j + l)] != side[idx]) mixed = true;
      if (bx || by) {
        c.label[idx] = (bx && by) ? PointLabel::BoundaryCorner : PointLabel::BoundaryEdge;
        c.straddle[idx] = mixed ? 1 : 0;
        continue;
      }
      if (!mixed) continue;
      c.label[idx] = PointLabel::Irregular;
      ++c.n_irregular;
      if (i < 2 || j < 2 || i > grid.N1 - 2 || j > grid.N2 - 2) {
        std::ostringstream os;
        os << "classification: irregular point (" << grid.x(i) << ", " << grid.y(j)
           << ") has a 13-point footprint outside the grid; refine the grid";
        throw std::invalid_argument(os.str());
      }
    }
  return c;
}

std::array<bool, 13> irregular_sides(const Grid& grid, const ScalarField& psi, int i, int j) {
  std::array<bool, 13> plus{};
  const auto& off = irregular_offsets();
  for (int c = 0; c < 13; ++c) plus[c] = psi(grid.x(i + off[c].first), grid.y(j + off[c].second)) > 0.0;
  return plus;
}

// ------------------------------------------------------------------ curve points

namespace {

double bracket_root(const ScalarField& f1, double a, double fa, double b, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
  std::uintmax_t iters = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve([&](double t) { return f1(t, 0.0); }, a, b, fa, fb, tol, iters);
  return 0.5 * (lo + hi);
}

bool sign_change(double fa, double fb) { return (fa > 0.0) != (fb > 0.0); }

Eigen::Vector2d grad_fd(const ScalarField& psi, const Eigen::Vector2d& p, double h) {
  const double d = h / 64;
  return {(psi(p.x() + d, p.y()) - psi(p.x() - d, p.y())) / (2 * d),
          (psi(p.x(), p.y() + d) - psi(p.x(), p.y() - d)) / (2 * d)};
}

}  // namespace

double solve_on_line(const ScalarField& psi, int axis, double fixed, double guess, double h) {
  auto f = [&](double t) { return axis == 0 ? psi(fixed, t) : psi(t, fixed); };
  const double f0 = f(guess);
  if (f0 == 0.0) return guess;
  const double d = h / 64;
  double ap = guess, fap = f0, am = guess, fam = f0;
  for (int k = 1; k <= 256; ++k) {
    const double bp = guess + k * d, fbp = f(bp);
    if (sign_change(fap, fbp) || fbp == 0.0)
      return bracket_root([&](double t, double) { return f(t); }, ap, fap, bp, fbp);
    const double bm = guess - k * d, fbm = f(bm);
    if (sign_change(fam, fbm) || fbm == 0.0)
      return bracket_root([&](double t, double) { return f(t); }, bm, fbm, am, fam);
    ap = bp;
    fap = fbp;
    am = bm;
    fam = fbm;
  }
  std::ostringstream os;
  os << "interface: no curve point on the line " << (axis == 0 ? "x = " : "y = ") << fixed << " near " << guess;
  throw std::runtime_error(os.str());
}

CurveSampler::CurveSampler(const InterfaceGeometry& geo, double h) : geo_(geo), h_(h) {
  if (!geo_.parametric()) return;
  const double two_pi = 2.0 * M_PI;
  const int probe = 8192;
  double max_chord = 0.0;
  Eigen::Vector2d prev = geo_.curve(0.0);
  for (int k = 1; k <= probe; ++k) {
    Eigen::Vector2d p = geo_.curve(two_pi * k / probe);
    max_chord = std::max(max_chord, (p - prev).norm());
    prev = p;
  }
  const double speed = max_chord * probe / two_pi;
  const int n = std::max(64, static_cast<int>(std::ceil(1.05 * two_pi * speed / (h / 16))));
  theta_.resize(n);
  points_.resize(n);
  for (int k = 0; k < n; ++k) {
    theta_[k] = two_pi * k / n;
    points_[k] = geo_.curve(theta_[k]);
  }
}

BasePoint CurveSampler::project(const Eigen::Vector2d& node) const {
  BasePoint best;
  double dbest = std::numeric_limits<double>::infinity();
  if (geo_.parametric()) {
    for (size_t k = 0; k < points_.size(); ++k) {
      const double d = (points_[k] - node).squaredNorm();
      if (d < dbest) {
        dbest = d;
        best.point = points_[k];
        best.theta = theta_[k];
      }
    }
  } else {
    const ScalarField& psi = geo_.psi;
    const double step = h_ / 16;
    for (int reach : {16, 32}) {
      for (int axis = 0; axis < 2; ++axis)
        for (int a = -reach; a <= reach; ++a) {
          const double fixed = (axis == 0 ? node.x() : node.y()) + a * step;
          const double start = (axis == 0 ? node.y() : node.x());
          auto f = [&](double t, double) { return axis == 0 ? psi(fixed, t) : psi(t, fixed); };
          double tprev = start - reach * step, fprev = f(tprev, 0.0);
          for (int b = -reach + 1; b <= reach; ++b) {
            const double t = start + b * step, ft = f(t, 0.0);
            if (sign_change(fprev, ft) || fprev == 0.0) {
              const double root = bracket_root(f, tprev, fprev, t, ft);
              const Eigen::Vector2d p = axis == 0 ? Eigen::Vector2d(fixed, root) : Eigen::Vector2d(root, fixed);
              const double d = (p - node).squaredNorm();
              if (d < dbest) {
                dbest = d;
                best.point = p;
              }
            }
            tprev = t;
            fprev = ft;
          }
        }
      if (std::isfinite(dbest)) break;
    }
    if (std::isfinite(dbest)) best.theta = geo_.theta_at ? geo_.theta_at(best.point.x(), best.point.y()) : 0.0;
  }
  if (!(std::sqrt(dbest) <= std::sqrt(2.0) * h_ * (1 + 1e-12))) {
    std::ostringstream os;
    os << "interface: no curve point within sqrt(2) h of (" << node.x() << ", " << node.y() << ")";
    throw std::runtime_error(os.str());
  }
  return best;
}

// ------------------------------------------------------------------ curve jets

CurveJet finalize_curve_jet(double t_star, const std::array<double, 6>& r_in, const std::array<double, 6>& s_in,
                            const std::array<double, 6>& g_in, const std::array<double, 5>& gg_in,
                            const Eigen::Vector2d& grad_psi, bool speed_included) {
  std::array<double, 6> r = r_in, s = s_in, g = g_in;
  std::array<double, 5> gg = gg_in;
  const double rs2 = r[1] * r[1] + s[1] * s[1];
  if (!(rs2 > 0.0)) throw std::domain_error("interface: vanishing tangent at the base point");
  if (s[1] * grad_psi.x() - r[1] * grad_psi.y() < 0.0) {
    for (int p = 1; p <= 5; p += 2) {
      r[p] = -r[p];
      s[p] = -s[p];
      g[p] = -g[p];
      if (p <= 4) gg[p] = -gg[p];
    }
  }
  CurveJet c;
  c.t_star = t_star;
  c.r = r;
  c.s = s;
  c.base = {r[0], s[0]};
  for (int p = 0; p <= 5; ++p) c.g[p] = g[p] / factorial(p);
  Series1 dr(4), ds(4), gs(4);
  for (int p = 0; p <= 4; ++p) {
    dr.coef(p) = r[p + 1] / factorial(p);
    ds.coef(p) = s[p + 1] / factorial(p);
    gs.coef(p) = gg[p] / factorial(p);
  }
  const Series1 prod = speed_included ? gs : gs * sqrt(dr * dr + ds * ds);
  for (int p = 0; p <= 4; ++p) c.g_gamma[p] = prod.coef(p);
  return c;
}

CurveJet estimate_curve_jet(const InterfaceGeometry& geo, const JumpData& jumps, const BasePoint& base,
                            const Eigen::Vector2d& node, double h, ChartKind chart) {
  const Eigen::Vector2d grad = grad_fd(geo.psi, base.point, h);
  if (chart == ChartKind::Auto)
    chart = geo.parametric() ? ChartKind::Angle
                             : (std::abs(grad.y()) >= std::abs(grad.x()) ? ChartKind::GraphX : ChartKind::GraphY);
  if (chart == ChartKind::Angle && !geo.parametric())
    throw std::invalid_argument("interface: the angle chart needs a parametric curve");

  const SamplingRecipe rec = sampling_recipe(MlsContext::CurveGraph, h);
  const int K = static_cast<int>(rec.offsets.size());
  std::vector<double> xs(K), ys(K), th(K);
  std::vector<int> order;  // center first, then outward
  order.push_back(K / 2);
  for (int k = 1; k <= K / 2; ++k) {
    order.push_back(K / 2 + k);
    order.push_back(K / 2 - k);
  }
  for (int idx : order) {
    const double t = rec.offsets[idx].x();
    if (chart == ChartKind::Angle) {
      const Eigen::Vector2d p = geo.curve(base.theta + t);
      xs[idx] = p.x();
      ys[idx] = p.y();
      th[idx] = base.theta + t;
      continue;
    }
    const bool gx = chart == ChartKind::GraphX;
    double guess;
    if (idx == K / 2) {
      guess = gx ? base.point.y() : base.point.x();
    } else {
      const int nb = idx > K / 2 ? idx - 1 : idx + 1;
      guess = gx ? ys[nb] : xs[nb];
    }
    if (gx) {
      xs[idx] = base.point.x() + t;
      ys[idx] = idx == K / 2 ? base.point.y() : solve_on_line(geo.psi, 0, xs[idx], guess, h);
    } else {
      ys[idx] = base.point.y() + t;
      xs[idx] = idx == K / 2 ? base.point.x() : solve_on_line(geo.psi, 1, ys[idx], guess, h);
    }
    th[idx] = (idx == K / 2) ? base.theta
                             : (geo.theta_at ? geo.theta_at(xs[idx], ys[idx]) : std::atan2(ys[idx], xs[idx]));
  }

  // With an exact tangent or gradient, g_gamma is sampled times the chart
  // speed; the product stays smooth where the unit normal turns quickly.
  const bool with_speed = chart == ChartKind::Angle ? static_cast<bool>(geo.tangent) : static_cast<bool>(geo.grad);
  std::vector<double> gv(K), ggv(K);
  for (int k = 0; k < K; ++k) {
    gv[k] = jumps.g(xs[k], ys[k], th[k]);
    ggv[k] = jumps.g_gamma(xs[k], ys[k], th[k]);
    if (!with_speed) continue;
    if (chart == ChartKind::Angle) {
      ggv[k] *= geo.tangent(th[k]).norm();
    } else {
      const Eigen::Vector2d gr = geo.grad(xs[k], ys[k]);
      ggv[k] *= gr.norm() / std::abs(chart == ChartKind::GraphX ? gr.y() : gr.x());
    }
  }
  MlsProblem P6;
  P6.dim = 1;
  P6.samples.resize(K);
  for (int k = 0; k < K; ++k) P6.samples[k] = rec.offsets[k];
  P6.degree = rec.degree_a;
  P6.h = h;
  P6.htilde = rec.htilde;
  MlsProblem P5 = P6;
  P5.degree = rec.degree_f;
  MlsOperator op6(P6, all_derivatives_1d(5)), op5(P5, all_derivatives_1d(4));
  auto vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); };
  Eigen::VectorXd er = op6.apply(vec(xs)), es = op6.apply(vec(ys)), eg = op6.apply(vec(gv)),
                  egg = op5.apply(vec(ggv));
  std::array<double, 6> r{}, s{}, g{};
  std::array<double, 5> gg{};
  for (int p = 0; p <= 5; ++p) {
    r[p] = er(p);
    s[p] = es(p);
    g[p] = eg(p);
  }
  for (int p = 0; p <= 4; ++p) gg[p] = egg(p);
  r[0] = base.point.x();
  s[0] = base.point.y();
  CurveJet c = finalize_curve_jet(chart == ChartKind::Angle ? base.theta : 0.0, r, s, g, gg, grad, with_speed);
  c.v0 = (node.x() - base.point.x()) / h;
  c.w0 = (node.y() - base.point.y()) / h;
  return c;
}

// ------------------------------------------------------------------ transmission

namespace {

Poly2 poly_dx(const Poly2& p) {
  Poly2 r(std::max(p.degree() - 1, 0));
  for (int a = 1; a <= p.degree(); ++a)
    for (int b = 0; a + b <= p.degree(); ++b) r.coef(a - 1, b) = a * p.coef(a, b);
  return r;
}

Poly2 poly_dy(const Poly2& p) {
  Poly2 r(std::max(p.degree() - 1, 0));
  for (int a = 0; a <= p.degree(); ++a)
    for (int b = 1; a + b <= p.degree(); ++b) r.coef(a, b - 1) = b * p.coef(a, b);
  return r;
}

struct PowerTable {
  std::vector<Series1> x, y;
  PowerTable(const Series1& X, const Series1& Y, int n) : x(n + 1, Series1(X.order(), 1.0)), y(x) {
    for (int k = 1; k <= n; ++k) {
      x[k] = x[k - 1] * X;
      y[k] = y[k - 1] * Y;
    }
  }
  Series1 compose(const Poly2& p) const {
    Series1 r(x[0].order(), 0.0);
    for (int a = 0; a <= p.degree(); ++a)
      for (int b = 0; a + b <= p.degree(); ++b)
        if (p.coef(a, b) != 0.0) r += (x[a] * y[b]) * p.coef(a, b);
    return r;
  }
};

Taylor2 truncate(const Taylor2& t, int order) {
  Taylor2 r(order);
  for (int p = 0; p <= std::min(order, t.order()); ++p)
    for (int q = 0; p + q <= std::min(order, t.order()); ++q) r.coef(p, q) = t.coef(p, q);
  return r;
}

// Series of a polynomial along the curve and of its conormal flux
// a (P_x Y' - P_y X').
struct SideSeries {
  std::vector<std::array<double, 6>> gu, hf;  // jump coefficients
  std::vector<std::array<double, 5>> gt, ht;  // flux coefficients
};

SideSeries side_series(const GHPolys& gh, const Jet2& a, const PowerTable& pw, const Series1& dX,
                       const Series1& dY) {
  const Series1 as = compose(truncate(a.series(), 4), pw.x[1], pw.y[1]);
  auto fill = [&](const Poly2& P, std::array<double, 6>& val, std::array<double, 5>& flux) {
    Series1 v = pw.compose(P);
    for (int p = 0; p <= 5; ++p) val[p] = v.coef(p);
    Series1 fx = as * (pw.compose(poly_dx(P)) * dY - pw.compose(poly_dy(P)) * dX);
    for (int p = 0; p <= 4; ++p) flux[p] = fx.coef(p);
  };
  SideSeries s;
  s.gu.resize(gh.G.size());
  s.gt.resize(gh.G.size());
  for (size_t b = 0; b < gh.G.size(); ++b) fill(gh.G[b], s.gu[b], s.gt[b]);
  s.hf.resize(gh.H.size());
  s.ht.resize(gh.H.size());
  for (size_t k = 0; k < gh.H.size(); ++k) fill(gh.H[k], s.hf[k], s.ht[k]);
  return s;
}

}  // namespace

InterfaceReduction build_interface_reduction(const Jet2& a_plus, const Jet2& a_minus) {
  InterfaceReduction red;
  red.plus = build_GH_polynomials(build_reduction_table(a_plus, 5));
  red.minus = build_GH_polynomials(build_reduction_table(a_minus, 5));
  red.a_plus = a_plus;
  red.a_minus = a_minus;
  return red;
}

TransmissionTable build_transmission(const CurveJet& c, const InterfaceReduction& red) {
  Series1 X(5, 0.0), Y(5, 0.0);
  for (int p = 1; p <= 5; ++p) {
    X.coef(p) = c.r[p] / factorial(p);
    Y.coef(p) = c.s[p] / factorial(p);
  }
  const PowerTable pw(X, Y, 5);
  const Series1 dX = X.differentiate(), dY = Y.differentiate();
  const SideSeries P = side_series(red.plus, red.a_plus, pw, dX, dY);
  const SideSeries M = side_series(red.minus, red.a_minus, pw, dX, dY);

  using namespace tsym;
  const int nb = kBand;
  auto known_jump = [&](int p) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(count);
    for (int b = 0; b < nb; ++b) v(u0 + b) += P.gu[b][p];
    for (int k = 0; k < kF; ++k) {
      v(fplus0 + k) += P.hf[k][p];
      v(fminus0 + k) -= M.hf[k][p];
    }
    v(g0 + p) -= 1.0;
    return v;
  };
  auto known_flux = [&](int q) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(count);
    for (int b = 0; b < nb; ++b) v(u0 + b) += P.gt[b][q];
    for (int k = 0; k < kF; ++k) {
      v(fplus0 + k) += P.ht[k][q];
      v(fminus0 + k) -= M.ht[k][q];
    }
    v(gg0 + q) -= 1.0;
    return v;
  };

  TransmissionTable T;
  T.T = Eigen::MatrixXd::Zero(nb, count);
  T.T.row(band_index(0, 0)) = known_jump(0);
  const double speed2 = c.r[1] * c.r[1] + c.s[1] * c.s[1];
  for (int p = 1; p <= 5; ++p) {
    const int b0 = band_index(0, p), b1 = band_index(1, p - 1);
    Eigen::RowVectorXd J = known_jump(p), F = known_flux(p - 1);
    for (int b = 0; b < band_index(0, p); ++b) {
      J -= M.gu[b][p] * T.T.row(b);
      F -= M.gt[b][p - 1] * T.T.row(b);
    }
    const double j0 = M.gu[b0][p], j1 = M.gu[b1][p], f0 = M.gt[b0][p - 1], f1 = M.gt[b1][p - 1];
    const double det = j0 * f1 - j1 * f0;
    const double ref = red.a_minus(0, 0) * p * std::pow(speed2, p) / ipow(factorial(p), 2);
    if (!(std::abs(det) > 1e-12 * ref)) throw std::domain_error("interface: singular transmission step");
    T.det[p] = det;
    T.T.row(b0) = (f1 * J - j1 * F) / det;
    T.T.row(b1) = (j0 * F - f0 * J) / det;
  }
  return T;
}

// ------------------------------------------------------------------ 13-point stencil

const std::vector<Index2>& irregular_offsets() {
  static const std::vector<Index2> off = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 0},  {0, 1}, {1, -1},
                                          {1, 0},   {1, 1},  {-2, 0}, {2, 0},  {0, -2}, {0, 2}};
  return off;
}

RecursiveSystem assemble_irregular_system(const std::array<bool, 13>& plus, double v0, double w0,
                                          const InterfaceReduction& red, const TransmissionTable& T) {
  using namespace tsym;
  const int deg = 5;
  std::vector<Poly2> minus_u(kBand, Poly2(deg)), minus_data(data_count, Poly2(deg));
  for (int bp = 0; bp < kBand; ++bp) {
    const Poly2& Gm = red.minus.G[bp];
    for (int r = 0; r < kBand; ++r)
      if (T.T(bp, u0 + r) != 0.0) minus_u[r].axpy(T.T(bp, u0 + r), Gm);
    for (int s = 0; s < data_count; ++s)
      if (T.T(bp, kBand + s) != 0.0) minus_data[s].axpy(T.T(bp, kBand + s), Gm);
  }
  for (int k = 0; k < kF; ++k) minus_data[fminus0 - kBand + k].axpy(1.0, red.minus.H[k]);
  std::vector<Poly2> plus_data(data_count, Poly2(deg));
  for (int k = 0; k < kF; ++k) plus_data[fplus0 - kBand + k] = red.plus.H[k];

  RecursiveSystem sys;
  sys.offsets = irregular_offsets();
  sys.scale = 1;
  for (int j = 0; j < 13; ++j) {
    StencilColumn c;
    c.offset = sys.offsets[j];
    c.v = v0 + c.offset.first;
    c.w = w0 + c.offset.second;
    c.u_forms = plus[j] ? red.plus.G : minus_u;
    c.data_forms = plus[j] ? plus_data : minus_data;
    sys.columns.push_back(std::move(c));
  }
  EngineSpec& sp = sys.spec;
  sp.N = 6;
  sp.D = 4;
  for (const auto& [m, n] : lambda_sets(5).band.members) sp.row_degree.push_back(m + n);
  for (int j = 0; j < 13; ++j) sp.col_offset.push_back(j);
  sp.n_offsets = 13;
  sp.center_offset = 4;
  sp.sum_condition = false;
  sp.policy.resize(5);
  sp.policy[0].fixed = {{4, 1.0}};
  return sys;
}

StencilResult solve_irregular_stencil(const RecursiveSystem& system) {
  StencilResult r = make_stencil(system);
  // C_5 = 0 is implied by the degree-0 row; keep it explicit in the layout.
  r.column_c.conservativeResize(Eigen::NoChange, 6);
  r.column_c.col(5).setZero();
  r.stencil.c.conservativeResize(Eigen::NoChange, 6);
  r.stencil.c.col(5).setZero();
  return r;
}

}  // namespace hoif
