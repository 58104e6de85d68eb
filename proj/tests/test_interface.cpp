#include <cmath>

#include <doctest.h>

#include "hoif/interface.hpp"
#include "hoif/problem.hpp"
#include "support.hpp"

using namespace hoif;
using namespace testsupport;

namespace {

auto ap = [](const auto& x, const auto& y) { return 2.0 + 0.3 * x * y + sin(x); };
auto am = [](const auto& x, const auto& y) { return 10.0 + cos(y); };
auto up = [](const auto& x, const auto& y) { return sin(x + 2.0 * y) + x * x * x; };
auto um = [](const auto& x, const auto& y) { return exp(0.5 * x) * cos(y) + y * y; };
auto circle_x = [](const Series1& t) { return cos(t); };
auto circle_y = [](const Series1& t) { return sin(t); };

ScalarField circle_psi() {
  return [](double x, double y) { return x * x + y * y - 1.0; };
}

// Symbol vector of the transmission layout from exact jets at b.
Eigen::VectorXd symbols(const Eigen::Vector2d& b, const CurveJet& cj) {
  Eigen::VectorXd sym(tsym::count);
  const Jet2 U = jet_of(up, b.x(), b.y(), 6);
  const Jet2 fp = source_jet(ap, up, b.x(), b.y(), 3), fm = source_jet(am, um, b.x(), b.y(), 3);
  for (int k = 0; k < tsym::kBand; ++k) {
    const auto [m, n] = band_member(k);
    sym(k) = U(m, n);
  }
  for (int k = 0; k < tsym::kF; ++k) {
    const auto [i, j] = tri_member(k);
    sym(tsym::fplus0 + k) = fp(i, j);
    sym(tsym::fminus0 + k) = fm(i, j);
  }
  for (int p = 0; p < tsym::kG; ++p) sym(tsym::g0 + p) = cj.g[p];
  for (int p = 0; p < tsym::kGG; ++p) sym(tsym::gg0 + p) = cj.g_gamma[p];
  return sym;
}

InterfaceReduction reduction_at(const Eigen::Vector2d& b) {
  return build_interface_reduction(jet_of(ap, b.x(), b.y(), 4), jet_of(am, b.x(), b.y(), 4));
}

// 13-point stencil on the unit circle at angle theta, node = base + (v0, w0) h.
StencilResult circle_stencil(const CurveJet& cj, const Eigen::Vector2d& b, double v0, double w0, double h) {
  const InterfaceReduction red = reduction_at(b);
  const TransmissionTable T = build_transmission(cj, red);
  std::array<bool, 13> plus{};
  const auto& off = irregular_offsets();
  const ScalarField psi = circle_psi();
  for (int c = 0; c < 13; ++c) plus[c] = psi(b.x() + (v0 + off[c].first) * h, b.y() + (w0 + off[c].second) * h) > 0;
  return solve_irregular_stencil(assemble_irregular_system(plus, v0, w0, red, T));
}

}  // namespace

TEST_CASE("classification of a circle matches a brute-force scan") {
  const Grid g = Grid::make(-2, 2, -2, 2, 4);
  InterfaceGeometry geo;
  geo.psi = circle_psi();
  const Classification cls = classify_grid(g, geo);
  int irregular = 0;
  for (int j = 0; j <= g.N2; ++j)
    for (int i = 0; i <= g.N1; ++i) {
      const PointLabel lab = cls.label[g.index(i, j)];
      const bool edge_i = i == 0 || i == g.N1, edge_j = j == 0 || j == g.N2;
      if (edge_i && edge_j) {
        CHECK(lab == PointLabel::BoundaryCorner);
        continue;
      }
      if (edge_i || edge_j) {
        CHECK(lab == PointLabel::BoundaryEdge);
        continue;
      }
      bool pos = false, nonpos = false;
      for (int k = -1; k <= 1; ++k)
        for (int l = -1; l <= 1; ++l) (geo.psi(g.x(i + k), g.y(j + l)) > 0 ? pos : nonpos) = true;
      const bool irr = pos && nonpos;
      irregular += irr;
      CHECK((lab == PointLabel::Irregular) == irr);
    }
  CHECK(cls.n_irregular == irregular);
  CHECK(irregular > 0);

  InterfaceGeometry none;
  none.psi = [](double, double) { return 1.0; };
  CHECK(classify_grid(g, none).n_irregular == 0);
}

TEST_CASE("footprint membership uses psi <= 0 for the minus side") {
  const Grid g = Grid::make(-2, 2, -2, 2, 3);
  // Node (4,4) is the origin; the line x = 0 passes through the center column.
  const StencilFootprint fp = footprint(g, [](double x, double) { return x; }, 4, 4);
  CHECK(fp.d_plus.size() == 3);
  CHECK(fp.d_minus.size() == 6);
  CHECK(fp.irregular());
  const StencilFootprint all_minus = footprint(g, [](double, double) { return 0.0; }, 4, 4);
  CHECK(all_minus.d_plus.empty());
  CHECK_FALSE(all_minus.irregular());
}

TEST_CASE("base points on a level-set circle") {
  const double h = 4.0 / 64;
  InterfaceGeometry geo;
  geo.psi = circle_psi();
  const CurveSampler cs(geo, h);
  const BasePoint b = cs.project({1.0 + 0.3 * h, 0.0});
  CHECK((b.point - Eigen::Vector2d(1.0, 0.0)).norm() <= h / 16);
  CHECK(std::abs(geo.psi(b.point.x(), b.point.y())) < 1e-12);
  const Eigen::Vector2d on(std::cos(0.3), std::sin(0.3));
  CHECK((cs.project(on).point - on).norm() <= h / 16);
}

TEST_CASE("base points on an ellipse agree with a dense parameter sweep") {
  const Problem P(builtin("ex33"));
  const InterfaceGeometry geo = P.geometry();
  const Grid g = Grid::make(-1.5, 1.5, -1.5, 1.5, 5);
  const CurveSampler cs(geo, g.h);
  const Classification cls = classify_grid(g, geo);
  int checked = 0;
  for (int j = 0; j <= g.N2; ++j)
    for (int i = 0; i <= g.N1; ++i) {
      if (cls.label[g.index(i, j)] != PointLabel::Irregular) continue;
      const Eigen::Vector2d node(g.x(i), g.y(j));
      double best = 1e300;
      Eigen::Vector2d foot;
      for (int k = 0; k < 200000; ++k) {
        const double t = 2 * M_PI * k / 200000;
        const Eigen::Vector2d q(std::cos(t), 0.5 * std::sin(t));
        if ((q - node).norm() < best) {
          best = (q - node).norm();
          foot = q;
        }
      }
      const BasePoint b = cs.project(node);
      CHECK((b.point - foot).norm() <= g.h / 16);
      const CurveJet cj = estimate_curve_jet(geo, P.jumps(), b, node, g.h);
      // The closest point is within sqrt(2) h of an irregular node.
      CHECK(std::hypot(cj.v0, cj.w0) <= std::sqrt(2.0));
      ++checked;
    }
  CHECK(checked > 20);
}

TEST_CASE("transmission table reproduces minus-side derivatives") {
  for (double ts : {0.7, 2.3, 4.1}) {
    const Eigen::Vector2d b(std::cos(ts), std::sin(ts));
    const CurveJet cj = exact_curve_jet(circle_x, circle_y, ts, ap, up, am, um, 2 * b);
    const TransmissionTable T = build_transmission(cj, reduction_at(b));
    const Eigen::VectorXd rec = T.T * symbols(b, cj);
    const Jet2 Um = jet_of(um, b.x(), b.y(), 6);
    for (int k = 0; k < tsym::kBand; ++k) {
      const auto [m, n] = band_member(k);
      CHECK(std::abs(rec(k) - Um(m, n)) <= 1e-8 * std::max(1.0, std::abs(Um(m, n))));
    }
    CHECK(T.u_plus(0, 0, 0, 0) == 1.0);
    for (int k = 1; k < tsym::kBand; ++k) {
      const auto [m, n] = band_member(k);
      CHECK(T.u_plus(m, n, 0, 0) == 0.0);
    }
    // 2x2 determinant of step p: a_-(0,0) p |gamma'|^{2p} / (p!)^2.
    const double speed2 = cj.r[1] * cj.r[1] + cj.s[1] * cj.s[1];
    for (int p = 1; p <= 5; ++p)
      CHECK(std::abs(T.det[p]) ==
            doctest::Approx(am(b.x(), b.y()) * p * std::pow(speed2, p) / std::pow(factorial(p), 2)).epsilon(1e-10));
  }
}

TEST_CASE("smooth solution across the curve satisfies the table identically") {
  auto a = [](const auto& x, const auto& y) { return 3.0 + 0.5 * sin(x * y); };
  auto u = [](const auto& x, const auto& y) { return cos(x - y) + x * y * y; };
  const double ts = 1.1;
  const Eigen::Vector2d b(std::cos(ts), std::sin(ts));
  const CurveJet cj = exact_curve_jet(circle_x, circle_y, ts, a, u, a, u, 2 * b);
  for (double v : cj.g) CHECK(std::abs(v) < 1e-12);
  for (double v : cj.g_gamma) CHECK(std::abs(v) < 1e-11);
  const InterfaceReduction red = build_interface_reduction(jet_of(a, b.x(), b.y(), 4), jet_of(a, b.x(), b.y(), 4));
  const TransmissionTable T = build_transmission(cj, red);
  const Jet2 U = jet_of(u, b.x(), b.y(), 6);
  const Jet2 f = source_jet(a, u, b.x(), b.y(), 3);
  Eigen::VectorXd sym = Eigen::VectorXd::Zero(tsym::count);
  for (int k = 0; k < tsym::kBand; ++k) sym(k) = U(band_member(k).first, band_member(k).second);
  for (int k = 0; k < tsym::kF; ++k) {
    sym(tsym::fplus0 + k) = f(tri_member(k).first, tri_member(k).second);
    sym(tsym::fminus0 + k) = sym(tsym::fplus0 + k);
  }
  const Eigen::VectorXd rec = T.T * sym;
  for (int k = 0; k < tsym::kBand; ++k) CHECK(std::abs(rec(k) - sym(k)) <= 1e-8 * std::max(1.0, std::abs(sym(k))));
  // Same-degree block is the identity when a+ = a-.
  for (int k = 0; k < tsym::kBand; ++k)
    for (int q = 0; q < tsym::kBand; ++q) {
      const auto [m, n] = band_member(q);
      const auto [mp, np] = band_member(k);
      if (m + n != mp + np) continue;
      CHECK(T.u_plus(mp, np, m, n) == doctest::Approx(k == q ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("vertical line interface has the expected flux ratio") {
  const double apl = 3.0, ami = 0.5;
  std::array<double, 6> r{}, s{}, g{};
  std::array<double, 5> gg{};
  s[1] = 1.0;
  const CurveJet cj = finalize_curve_jet(0.0, r, s, g, gg, Eigen::Vector2d(1.0, 0.0));
  const TransmissionTable T =
      build_transmission(cj, build_interface_reduction(Jet2(0, 0, Taylor2(4, apl)), Jet2(0, 0, Taylor2(4, ami))));
  CHECK(T.u_plus(1, 0, 1, 0) == doctest::Approx(apl / ami));
  CHECK(T.u_plus(0, 1, 0, 1) == doctest::Approx(1.0));
  CHECK(std::abs(T.u_plus(1, 0, 0, 1)) < 1e-14);
  CHECK(T.g(0, 0, 0) == doctest::Approx(-1.0));
  CHECK(T.g_gamma(1, 0, 0) == doctest::Approx(-1.0 / ami));
}

TEST_CASE("13-point stencil normalization and structure") {
  const double ts = 0.7, h = 1.0 / 16, v0 = 0.3, w0 = -0.45;
  const Eigen::Vector2d b(std::cos(ts), std::sin(ts));
  const CurveJet cj = exact_curve_jet(circle_x, circle_y, ts, ap, up, am, um, 2 * b);
  const InterfaceReduction red = reduction_at(b);
  const TransmissionTable T = build_transmission(cj, red);
  std::array<bool, 13> plus{};
  const auto& off = irregular_offsets();
  for (int c = 0; c < 13; ++c)
    plus[c] = circle_psi()(b.x() + (v0 + off[c].first) * h, b.y() + (w0 + off[c].second) * h) > 0;
  const RecursiveSystem sys = assemble_irregular_system(plus, v0, w0, red, T);
  const Eigen::MatrixXd A0 = sys.A(0);
  CHECK(A0.rows() == 11);
  CHECK(A0.cols() == 13);
  for (int c = 0; c < 13; ++c) CHECK(A0(0, c) == doctest::Approx(1.0));
  const StencilResult st = solve_irregular_stencil(sys);
  CHECK(st.stencil.coef(0, 0, 0) == 1.0);
  for (int p = 0; p <= st.stencil.D(); ++p) {
    CHECK(std::abs(st.stencil.c.col(p).sum()) < 1e-9 * std::max(1.0, st.stencil.c.col(p).cwiseAbs().maxCoeff()));
    if (p == 5) CHECK(st.stencil.c.col(p).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("13-point scheme is fifth-order consistent with exact jets") {
  const double ts = 0.7, v0 = 0.3, w0 = -0.45;
  const Eigen::Vector2d b(std::cos(ts), std::sin(ts));
  const CurveJet cj = exact_curve_jet(circle_x, circle_y, ts, ap, up, am, um, 2 * b);
  const Eigen::VectorXd sym = symbols(b, cj);
  const auto& off = irregular_offsets();
  std::vector<double> hs, errs;
  for (int e = 3; e <= 6; ++e) {
    const double h = std::pow(2.0, -e);
    const StencilResult st = circle_stencil(cj, b, v0, w0, h);
    double lhs = 0.0;
    for (int c = 0; c < 13; ++c) {
      const double x = b.x() + (v0 + off[c].first) * h, y = b.y() + (w0 + off[c].second) * h;
      const int j = st.stencil.find(off[c].first, off[c].second);
      lhs += st.stencil.eval(j, h) * (circle_psi()(x, y) > 0 ? up(x, y) : um(x, y));
    }
    const double rhs = st.rhs_weights(h).dot(sym.tail(tsym::data_count));
    hs.push_back(h);
    errs.push_back(std::abs(lhs - rhs) / h);
  }
  CHECK(slope(hs, errs) >= 4.8);
}

TEST_CASE("stencil does not depend on the curve parametrization") {
  const double ts = 0.7, h = 1.0 / 32, v0 = 0.2, w0 = 0.35;
  const Eigen::Vector2d b(std::cos(ts), std::sin(ts));
  const CurveJet angle = exact_curve_jet(circle_x, circle_y, ts, ap, up, am, um, 2 * b);
  auto gx = [](const Series1& t) { return t; };
  auto gy = [](const Series1& t) { return sqrt(1.0 - t * t); };
  const CurveJet graph = exact_curve_jet(gx, gy, std::cos(ts), ap, up, am, um, 2 * b);
  const StencilResult s1 = circle_stencil(angle, b, v0, w0, h), s2 = circle_stencil(graph, b, v0, w0, h);
  const double scale = s1.stencil.c.cwiseAbs().maxCoeff();
  CHECK((s1.stencil.c - s2.stencil.c).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  const Eigen::VectorXd sym1 = symbols(b, angle), sym2 = symbols(b, graph);
  const double r1 = s1.rhs_weights(h).dot(sym1.tail(tsym::data_count));
  const double r2 = s2.rhs_weights(h).dot(sym2.tail(tsym::data_count));
  CHECK(std::abs(r1 - r2) <= 1e-8 * std::max(1.0, std::abs(r1)));
}

TEST_CASE("vanishing tangent is rejected") {
  std::array<double, 6> r{}, s{}, g{};
  std::array<double, 5> gg{};
  CHECK_THROWS_AS(finalize_curve_jet(0.0, r, s, g, gg, Eigen::Vector2d(1.0, 0.0)), std::domain_error);
}
