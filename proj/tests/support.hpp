#pragma once

// Exact jets by truncated Taylor arithmetic, shared by unit and acceptance tests.

#include <array>
#include <cmath>
#include <vector>

#include "hoif/interface.hpp"
#include "hoif/multiindex.hpp"
#include "hoif/taylor.hpp"

namespace testsupport {

using hoif::Jet2;
using hoif::Series1;
using hoif::Taylor2;

template <class F>
Jet2 jet_of(F&& f, double x0, double y0, int order) {
  Taylor2 X = Taylor2::variable(order, 0, x0), Y = Taylor2::variable(order, 1, y0);
  return Jet2(x0, y0, f(X, Y));
}

// f^{(m,n)} for (m,n) in Lambda_order, triangular order.
template <class F>
std::vector<double> derivs_of(F&& f, double x0, double y0, int order) {
  Jet2 j = jet_of(f, x0, y0, order);
  std::vector<double> d(hoif::tri_size(order));
  for (int t = 0; t <= order; ++t)
    for (int m = 0; m <= t; ++m) d[hoif::tri_index(m, t - m)] = j(m, t - m);
  return d;
}

// Jet of f = -div(a grad u) at (x0, y0), of the given order.
template <class A, class U>
Jet2 source_jet(A&& a, U&& u, double x0, double y0, int order) {
  const int O = order + 2;
  Taylor2 X = Taylor2::variable(O, 0, x0), Y = Taylor2::variable(O, 1, y0);
  Taylor2 Uu = u(X, Y), Aa = a(X, Y);
  Taylor2 f = (Aa * Uu.differentiate(0)).differentiate(0) + (Aa * Uu.differentiate(1)).differentiate(1);
  Taylor2 out(order);
  for (int p = 0; p <= order; ++p)
    for (int q = 0; p + q <= order; ++q) out.coef(p, q) = -f.coef(p, q);
  return Jet2(x0, y0, out);
}

// Curve jet of a parametric curve (cx(t), cy(t)) at t*, with jump data
// g = u+ - u- and g_gamma = (a+ grad u+ - a- grad u-) . n along the curve,
// n the unit normal (s', -r')/|gamma'| oriented towards psi > 0 (grad_psi).
template <class CX, class CY, class AP, class UP, class AM, class UM>
hoif::CurveJet exact_curve_jet(CX&& cx, CY&& cy, double tstar, AP&& ap, UP&& up, AM&& am, UM&& um,
                               const Eigen::Vector2d& grad_psi, double gshift = 0.0, double ggshift = 0.0) {
  const int P = 7;
  Series1 t = Series1::variable(P, tstar);
  Series1 X = cx(t), Y = cy(t);
  const double x0 = X.value(), y0 = Y.value();
  Series1 dX = X, dY = Y;
  dX.coef(0) = 0.0;
  dY.coef(0) = 0.0;
  auto along = [&](const Taylor2& f) { return hoif::compose(f, dX, dY); };
  const int O = P + 1;
  Taylor2 Xs = Taylor2::variable(O, 0, x0), Ys = Taylor2::variable(O, 1, y0);
  Taylor2 Up = up(Xs, Ys), Um = um(Xs, Ys), Ap = ap(Xs, Ys), Am = am(Xs, Ys);
  Series1 g = along(Up - Um) + gshift;
  Series1 rp = X.differentiate(), sp = Y.differentiate();
  Series1 speed = sqrt(rp * rp + sp * sp);
  Series1 flux = along(Ap * Up.differentiate(0) - Am * Um.differentiate(0)) * sp -
                 along(Ap * Up.differentiate(1) - Am * Um.differentiate(1)) * rp;
  double sign = (sp.value() * grad_psi.x() - rp.value() * grad_psi.y()) >= 0 ? 1.0 : -1.0;
  Series1 gg = flux * sign / speed + ggshift;
  std::array<double, 6> r{}, s{}, gd{};
  std::array<double, 5> ggd{};
  for (int p = 0; p <= 5; ++p) {
    r[p] = X.derivative(p);
    s[p] = Y.derivative(p);
    gd[p] = g.derivative(p);
  }
  for (int p = 0; p <= 4; ++p) ggd[p] = gg.derivative(p);
  return hoif::finalize_curve_jet(tstar, r, s, gd, ggd, grad_psi);
}

inline double slope(const std::vector<double>& hs, const std::vector<double>& errs) {
  const int n = static_cast<int>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(hs[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
