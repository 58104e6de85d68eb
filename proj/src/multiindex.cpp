#include "hoif/multiindex.hpp"

#include <stdexcept>
#include <string>

namespace hoif {

LambdaSets lambda_sets(int order) {
  if (order < 0) throw std::invalid_argument("lambda_sets: negative order");
  LambdaSets s;
  s.full = {order, SetKind::Full, {}};
  s.band = {order, SetKind::Band, {}};
  s.complement = {order, SetKind::Complement, {}};
  for (int t = 0; t <= order; ++t)
    for (int m = 0; m <= t; ++m) {
      Index2 mn{m, t - m};
      s.full.members.push_back(mn);
      (m <= 1 ? s.band : s.complement).members.push_back(mn);
    }
  return s;
}

// ------------------------------------------------------------------ Jet2

Jet2 Jet2::from_derivatives(double x0, double y0, int order, const std::vector<double>& derivs) {
  if (static_cast<int>(derivs.size()) < tri_size(order))
    throw std::invalid_argument("Jet2: derivative table shorter than its order");
  Taylor2 s(order);
  for (int t = 0; t <= order; ++t)
    for (int m = 0; m <= t; ++m)
      s.coef(m, t - m) = derivs[tri_index(m, t - m)] / (factorial(m) * factorial(t - m));
  return Jet2(x0, y0, std::move(s));
}

double Jet2::operator()(int m, int n) const {
  if (m < 0 || n < 0 || m + n > order())
    throw std::out_of_range("Jet2: derivative (" + std::to_string(m) + "," + std::to_string(n) +
                            ") beyond jet order " + std::to_string(order()));
  return s_.derivative(m, n);
}

Jet2 Jet2::transposed() const {
  Taylor2 t(order());
  for (int p = 0; p <= order(); ++p)
    for (int q = 0; p + q <= order(); ++q) t.coef(p, q) = s_.coef(q, p);
  return Jet2(y0_, x0_, std::move(t));
}

// ------------------------------------------------------------------ Poly2

double Poly2::operator()(double x, double y) const {
  double r = 0.0;
  for (int t = degree_; t >= 0; --t) r += homogeneous(t, x, y);
  return r;
}

double Poly2::homogeneous(int t, double x, double y) const {
  if (t > degree_ || t < 0) return 0.0;
  double r = 0.0;
  const int base = t * (t + 1) / 2;
  // sum_m c[m,t-m] x^m y^(t-m)
  double xp = 1.0;
  for (int m = 0; m <= t; ++m) {
    double c = c_[base + m];
    if (c != 0.0) r += c * xp * ipow(y, t - m);
    xp *= x;
  }
  return r;
}

Poly2 Poly2::swapped() const {
  Poly2 r(degree_);
  for (int p = 0; p <= degree_; ++p)
    for (int q = 0; p + q <= degree_; ++q) r.coef(p, q) = coef(q, p);
  return r;
}

Poly2& Poly2::operator+=(const Poly2& o) { return axpy(1.0, o); }

Poly2& Poly2::axpy(double s, const Poly2& o) {
  if (o.degree_ > degree_) {
    Poly2 r(o.degree_);
    for (int p = 0; p <= degree_; ++p)
      for (int q = 0; p + q <= degree_; ++q) r.coef(p, q) = coef(p, q);
    *this = std::move(r);
  }
  for (int p = 0; p <= o.degree_; ++p)
    for (int q = 0; p + q <= o.degree_; ++q) coef(p, q) += s * o.coef(p, q);
  return *this;
}

// -------------------------------------------------------- reduction table

double ReductionTable::au(int p, int q, int m, int n) const {
  if (transposed) {
    std::swap(p, q);
    std::swap(m, n);
  }
  if (m < 0 || m > 1 || n < 0 || m + n > K || p + q > K) return 0.0;
  return u(tri_index(p, q), band_index(m, n));
}

double ReductionTable::af(int p, int q, int i, int j) const {
  if (transposed) {
    std::swap(p, q);
    std::swap(i, j);
  }
  if (i < 0 || j < 0 || i + j > K - 2 || p + q > K) return 0.0;
  return f(tri_index(p, q), tri_index(i, j));
}

ReductionTable build_reduction_table(const Jet2& a, int K) {
  if (K < 0) throw std::invalid_argument("build_reduction_table: negative order");
  if (!(a.series().value() > 0.0))
    throw std::domain_error("build_reduction_table: coefficient a must be positive at the base point");
  if (K >= 2 && a.order() < K - 1)
    throw std::invalid_argument("build_reduction_table: a-jet order " + std::to_string(a.order()) +
                                " insufficient for K=" + std::to_string(K));

  ReductionTable T;
  T.K = K;
  const int nb = band_size(K);
  const int nf = K >= 2 ? tri_size(K - 2) : 0;
  T.u = Eigen::MatrixXd::Zero(tri_size(K), nb);
  T.f = Eigen::MatrixXd::Zero(tri_size(K), nf);
  for (int b = 0; b < nb; ++b) {
    auto [m, n] = band_member(b);
    T.u(tri_index(m, n), b) = 1.0;
  }
  if (K < 2) return T;

  // Ratio jets 1/a, a_x/a, a_y/a truncated at order K-2, as derivative tables.
  Taylor2 as = a.series();
  if (as.order() > K - 1) {
    Taylor2 cut(K - 1);
    for (int p = 0; p <= K - 1; ++p)
      for (int q = 0; p + q <= K - 1; ++q) cut.coef(p, q) = as.coef(p, q);
    as = cut;
  }
  Taylor2 ainv = 1.0 / as;
  Taylor2 rx = as.differentiate(0) / as;
  Taylor2 ry = as.differentiate(1) / as;
  auto d = [](const Taylor2& s, int i, int j) { return s.derivative(i, j); };

  // u^{(m+2,n)} = -u^{(m,n+2)} - d^{m,n}[ f/a + (a_x/a) u_x + (a_y/a) u_y ]
  for (int p = 2; p <= K; ++p)
    for (int q = 0; p + q <= K; ++q) {
      const int m = p - 2, n = q;
      const int row = tri_index(p, q);
      T.u.row(row) = -T.u.row(tri_index(m, n + 2));
      T.f.row(row) = -T.f.row(tri_index(m, n + 2));
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) {
          const double bc = binomial(m, i) * binomial(n, j);
          T.f(row, tri_index(i, j)) -= bc * d(ainv, m - i, n - j);
          const double cx = bc * d(rx, m - i, n - j);
          const double cy = bc * d(ry, m - i, n - j);
          T.u.row(row) -= cx * T.u.row(tri_index(i + 1, j)) + cy * T.u.row(tri_index(i, j + 1));
          T.f.row(row) -= cx * T.f.row(tri_index(i + 1, j)) + cy * T.f.row(tri_index(i, j + 1));
        }
    }
  return T;
}

ReductionTable transpose_reduction_table(const Jet2& a, int K) {
  ReductionTable T = build_reduction_table(a.transposed(), K);
  T.transposed = true;
  return T;
}

GHPolys build_GH_polynomials(const ReductionTable& T) {
  const int K = T.K;
  const int nb = static_cast<int>(T.u.cols());
  const int nf = static_cast<int>(T.f.cols());
  GHPolys gh;
  gh.K = K;
  gh.transposed = T.transposed;
  gh.G.assign(nb, Poly2(K));
  std::vector<Poly2> H(nf, Poly2(K));
  for (int p = 0; p <= K; ++p)
    for (int q = 0; p + q <= K; ++q) {
      const double w = 1.0 / (factorial(p) * factorial(q));
      const int row = tri_index(p, q);
      for (int b = 0; b < nb; ++b) gh.G[b].coef(p, q) = T.u(row, b) * w;
      for (int s = 0; s < nf; ++s) H[s].coef(p, q) = T.f(row, s) * w;
    }
  if (!T.transposed) {
    gh.H = std::move(H);
    return gh;
  }
  for (auto& g : gh.G) g = g.swapped();
  gh.H.assign(nf, Poly2(K));
  for (int s = 0; s < nf; ++s) {
    auto [i, j] = tri_member(s);
    gh.H[tri_index(j, i)] = H[s].swapped();
  }
  return gh;
}

}  // namespace hoif
