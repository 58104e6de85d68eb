#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hoif/taylor.hpp"

namespace hoif {

using Index2 = std::pair<int, int>;

enum class SetKind { Full, Band, Complement };

struct MultiIndexSet {
  int order = 0;
  SetKind kind = SetKind::Full;
  std::vector<Index2> members;
  int size() const { return static_cast<int>(members.size()); }
};

struct LambdaSets {
  MultiIndexSet full;        // {(m,n): m+n <= order}
  MultiIndexSet band;        // members of full with m in {0,1}
  MultiIndexSet complement;  // full minus band
};

// Members are listed by ascending total degree t and, within a degree, by
// ascending first index, so (0,t) precedes (1,t-1).
LambdaSets lambda_sets(int order);

// Position of (m,n), m in {0,1}, inside the canonically ordered band.
inline int band_index(int m, int n) { return (m + n == 0) ? 0 : 2 * (m + n) - 1 + m; }
inline int band_size(int order) { return order < 0 ? 0 : 2 * order + 1; }
inline Index2 band_member(int b) {
  if (b == 0) return {0, 0};
  int t = (b + 1) / 2;
  int m = b - (2 * t - 1);
  return {m, t - m};
}
inline Index2 tri_member(int k) {
  int t = 0;
  while (tri_size(t) <= k) ++t;
  int m = k - t * (t + 1) / 2;
  return {m, t - m};
}

// Table of partial derivatives of a bivariate function at a base point.
class Jet2 {
 public:
  Jet2() = default;
  Jet2(double x0, double y0, Taylor2 series) : x0_(x0), y0_(y0), s_(std::move(series)) {}
  // derivs[tri_index(m,n)] = d^{m+n} f / dx^m dy^n.
  static Jet2 from_derivatives(double x0, double y0, int order, const std::vector<double>& derivs);

  double x0() const { return x0_; }
  double y0() const { return y0_; }
  int order() const { return s_.order(); }
  double operator()(int m, int n) const;
  const Taylor2& series() const { return s_; }
  // Jet of g(x,y) = f(y,x) about the swapped base point.
  Jet2 transposed() const;

 private:
  double x0_ = 0.0, y0_ = 0.0;
  Taylor2 s_;
};

// Bivariate polynomial sum c[p,q] x^p y^q with triangular storage.
class Poly2 {
 public:
  Poly2() = default;
  explicit Poly2(int degree) : degree_(degree), c_(tri_size(degree), 0.0) {}

  int degree() const { return degree_; }
  double coef(int p, int q) const { return (p + q <= degree_) ? c_[tri_index(p, q)] : 0.0; }
  double& coef(int p, int q) { return c_[tri_index(p, q)]; }
  double operator()(double x, double y) const;
  // Homogeneous part of total degree t evaluated at (x,y).
  double homogeneous(int t, double x, double y) const;
  Poly2 swapped() const;
  Poly2& operator+=(const Poly2& o);
  Poly2& axpy(double s, const Poly2& o);

 private:
  int degree_ = 0;
  std::vector<double> c_{0.0};
};

// Linear expressions of u^{(p,q)}, (p,q) in Lambda_K, through the band values
// u^{(m,n)}, m in {0,1}, and f^{(i,j)}, (i,j) in Lambda_{K-2}, evaluated at
// the base point.
struct ReductionTable {
  int K = 0;
  bool transposed = false;
  Eigen::MatrixXd u;  // tri_size(K) x band_size(K)
  Eigen::MatrixXd f;  // tri_size(K) x tri_size(K-2)

  // For a transposed table the band is {n in {0,1}} and all indices are in
  // the original variables.
  double au(int p, int q, int m, int n) const;
  double af(int p, int q, int i, int j) const;
};

ReductionTable build_reduction_table(const Jet2& a, int K);
ReductionTable transpose_reduction_table(const Jet2& a, int K);

// G_{K,m,n} for the band and H_{K,i,j} for Lambda_{K-2}; for a transposed
// table these are the tilde polynomials.
struct GHPolys {
  int K = 0;
  bool transposed = false;
  std::vector<Poly2> G;
  std::vector<Poly2> H;
  const Poly2& g(int m, int n) const { return transposed ? G[band_index(n, m)] : G[band_index(m, n)]; }
  const Poly2& h(int i, int j) const { return H[tri_index(i, j)]; }
};

GHPolys build_GH_polynomials(const ReductionTable& table);

}  // namespace hoif
