#pragma once

#include <cmath>
#include <vector>

namespace hoif {

// Bivariate arrays are stored by total degree: the block of degree t starts at
// t(t+1)/2 and holds (0,t), (1,t-1), ..., (t,0).
inline int tri_index(int m, int n) { return (m + n) * (m + n + 1) / 2 + m; }
inline int tri_size(int order) { return (order + 1) * (order + 2) / 2; }

double factorial(int n);
double binomial(int n, int k);

// Truncated bivariate Taylor series in the displacement (X,Y) from a base
// point. coef(m,n) is the Taylor coefficient, i.e. the (m,n) partial
// derivative divided by m! n!.
class Taylor2 {
 public:
  Taylor2() = default;
  explicit Taylor2(int order, double value = 0.0);
  static Taylor2 variable(int order, int axis, double value);

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coef(int m, int n) const { return c_[tri_index(m, n)]; }
  double& coef(int m, int n) { return c_[tri_index(m, n)]; }
  double derivative(int m, int n) const { return coef(m, n) * factorial(m) * factorial(n); }
  const std::vector<double>& data() const { return c_; }
  std::vector<double>& data() { return c_; }

  // Shift a truncated series: the Taylor series of d/dx (axis 0) or d/dy.
  Taylor2 differentiate(int axis) const;

  Taylor2& operator+=(const Taylor2& o);
  Taylor2& operator-=(const Taylor2& o);
  Taylor2& operator*=(const Taylor2& o);
  Taylor2& operator/=(const Taylor2& o);
  Taylor2& operator+=(double s) { c_[0] += s; return *this; }
  Taylor2& operator-=(double s) { c_[0] -= s; return *this; }
  Taylor2& operator*=(double s);
  Taylor2& operator/=(double s) { return *this *= 1.0 / s; }

 private:
  int order_ = 0;
  std::vector<double> c_{0.0};
};

// Truncated univariate Taylor series; coef(p) = p-th derivative / p!.
class Series1 {
 public:
  Series1() = default;
  explicit Series1(int order, double value = 0.0);
  static Series1 variable(int order, double value);

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coef(int p) const { return c_[p]; }
  double& coef(int p) { return c_[p]; }
  double derivative(int p) const { return c_[p] * factorial(p); }
  const std::vector<double>& data() const { return c_; }

  Series1 differentiate() const;

  Series1& operator+=(const Series1& o);
  Series1& operator-=(const Series1& o);
  Series1& operator*=(const Series1& o);
  Series1& operator/=(const Series1& o);
  Series1& operator+=(double s) { c_[0] += s; return *this; }
  Series1& operator-=(double s) { c_[0] -= s; return *this; }
  Series1& operator*=(double s);
  Series1& operator/=(double s) { return *this *= 1.0 / s; }

 private:
  int order_ = 0;
  std::vector<double> c_{0.0};
};

#define HOIF_TAYLOR_OPS(T)                                                              \
  inline T operator+(T a, const T& b) { return a += b; }                                \
  inline T operator-(T a, const T& b) { return a -= b; }                                \
  inline T operator*(T a, const T& b) { return a *= b; }                                \
  inline T operator/(T a, const T& b) { return a /= b; }                                \
  inline T operator+(T a, double s) { return a += s; }                                  \
  inline T operator+(double s, T a) { return a += s; }                                  \
  inline T operator-(T a, double s) { return a -= s; }                                  \
  inline T operator-(double s, const T& a) { return T(a.order(), s) - a; }              \
  inline T operator*(T a, double s) { return a *= s; }                                  \
  inline T operator*(double s, T a) { return a *= s; }                                  \
  inline T operator/(T a, double s) { return a /= s; }                                  \
  inline T operator/(double s, const T& a) { return T(a.order(), s) / a; }              \
  inline T operator-(const T& a) { return a * -1.0; }                                   \
  T sin(const T& a);                                                                    \
  T cos(const T& a);                                                                    \
  T tan(const T& a);                                                                    \
  T exp(const T& a);                                                                    \
  T log(const T& a);                                                                    \
  T sqrt(const T& a);                                                                   \
  T atan(const T& a);                                                                   \
  T sinh(const T& a);                                                                   \
  T cosh(const T& a);                                                                   \
  T abs(const T& a);                                                                    \
  T pow(const T& a, double p);                                                          \
  T pow(const T& a, const T& b);                                                        \
  T atan2(const T& y, const T& x);

HOIF_TAYLOR_OPS(Taylor2)
HOIF_TAYLOR_OPS(Series1)
#undef HOIF_TAYLOR_OPS

// Integer power by repeated squaring; works for double and both series types.
template <class T>
T ipow(const T& a, int n) {
  if (n < 0) return 1.0 / ipow(a, -n);
  T result = a * 0.0 + 1.0;
  T base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

// Compose a bivariate Taylor series f (about the base point) with curve
// displacements X(t), Y(t) that vanish at t=0: returns f(X(t),Y(t)).
Series1 compose(const Taylor2& f, const Series1& X, const Series1& Y);

}  // namespace hoif
