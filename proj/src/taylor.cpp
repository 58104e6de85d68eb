#include "hoif/taylor.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <stdexcept>

namespace hoif {

double factorial(int n) {
  static const std::array<double, 21> table = [] {
    std::array<double, 21> t{};
    t[0] = 1.0;
    for (int i = 1; i < 21; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n > 20) throw std::out_of_range("factorial argument out of range");
  return table[n];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// ---------------------------------------------------------------- Taylor2

Taylor2::Taylor2(int order, double value) : order_(order), c_(tri_size(order), 0.0) {
  c_[0] = value;
}

Taylor2 Taylor2::variable(int order, int axis, double value) {
  Taylor2 t(order, value);
  if (order >= 1) {
    if (axis == 0)
      t.coef(1, 0) = 1.0;
    else
      t.coef(0, 1) = 1.0;
  }
  return t;
}

Taylor2 Taylor2::differentiate(int axis) const {
  Taylor2 r(std::max(order_ - 1, 0));
  if (order_ == 0) return r;
  for (int t = 0; t <= order_ - 1; ++t)
    for (int m = 0; m <= t; ++m) {
      int n = t - m;
      if (axis == 0)
        r.coef(m, n) = coef(m + 1, n) * (m + 1);
      else
        r.coef(m, n) = coef(m, n + 1) * (n + 1);
    }
  return r;
}

Taylor2& Taylor2::operator+=(const Taylor2& o) {
  if (o.order_ < order_) {
    order_ = o.order_;
    c_.resize(tri_size(order_));
  }
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Taylor2& Taylor2::operator-=(const Taylor2& o) {
  if (o.order_ < order_) {
    order_ = o.order_;
    c_.resize(tri_size(order_));
  }
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Taylor2& Taylor2::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Taylor2& Taylor2::operator*=(const Taylor2& o) {
  const int N = std::min(order_, o.order_);
  std::vector<double> r(tri_size(N), 0.0);
  for (int m = 0; m <= N; ++m)
    for (int n = 0; m + n <= N; ++n) {
      double acc = 0.0;
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) acc += c_[tri_index(i, j)] * o.c_[tri_index(m - i, n - j)];
      r[tri_index(m, n)] = acc;
    }
  order_ = N;
  c_ = std::move(r);
  return *this;
}

Taylor2& Taylor2::operator/=(const Taylor2& o) {
  const int N = std::min(order_, o.order_);
  const double b0 = o.c_[0];
  if (b0 == 0.0) throw std::domain_error("Taylor2 division by series with zero constant term");
  std::vector<double> q(tri_size(N), 0.0);
  for (int t = 0; t <= N; ++t)
    for (int m = 0; m <= t; ++m) {
      int n = t - m;
      double acc = c_[tri_index(m, n)];
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) {
          if (i == m && j == n) continue;
          acc -= q[tri_index(i, j)] * o.c_[tri_index(m - i, n - j)];
        }
      q[tri_index(m, n)] = acc / b0;
    }
  order_ = N;
  c_ = std::move(q);
  return *this;
}

// ---------------------------------------------------------------- Series1

Series1::Series1(int order, double value) : order_(order), c_(order + 1, 0.0) { c_[0] = value; }

Series1 Series1::variable(int order, double value) {
  Series1 s(order, value);
  if (order >= 1) s.c_[1] = 1.0;
  return s;
}

Series1 Series1::differentiate() const {
  Series1 r(std::max(order_ - 1, 0));
  for (int p = 0; p + 1 <= order_; ++p) r.c_[p] = c_[p + 1] * (p + 1);
  return r;
}

Series1& Series1::operator+=(const Series1& o) {
  if (o.order_ < order_) {
    order_ = o.order_;
    c_.resize(order_ + 1);
  }
  for (int p = 0; p <= order_; ++p) c_[p] += o.c_[p];
  return *this;
}

Series1& Series1::operator-=(const Series1& o) {
  if (o.order_ < order_) {
    order_ = o.order_;
    c_.resize(order_ + 1);
  }
  for (int p = 0; p <= order_; ++p) c_[p] -= o.c_[p];
  return *this;
}

Series1& Series1::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Series1& Series1::operator*=(const Series1& o) {
  const int N = std::min(order_, o.order_);
  std::vector<double> r(N + 1, 0.0);
  for (int p = 0; p <= N; ++p)
    for (int i = 0; i <= p; ++i) r[p] += c_[i] * o.c_[p - i];
  order_ = N;
  c_ = std::move(r);
  return *this;
}

Series1& Series1::operator/=(const Series1& o) {
  const int N = std::min(order_, o.order_);
  const double b0 = o.c_[0];
  if (b0 == 0.0) throw std::domain_error("Series1 division by series with zero constant term");
  std::vector<double> q(N + 1, 0.0);
  for (int p = 0; p <= N; ++p) {
    double acc = c_[p];
    for (int i = 0; i < p; ++i) acc -= q[i] * o.c_[p - i];
    q[p] = acc / b0;
  }
  order_ = N;
  c_ = std::move(q);
  return *this;
}

// ------------------------------------------------------ elementary functions

namespace {

// f(g) = sum_k fk[k] (g - g0)^k, evaluated by Horner in the nilpotent part.
template <class T>
T compose_scalar(const T& g, const std::vector<double>& fk) {
  T d = g;
  d -= g.value();
  const int K = static_cast<int>(fk.size()) - 1;
  T r(g.order(), fk[K]);
  for (int k = K - 1; k >= 0; --k) {
    r *= d;
    r += fk[k];
  }
  return r;
}

std::vector<double> coeffs_sin(double x0, int K, double phase) {
  std::vector<double> f(K + 1);
  for (int k = 0; k <= K; ++k) f[k] = std::sin(x0 + phase + k * std::numbers::pi / 2) / factorial(k);
  return f;
}

std::vector<double> coeffs_exp(double x0, int K) {
  std::vector<double> f(K + 1);
  const double e = std::exp(x0);
  for (int k = 0; k <= K; ++k) f[k] = e / factorial(k);
  return f;
}

std::vector<double> coeffs_log(double x0, int K) {
  if (x0 <= 0.0) throw std::domain_error("log of non-positive series value");
  std::vector<double> f(K + 1);
  f[0] = std::log(x0);
  for (int k = 1; k <= K; ++k) f[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(x0, k));
  return f;
}

std::vector<double> coeffs_pow(double x0, double p, int K) {
  std::vector<double> f(K + 1);
  double c = 1.0;
  for (int k = 0; k <= K; ++k) {
    f[k] = c * std::pow(x0, p - k);
    c *= (p - k) / (k + 1);
  }
  return f;
}

std::vector<double> coeffs_atan(double x0, int K) {
  std::vector<double> f(K + 1);
  const double th = std::atan(x0);
  f[0] = th;
  for (int k = 1; k <= K; ++k)
    f[k] = std::pow(std::cos(th), k) * std::sin(k * (th + std::numbers::pi / 2)) / k;
  return f;
}

std::vector<double> coeffs_hyp(double x0, int K, bool cosh_first) {
  std::vector<double> f(K + 1);
  for (int k = 0; k <= K; ++k) {
    bool even = (k % 2) == 0;
    double v = (even == cosh_first) ? std::cosh(x0) : std::sinh(x0);
    f[k] = v / factorial(k);
  }
  return f;
}

template <class T>
T generic_atan2(const T& y, const T& x) {
  const double th0 = std::atan2(y.value(), x.value());
  T s = (std::abs(x.value()) >= std::abs(y.value())) ? atan(y / x) : -atan(x / y);
  s -= s.value();
  s += th0;
  return s;
}

template <class T>
T generic_pow(const T& a, double p) {
  if (p == std::round(p) && std::abs(p) <= 64) return ipow(a, static_cast<int>(p));
  return compose_scalar(a, coeffs_pow(a.value(), p, a.order()));
}

}  // namespace

#define HOIF_TAYLOR_FUNCS(T)                                                                      \
  T sin(const T& a) { return compose_scalar(a, coeffs_sin(a.value(), a.order(), 0.0)); }          \
  T cos(const T& a) {                                                                              \
    return compose_scalar(a, coeffs_sin(a.value(), a.order(), std::numbers::pi / 2));             \
  }                                                                                                \
  T tan(const T& a) { return sin(a) / cos(a); }                                                    \
  T exp(const T& a) { return compose_scalar(a, coeffs_exp(a.value(), a.order())); }               \
  T log(const T& a) { return compose_scalar(a, coeffs_log(a.value(), a.order())); }               \
  T sqrt(const T& a) { return compose_scalar(a, coeffs_pow(a.value(), 0.5, a.order())); }         \
  T atan(const T& a) { return compose_scalar(a, coeffs_atan(a.value(), a.order())); }             \
  T sinh(const T& a) { return compose_scalar(a, coeffs_hyp(a.value(), a.order(), false)); }       \
  T cosh(const T& a) { return compose_scalar(a, coeffs_hyp(a.value(), a.order(), true)); }        \
  T abs(const T& a) { return a.value() >= 0.0 ? a : -a; }                                          \
  T pow(const T& a, double p) { return generic_pow(a, p); }                                        \
  T pow(const T& a, const T& b) { return exp(b * log(a)); }                                        \
  T atan2(const T& y, const T& x) { return generic_atan2(y, x); }

HOIF_TAYLOR_FUNCS(Taylor2)
HOIF_TAYLOR_FUNCS(Series1)
#undef HOIF_TAYLOR_FUNCS

Series1 compose(const Taylor2& f, const Series1& X, const Series1& Y) {
  const int P = std::min(X.order(), Y.order());
  const int N = f.order();
  std::vector<Series1> xp(N + 1, Series1(P, 1.0)), yp(N + 1, Series1(P, 1.0));
  for (int k = 1; k <= N; ++k) {
    xp[k] = xp[k - 1] * X;
    yp[k] = yp[k - 1] * Y;
  }
  Series1 r(P, 0.0);
  for (int m = 0; m <= N; ++m)
    for (int n = 0; m + n <= N; ++n) {
      const double c = f.coef(m, n);
      if (c != 0.0) r += (xp[m] * yp[n]) * c;
    }
  return r;
}

}  // namespace hoif
