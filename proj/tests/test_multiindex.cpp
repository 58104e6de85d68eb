#include <cmath>

#include <doctest.h>

#include "hoif/multiindex.hpp"
#include "support.hpp"

using namespace hoif;
using namespace testsupport;

namespace {
auto a_fn = [](const auto& x, const auto& y) { return 2.0 + 0.3 * x * y + sin(x); };
auto u_fn = [](const auto& x, const auto& y) { return sin(x + 2.0 * y) + x * x * x + exp(0.4 * y); };
}  // namespace

TEST_CASE("multi-index sets and band ordering") {
  const LambdaSets s = lambda_sets(5);
  CHECK(s.full.size() == 21);
  CHECK(s.band.size() == 11);
  CHECK(s.complement.size() == 10);
  CHECK(s.band.members[1] == Index2{0, 1});
  CHECK(s.band.members[2] == Index2{1, 0});
  for (int b = 0; b < band_size(5); ++b) {
    const auto [m, n] = band_member(b);
    CHECK(band_index(m, n) == b);
    CHECK(s.band.members[b] == Index2{m, n});
  }
  for (int k = 0; k < tri_size(5); ++k) {
    const auto [m, n] = tri_member(k);
    CHECK(tri_index(m, n) == k);
  }
  for (const auto& [m, n] : s.complement.members) CHECK(m >= 2);
}

TEST_CASE("reduction table expresses all derivatives through the band and the source") {
  const double x0 = 0.3, y0 = -0.2;
  const int K = 7;
  const Jet2 a = jet_of(a_fn, x0, y0, K);
  const Jet2 u = jet_of(u_fn, x0, y0, K);
  const Jet2 f = source_jet(a_fn, u_fn, x0, y0, K - 2);
  for (bool transposed : {false, true}) {
    const ReductionTable T = transposed ? transpose_reduction_table(a, K) : build_reduction_table(a, K);
    for (int p = 0; p <= K; ++p)
      for (int q = 0; p + q <= K; ++q) {
        double v = 0.0;
        for (int b = 0; b < band_size(K); ++b) {
          auto [m, n] = band_member(b);
          if (transposed) std::swap(m, n);
          v += T.au(p, q, m, n) * u(m, n);
        }
        for (int k = 0; k < tri_size(K - 2); ++k) {
          const auto [i, j] = tri_member(k);
          v += T.af(p, q, i, j) * f(i, j);
        }
        CHECK(v == doctest::Approx(u(p, q)).epsilon(1e-10));
      }
  }
}

TEST_CASE("G and H polynomials rebuild the Taylor polynomial of u") {
  const double x0 = -0.4, y0 = 0.6;
  const int K = 6;
  const Jet2 a = jet_of(a_fn, x0, y0, K);
  const Jet2 u = jet_of(u_fn, x0, y0, K);
  const Jet2 f = source_jet(a_fn, u_fn, x0, y0, K - 2);
  const GHPolys gh = build_GH_polynomials(build_reduction_table(a, K));
  for (auto [X, Y] : {std::pair{0.1, -0.2}, {0.3, 0.05}, {-0.15, -0.25}}) {
    double v = 0.0;
    for (int b = 0; b < band_size(K); ++b) {
      const auto [m, n] = band_member(b);
      v += gh.g(m, n)(X, Y) * u(m, n);
    }
    for (int k = 0; k < tri_size(K - 2); ++k) {
      const auto [i, j] = tri_member(k);
      v += gh.h(i, j)(X, Y) * f(i, j);
    }
    double ref = 0.0;
    for (int p = 0; p <= K; ++p)
      for (int q = 0; p + q <= K; ++q) ref += u.series().coef(p, q) * std::pow(X, p) * std::pow(Y, q);
    CHECK(v == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("Poly2 evaluation and homogeneous parts") {
  Poly2 p(3);
  p.coef(0, 0) = 1.0;
  p.coef(1, 0) = 2.0;
  p.coef(1, 2) = -3.0;
  CHECK(p(0.5, 2.0) == doctest::Approx(1.0 + 1.0 - 3.0 * 0.5 * 4.0));
  CHECK(p.homogeneous(3, 0.5, 2.0) == doctest::Approx(-6.0));
  CHECK(p.homogeneous(2, 0.5, 2.0) == 0.0);
  const Poly2 s = p.swapped();
  CHECK(s.coef(2, 1) == -3.0);
  CHECK(s.coef(0, 1) == 2.0);
}
