#include "hoif/mls.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hoif {

namespace {

std::vector<Index2> basis_exponents(int dim, int M) {
  return dim == 1 ? all_derivatives_1d(M) : all_derivatives_2d(M);
}

}  // namespace

std::vector<Index2> all_derivatives_2d(int M) { return lambda_sets(M).full.members; }

std::vector<Index2> all_derivatives_1d(int M) {
  std::vector<Index2> r;
  for (int p = 0; p <= M; ++p) r.push_back({p, 0});
  return r;
}

MlsOperator::MlsOperator(const MlsProblem& P, const std::vector<Index2>& requests) {
  const auto basis = basis_exponents(P.dim, P.degree);
  const int K = static_cast<int>(P.samples.size());
  const int J = static_cast<int>(basis.size());
  if (K < J)
    throw std::runtime_error("MLS: " + std::to_string(K) + " samples for a basis of size " + std::to_string(J));

  Eigen::MatrixXd B(K, J);
  Eigen::VectorXd sw(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::Vector2d d = P.samples[k] - P.center;
    const double r2 = (P.dim == 1) ? d.x() * d.x() : d.squaredNorm();
    sw(k) = std::exp(-0.5 * r2 / (P.h * P.h));
    const double X = d.x() / P.htilde;
    const double Y = (P.dim == 1) ? 0.0 : d.y() / P.htilde;
    for (int b = 0; b < J; ++b) B(k, b) = sw(k) * ipow(X, basis[b].first) * ipow(Y, basis[b].second);
  }
  // Column equilibration leaves the fit unchanged and makes the pivoted-QR
  // diagonal a meaningful conditioning measure.
  Eigen::VectorXd cs = B.colwise().norm().transpose();
  for (int b = 0; b < J; ++b) {
    if (cs(b) == 0.0) throw std::runtime_error("MLS: degenerate sample geometry (zero basis column)");
    B.col(b) /= cs(b);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  const auto R = qr.matrixR();
  const double r0 = std::abs(R(0, 0)), rl = std::abs(R(J - 1, J - 1));
  cond_ = (rl > 0.0) ? (r0 / rl) * (r0 / rl) : INFINITY;
  if (!(cond_ < kMlsConditionLimit))
    throw std::runtime_error("MLS: normal matrix condition estimate " + std::to_string(cond_) +
                             " exceeds limit (degenerate sample geometry)");

  // B^+ = P R^{-1} Q_thin^T
  Eigen::MatrixXd Qthin = qr.householderQ() * Eigen::MatrixXd::Identity(K, J);
  Eigen::MatrixXd Rinv_Qt =
      R.topLeftCorner(J, J).triangularView<Eigen::Upper>().solve(Qthin.transpose());
  Eigen::MatrixXd pinv = qr.colsPermutation() * Rinv_Qt;

  const int nr = static_cast<int>(requests.size());
  W_.resize(nr, K);
  for (int i = 0; i < nr; ++i) {
    auto [m, n] = requests[i];
    int b = -1;
    for (int j = 0; j < J; ++j)
      if (basis[j].first == m && basis[j].second == n) b = j;
    if (b < 0)
      throw std::invalid_argument("MLS: request (" + std::to_string(m) + "," + std::to_string(n) +
                                  ") exceeds basis degree " + std::to_string(P.degree));
    const double scale = factorial(m) * factorial(n) / (ipow(P.htilde, m + n) * cs(b));
    W_.row(i) = scale * pinv.row(b).cwiseProduct(sw.transpose());
  }
}

std::vector<double> mls_estimate(const MlsProblem& problem, const std::vector<double>& values,
                                 const std::vector<Index2>& requests) {
  if (values.size() != problem.samples.size())
    throw std::invalid_argument("MLS: value count does not match sample count");
  MlsOperator op(problem, requests);
  Eigen::VectorXd est = op.apply(Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()));
  return {est.data(), est.data() + est.size()};
}

SamplingRecipe sampling_recipe(MlsContext context, double h) {
  SamplingRecipe r;
  r.context = context;
  auto add = [&](double X, double Y) { r.offsets.emplace_back(X, Y); };
  switch (context) {
    case MlsContext::RegularInterior:
      r.htilde = h / 4;
      r.degree_a = 6;
      r.degree_f = 5;
      for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j) add(i * r.htilde, j * r.htilde);
      break;
    case MlsContext::IrregularInterface:
      r.htilde = h / 32;
      r.degree_a = 4;
      r.degree_f = 3;
      for (int i = -32; i <= 32; ++i)
        for (int j = -32; j <= 32; ++j) add(i * r.htilde, j * r.htilde);
      break;
    case MlsContext::CurveGraph:
    case MlsContext::CurveAngle:
      r.dim = 1;
      r.htilde = h / 16;
      r.degree_a = 6;
      r.degree_f = 5;
      for (int i = -5; i <= 5; ++i) add(i * r.htilde, 0.0);
      break;
    case MlsContext::EdgeBoundary:
      r.htilde = h / 8;
      r.degree_a = 5;
      r.degree_f = 4;
      for (int i = 0; i <= 8; ++i)
        for (int j = -8; j <= 8; ++j) add(i * r.htilde, j * r.htilde);
      break;
    case MlsContext::CornerBoundary:
      r.htilde = h / 16;
      r.degree_a = 5;
      r.degree_f = 4;
      for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) add(i * r.htilde, j * r.htilde);
      break;
    case MlsContext::EdgeBoundary1d:
      r.dim = 1;
      r.htilde = h / 8;
      r.degree_a = 5;
      r.degree_f = 5;
      for (int j = -8; j <= 8; ++j) add(j * r.htilde, 0.0);
      break;
    case MlsContext::CornerBoundary1d:
      r.dim = 1;
      r.htilde = h / 16;
      r.degree_a = 5;
      r.degree_f = 5;
      for (int j = 0; j <= 16; ++j) add(j * r.htilde, 0.0);
      break;
  }
  return r;
}

}  // namespace hoif
