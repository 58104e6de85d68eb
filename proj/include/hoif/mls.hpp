#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hoif/multiindex.hpp"

namespace hoif {

// Weighted polynomial least squares about a target point z*. The weights are
// exp(-|z_k - z*|^2 / h^2); the basis is centered at z* and scaled by htilde.
struct MlsProblem {
  int dim = 2;                            // 1: only the x component is used
  std::vector<Eigen::Vector2d> samples;   // absolute coordinates
  Eigen::Vector2d center{0.0, 0.0};
  int degree = 0;
  double h = 1.0;
  double htilde = 1.0;
};

// Derivative estimates as fixed linear functionals of the sample values.
// Requests are (m,n) pairs; in 1D use (p,0).
class MlsOperator {
 public:
  MlsOperator() = default;
  MlsOperator(const MlsProblem& problem, const std::vector<Index2>& requests);

  int num_samples() const { return static_cast<int>(W_.cols()); }
  const Eigen::MatrixXd& weights() const { return W_; }
  double condition_estimate() const { return cond_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& values) const { return W_ * values; }

 private:
  Eigen::MatrixXd W_;
  double cond_ = 1.0;
};

inline constexpr double kMlsConditionLimit = 1e12;

std::vector<double> mls_estimate(const MlsProblem& problem, const std::vector<double>& values,
                                 const std::vector<Index2>& requests);

// Requests for every derivative of total order <= M (2D, tri order) or
// every order 0..M (1D).
std::vector<Index2> all_derivatives_2d(int M);
std::vector<Index2> all_derivatives_1d(int M);

enum class MlsContext {
  RegularInterior,
  IrregularInterface,
  CurveGraph,
  CurveAngle,
  EdgeBoundary,
  CornerBoundary,
  EdgeBoundary1d,
  CornerBoundary1d
};

// Sample lattice relative to the anchor, in the local (canonical) frame.
// Interface lattices are unfiltered; callers keep the points of one side.
struct SamplingRecipe {
  MlsContext context;
  int dim = 2;
  std::vector<Eigen::Vector2d> offsets;
  double htilde = 1.0;
  int degree_a = 0;  // basis degree for coefficients / curve coordinates
  int degree_f = 0;  // basis degree for sources / flux data
};

SamplingRecipe sampling_recipe(MlsContext context, double h);

}  // namespace hoif
