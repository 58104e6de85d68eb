#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hoif/multiindex.hpp"

namespace hoif {

// Stencil coefficients C_j(h) = sum_p c(j,p) h^p over a list of grid offsets.
// The scheme reads h^{-scale} sum_j C_j u_{i+k_j, j+l_j} = right-hand side.
struct StencilPoly {
  std::vector<Index2> offsets;
  Eigen::MatrixXd c;  // offsets x (D+1)
  int scale = 2;

  int D() const { return static_cast<int>(c.cols()) - 1; }
  int size() const { return static_cast<int>(offsets.size()); }
  int find(int k, int l) const;
  double coef(int k, int l, int p) const;
  double eval(int j, double h) const;
  bool nontrivial() const { return c.col(0).cwiseAbs().maxCoeff() > 0.0; }
};

// One stencil column: its grid offset, its displacement (v,w) from the base
// point in units of h, and the local expansion of u at that point. The value
// of u there is sum_r U_r u_forms[r](vh,wh) + sum_s D_s data_forms[s](vh,wh)
// up to truncation, where U_r are the unknown row symbols and D_s the data.
struct StencilColumn {
  Index2 offset{0, 0};
  double v = 0.0, w = 0.0;
  std::vector<Poly2> u_forms;
  std::vector<Poly2> data_forms;
};

// Per-degree selection: fixed column values, and an optional group of
// columns tied to one parameter t through c_col = ratio * t. With maximize
// set, t is the largest value meeting the sign (and optional sum) conditions.
struct DegreePolicy {
  std::vector<std::pair<int, double>> fixed;
  std::vector<std::pair<int, double>> tied;
  bool maximize = false;
};

struct EngineSpec {
  int N = 0;  // sum_j C_j u_forms[r] must vanish through h^{N-1}
  int D = 0;  // C_d = 0 is imposed for d > D and checked
  std::vector<int> row_degree;
  std::vector<DegreePolicy> policy;  // D+1 entries
  std::vector<int> col_offset;       // column -> offset slot
  int n_offsets = 0;
  int center_offset = 0;
  bool sum_condition = false;
};

struct EngineResult {
  Eigen::MatrixXd c;            // columns x (D+1)
  std::vector<double> t;        // tie parameter chosen per degree (0 if none)
  bool feasible = true;         // every selection interval was non-empty
  std::vector<std::string> notes;
};

// Matrix A_d: rows with row_degree + d <= N-1, entries of the lowest-degree
// homogeneous part of each row form at each column.
Eigen::MatrixXd engine_matrix(const std::vector<StencilColumn>& cols, const EngineSpec& spec, int d);

EngineResult solve_recursive(const std::vector<StencilColumn>& cols, const EngineSpec& spec);

// Column expansions plus selection rules: the full recursive system
// A_d C_d = b_d of one stencil family.
struct RecursiveSystem {
  std::vector<StencilColumn> columns;
  EngineSpec spec;
  std::vector<Index2> offsets;
  int scale = 1;
  Eigen::MatrixXd A(int d) const { return engine_matrix(columns, spec, d); }
};

// A generated stencil together with everything needed for its right-hand side.
struct StencilResult {
  StencilPoly stencil;                 // aggregated by offset
  std::vector<StencilColumn> columns;  // per-column expansion
  Eigen::MatrixXd column_c;            // columns x (D+1)
  EngineSpec spec;
  bool monotone = true;
  std::vector<std::string> notes;

  // Weight of each data symbol: sum_j C_j(h) data_forms[s](v_j h, w_j h).
  Eigen::VectorXd rhs_weights(double h) const;
};

StencilResult make_stencil(RecursiveSystem system);

struct MMatrixViolation {
  Index2 offset;
  int degree;
  std::string what;
};

struct MMatrixReport {
  bool pass = true;
  std::vector<MMatrixViolation> violations;
};

// Per-degree sufficient conditions: center coefficient >= 0 (> 0 at degree
// 0), off-center <= 0, per-degree row sum >= 0. Tolerance is relative to the
// largest coefficient.
MMatrixReport check_m_matrix(const StencilPoly& s, double rel_tol = 1e-10);

}  // namespace hoif
