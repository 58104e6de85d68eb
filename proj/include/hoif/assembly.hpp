#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "hoif/interface.hpp"
#include "hoif/mls.hpp"
#include "hoif/problem.hpp"
#include "hoif/stencil_boundary.hpp"

namespace hoif {

enum class RowKind { Regular, Irregular, Edge, Corner, Dirichlet };

const char* row_kind_name(RowKind k);

// One assembled row: h^{-scale} sum_j C_j(h) u_j = rhs. The stencil keeps
// the per-degree coefficients with offsets in the grid frame.
struct AssembledRow {
  RowKind kind = RowKind::Regular;
  int scale = 0;
  std::vector<std::pair<int, double>> entries;  // (column, value), ascending columns
  double rhs = 0.0;
  StencilPoly stencil;
  bool monotone = true;
  double mls_condition = 1.0;
};

// Per-point stencil generation for one problem and grid. The builder is
// read-only after construction, so build() may run concurrently.
class RowBuilder {
 public:
  RowBuilder(const Problem& problem, int J);

  const Grid& grid() const { return grid_; }
  const Classification& classification() const { return cls_; }
  const Problem& problem() const { return *problem_; }
  RowKind kind(int i, int j) const;

  AssembledRow build(int i, int j, ChartKind chart = ChartKind::Auto) const;

 private:
  struct Cached {
    MlsOperator a, f, side1, side2;  // side1/side2: 1D operators along the two boundary sides
  };

  AssembledRow build_regular(int i, int j) const;
  AssembledRow build_edge(int i, int j, int side) const;
  AssembledRow build_corner(int i, int j, int vertical, int horizontal) const;
  AssembledRow build_dirichlet(int i, int j, int side) const;
  AssembledRow build_irregular(int i, int j, ChartKind chart) const;
  void finish(AssembledRow& row, int i, int j, const StencilPoly& stencil, double rhs_raw) const;

  std::shared_ptr<const Problem> problem_;
  Grid grid_;
  InterfaceGeometry geo_;
  JumpData jumps_;
  Classification cls_;
  std::unique_ptr<CurveSampler> sampler_;
  Cached regular_, edge_, corner_;
};

struct AssemblyOptions {
  bool parallel = true;
  int threads = 0;  // 0: OpenMP default
};

struct GlobalSystem {
  Grid grid;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  std::vector<RowKind> kind;
  std::vector<signed char> scale;
  std::vector<unsigned char> monotone;  // per-row flag from stencil generation
  std::vector<StencilPoly> stencils;    // per-row stencils (grid frame)
  int n_irregular = 0;
  double max_mls_condition = 1.0;
  double seconds_regular = 0.0;    // wall time of non-irregular row generation
  double seconds_irregular = 0.0;  // wall time of irregular row generation
  double seconds_form = 0.0;       // sparse matrix formation
};

// Row construction in parallel (or serially with parallel = false); the
// result does not depend on the thread count.
GlobalSystem assemble(const Problem& problem, int J, const AssemblyOptions& options = {});

struct SolveReport {
  Eigen::VectorXd u;
  double residual = 0.0;  // ||A u - b||_2 / ||b||_2
  double seconds = 0.0;
};

// Direct sparse LU; throws if the factorization fails or the relative
// residual exceeds 1e-10.
SolveReport solve(const GlobalSystem& system);

struct RowAudit {
  int index = 0;
  RowKind kind = RowKind::Regular;
  MMatrixReport report;
};

struct MMatrixAudit {
  int checked = 0, failed = 0, irregular = 0;
  std::vector<RowAudit> failures;
  // Assembled matrix: positive diagonal and nonpositive off-diagonals on every
  // non-irregular row.
  bool matrix_signs = true;
  int matrix_sign_failures = 0;
  bool pass() const { return failed == 0 && matrix_signs; }
};

// Per-degree sign/sum audit of every regular, edge and corner row plus a sign
// check of the assembled non-irregular rows; irregular rows are only counted.
MMatrixAudit audit_m_matrix(const GlobalSystem& system);

}  // namespace hoif
