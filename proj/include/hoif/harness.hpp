#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoif/assembly.hpp"

namespace hoif {

struct SolveOutput {
  Grid grid;
  Eigen::VectorXd u;
  int n_irregular = 0;
  double residual = 0.0;
  double seconds_regular = 0.0, seconds_irregular = 0.0, seconds_form = 0.0, seconds_solve = 0.0;
  double seconds_total() const { return seconds_regular + seconds_irregular + seconds_form + seconds_solve; }
};

SolveOutput run_solve(const Problem& problem, int J, const AssemblyOptions& options = {});

// max over grid nodes of |u_h - u|.
double max_error(const Problem& problem, const SolveOutput& s);
// max over nodes (i, j) of the coarse grid of |(u_h)_{i,j} - (u_{h/2})_{2i,2j}|.
double successive_error(const SolveOutput& coarse, const SolveOutput& fine);

enum class ErrorMode { Exact, Successive };

struct ConvergenceRow {
  int J = 0;
  double h = 0.0;
  double error = 0.0;
  double order = 0.0;  // log2(err_{J-1} / err_J); NaN on the first row
  double seconds = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double average_order = 0.0;  // mean of the listed orders
};

// Successive mode solves J_first..J_last+1.
ConvergenceResult convergence(const Problem& problem, int J_first, int J_last, ErrorMode mode,
                              const AssemblyOptions& options = {});

// Locale-independent CSV: scientific notation with 17 significant digits, so
// that values read back are bit-identical.
std::string csv_number(double v);
void write_solution_csv(std::ostream& out, const SolveOutput& s);
void write_convergence_csv(std::ostream& out, const ConvergenceResult& r);

}  // namespace hoif
