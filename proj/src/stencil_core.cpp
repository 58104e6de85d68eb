#include "hoif/stencil_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hoif {

int StencilPoly::find(int k, int l) const {
  for (int j = 0; j < size(); ++j)
    if (offsets[j].first == k && offsets[j].second == l) return j;
  return -1;
}

double StencilPoly::coef(int k, int l, int p) const {
  const int j = find(k, l);
  if (j < 0 || p > D()) return 0.0;
  return c(j, p);
}

double StencilPoly::eval(int j, double h) const {
  double r = 0.0;
  for (int p = D(); p >= 0; --p) r = r * h + c(j, p);
  return r;
}

namespace {

constexpr double kSlack = 1e-13;
constexpr double kResidualTol = 1e-9;
constexpr double kRankThreshold = 1e-10;

// phi[t](r,j): homogeneous degree-t part of row form r at column j.
std::vector<Eigen::MatrixXd> build_phi(const std::vector<StencilColumn>& cols, int R, int T) {
  const int n = static_cast<int>(cols.size());
  std::vector<Eigen::MatrixXd> phi(T, Eigen::MatrixXd::Zero(R, n));
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(cols[j].u_forms.size()) != R)
      throw std::invalid_argument("stencil engine: column has wrong number of row forms");
    for (int r = 0; r < R; ++r)
      for (int t = 0; t < T; ++t) phi[t](r, j) = cols[j].u_forms[r].homogeneous(t, cols[j].v, cols[j].w);
  }
  return phi;
}

std::vector<int> active_rows(const EngineSpec& spec, int d) {
  std::vector<int> rows;
  for (int r = 0; r < static_cast<int>(spec.row_degree.size()); ++r)
    if (spec.row_degree[r] + d <= spec.N - 1) rows.push_back(r);
  return rows;
}

// Householder QR with column pivoting and basic solutions (free parameters
// zero), as LAPACK's pivoted QR. Column norms are recomputed at every step,
// and columns whose norm is within kTieTolerance of the largest count as tied;
// the lowest index wins, so roundoff cannot flip the choice of basic columns.
class BasicQR {
 public:
  BasicQR(const Eigen::MatrixXd& A, double rank_threshold) : qr_(A), perm_(A.cols()), beta_(A.cols(), 0.0) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    for (int j = 0; j < n; ++j) perm_[j] = j;
    const int steps = std::min(m, n);
    for (int k = 0; k < steps; ++k) {
      Eigen::VectorXd norms = qr_.block(k, k, m - k, n - k).colwise().norm().transpose();
      const double top = norms.maxCoeff();
      int piv = 0;
      while (norms(piv) < (1.0 - kTieTolerance) * top) ++piv;
      if (piv != 0) {
        qr_.col(k).swap(qr_.col(k + piv));
        std::swap(perm_[k], perm_[k + piv]);
      }
      // Reflector I - beta v v^T with v(0) = 1 mapping the column to r e_1.
      auto x = qr_.col(k).segment(k, m - k);
      const double alpha = x(0), sigma = x.norm();
      if (sigma == 0.0) continue;
      const double r = alpha > 0.0 ? -sigma : sigma;
      const double v0 = alpha - r;
      x.tail(m - k - 1) /= v0;
      beta_[k] = -v0 / r;
      x(0) = r;
      for (int j = k + 1; j < n; ++j) {
        auto c = qr_.col(j).segment(k, m - k);
        const double w = beta_[k] * (c(0) + x.tail(m - k - 1).dot(c.tail(m - k - 1)));
        c(0) -= w;
        c.tail(m - k - 1) -= w * x.tail(m - k - 1);
      }
    }
    const double r00 = steps > 0 ? std::abs(qr_(0, 0)) : 0.0;
    rank_ = 0;
    while (rank_ < steps && std::abs(qr_(rank_, rank_)) > rank_threshold * r00) ++rank_;
  }

  int rank() const { return rank_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const int m = static_cast<int>(qr_.rows()), n = static_cast<int>(qr_.cols());
    Eigen::VectorXd c = b;
    for (int k = 0; k < std::min(m, n); ++k) {
      if (beta_[k] == 0.0) continue;
      const auto v = qr_.col(k).segment(k + 1, m - k - 1);
      const double w = beta_[k] * (c(k) + v.dot(c.segment(k + 1, m - k - 1)));
      c(k) -= w;
      c.segment(k + 1, m - k - 1) -= w * v;
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    if (rank_ > 0)
      z.head(rank_) =
          qr_.topLeftCorner(rank_, rank_).triangularView<Eigen::Upper>().solve(c.head(rank_));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) x(perm_[k]) = z(k);
    return x;
  }

 private:
  static constexpr double kTieTolerance = 1e-9;
  Eigen::MatrixXd qr_;
  std::vector<int> perm_;
  std::vector<double> beta_;
  int rank_ = 0;
};

Eigen::VectorXd solve_checked(const BasicQR& qr, const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs, int d,
                              const char* what) {
  Eigen::VectorXd x = qr.solve(rhs);
  // One step of iterative refinement; it stays within the basic columns.
  x += qr.solve(rhs - A * x);
  const double res = (A * x - rhs).norm();
  if (!(res <= kResidualTol * std::max(1.0, rhs.norm()))) {
    std::ostringstream os;
    os << "stencil engine: ";
    if (d >= 0) os << "degree " << d << " ";
    os << what << " residual " << res << " (rhs norm " << rhs.norm()
       << ")";
    throw std::runtime_error(os.str());
  }
  return x;
}

}  // namespace

Eigen::MatrixXd engine_matrix(const std::vector<StencilColumn>& cols, const EngineSpec& spec, int d) {
  const int R = static_cast<int>(spec.row_degree.size());
  auto phi = build_phi(cols, R, spec.N);
  auto rows = active_rows(spec, d);
  Eigen::MatrixXd A(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) A.row(i) = phi[spec.row_degree[rows[i]]].row(rows[i]);
  return A;
}

namespace {

// All degrees at once: the unknowns C_0..C_D satisfy one block
// lower-triangular system whose degree-d block is A_d C_d = b_d(C_0..C_{d-1}),
// together with the checks for d > D. Fixed values are moved to the right;
// the remaining free parameters are zero (basic solution).
EngineResult solve_joint(const std::vector<Eigen::MatrixXd>& phi, const EngineSpec& spec, int n) {
  const int R = static_cast<int>(spec.row_degree.size());
  const int nu = n * (spec.D + 1);
  std::vector<Eigen::RowVectorXd> rows;
  for (int d = 0; d <= spec.N - 1; ++d)
    for (int r = 0; r < R; ++r) {
      const int dr = spec.row_degree[r];
      if (dr + d > spec.N - 1) continue;
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nu);
      for (int s = 0; s <= std::min(d, spec.D); ++s) row.segment(s * n, n) = phi[dr + d - s].row(r);
      rows.push_back(row);
    }
  Eigen::MatrixXd M(rows.size(), nu);
  for (size_t i = 0; i < rows.size(); ++i) M.row(i) = rows[i];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nu);
  std::vector<char> fixed(nu, 0);
  for (int d = 0; d <= spec.D; ++d)
    for (auto [j, val] : spec.policy[d].fixed) {
      fixed[d * n + j] = 1;
      x(d * n + j) = val;
      rhs -= M.col(d * n + j) * val;
    }
  std::vector<int> free_cols;
  for (int k = 0; k < nu; ++k)
    if (!fixed[k]) free_cols.push_back(k);
  Eigen::MatrixXd Mf(M.rows(), free_cols.size());
  for (size_t k = 0; k < free_cols.size(); ++k) Mf.col(k) = M.col(free_cols[k]);
  const BasicQR qr(Mf, kRankThreshold);
  const Eigen::VectorXd xf = solve_checked(qr, Mf, rhs, -1, "joint");
  for (size_t k = 0; k < free_cols.size(); ++k) x(free_cols[k]) = xf(k);
  EngineResult out;
  out.c = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, spec.D + 1);
  out.t.assign(spec.D + 1, 0.0);
  out.notes.push_back("degree-by-degree solve was inconsistent; solved all degrees jointly");
  return out;
}

EngineResult solve_sequential(const std::vector<Eigen::MatrixXd>& phi, const EngineSpec& spec, int n) {
  const int R = static_cast<int>(spec.row_degree.size());

  EngineResult out;
  out.c = Eigen::MatrixXd::Zero(n, spec.D + 1);
  out.t.assign(spec.D + 1, 0.0);

  // A degree-0 row whose lowest part is 1 at every column fixes the per-degree
  // sum: sum_j c(j,d) = b_d of that row, which depends on the lower degrees.
  int sum_row = -1;
  if (spec.sum_condition)
    for (int r = 0; r < R; ++r)
      if (spec.row_degree[r] == 0 && (phi[0].row(r).array() - 1.0).abs().maxCoeff() < 1e-12) {
        sum_row = r;
        break;
      }

  for (int d = 0; d <= spec.N - 1; ++d) {
    auto rows = active_rows(spec, d);
    if (rows.empty()) break;
    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    double bscale = 0.0;
    for (int i = 0; i < m; ++i) {
      const int r = rows[i], dr = spec.row_degree[r];
      A.row(i) = phi[dr].row(r);
      for (int s = 0; s < std::min(d, spec.D + 1); ++s) {
        const Eigen::RowVectorXd pr = phi[dr + d - s].row(r);
        b(i) -= pr.dot(out.c.col(s));
        bscale += pr.cwiseAbs().dot(out.c.col(s).cwiseAbs());
      }
    }
    if (d > spec.D) {
      if (!(b.lpNorm<Eigen::Infinity>() <= kResidualTol * std::max(1.0, bscale))) {
        std::ostringstream os;
        os << "stencil engine: vanishing C_" << d << " is inconsistent (residual " << b.lpNorm<Eigen::Infinity>()
           << ")";
        throw std::runtime_error(os.str());
      }
      continue;
    }

    const DegreePolicy& pol = spec.policy[d];
    std::vector<int> role(n, 0);  // 0 free, 1 fixed, 2 tied
    Eigen::VectorXd P = Eigen::VectorXd::Zero(n), Q = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rhs_p = b, rhs_q = Eigen::VectorXd::Zero(m);
    for (auto [j, val] : pol.fixed) {
      role[j] = 1;
      P(j) = val;
      rhs_p -= A.col(j) * val;
    }
    for (auto [j, ratio] : pol.tied) {
      role[j] = 2;
      Q(j) = ratio;
      rhs_q -= A.col(j) * ratio;
    }
    std::vector<int> free_cols;
    for (int j = 0; j < n; ++j)
      if (role[j] == 0) free_cols.push_back(j);
    if (!free_cols.empty()) {
      Eigen::MatrixXd Af(m, free_cols.size());
      for (size_t k = 0; k < free_cols.size(); ++k) Af.col(k) = A.col(free_cols[k]);
      const BasicQR qr(Af, kRankThreshold);
      Eigen::VectorXd xp = solve_checked(qr, Af, rhs_p, d, "particular");
      Eigen::VectorXd xq = Eigen::VectorXd::Zero(free_cols.size());
      if (!pol.tied.empty()) xq = solve_checked(qr, Af, rhs_q, d, "tied direction");
      for (size_t k = 0; k < free_cols.size(); ++k) {
        P(free_cols[k]) = xp(k);
        Q(free_cols[k]) = xq(k);
      }
    } else {
      const double res = std::max(rhs_p.norm(), rhs_q.norm());
      if (!(res <= kResidualTol * std::max(1.0, b.norm())))
        throw std::runtime_error("stencil engine: fully constrained degree " + std::to_string(d) +
                                 " is inconsistent");
    }

    double t = 0.0;
    if (!pol.tied.empty() && pol.maximize) {
      Eigen::VectorXd Pg = Eigen::VectorXd::Zero(spec.n_offsets), Qg = Eigen::VectorXd::Zero(spec.n_offsets);
      for (int j = 0; j < n; ++j) {
        Pg(spec.col_offset[j]) += P(j);
        Qg(spec.col_offset[j]) += Q(j);
      }
      const double qeps = 1e-12 * std::max(1.0, Qg.lpNorm<Eigen::Infinity>());
      // Constraints a + t q <= 0; t is the smallest upper bound, and the
      // slack only enters the feasibility check.
      std::vector<std::pair<double, double>> cons;
      for (int o = 0; o < spec.n_offsets; ++o) {
        if (o == spec.center_offset)
          cons.push_back({-Pg(o), -Qg(o)});
        else
          cons.push_back({Pg(o), Qg(o)});
      }
      if (spec.sum_condition) cons.push_back({-Pg.sum(), -Qg.sum()});
      // The sum at degree d+1 is affine in t through the sum row.
      if (sum_row >= 0 && d + 1 <= spec.D && d + 1 <= spec.N - 1) {
        double s0 = 0.0;
        for (int s = 0; s < d; ++s) s0 -= phi[d + 1 - s].row(sum_row).dot(out.c.col(s));
        s0 -= phi[1].row(sum_row).dot(P);
        const double s1 = -phi[1].row(sum_row).dot(Q);
        cons.push_back({-s0, -s1});
      }
      double upper = std::numeric_limits<double>::infinity();
      for (auto [a, q] : cons)
        if (q > qeps) upper = std::min(upper, -a / q);
      if (!std::isfinite(upper)) {
        out.feasible = false;
        out.notes.push_back("degree " + std::to_string(d) + ": no upper bound for the free parameter");
        upper = 0.0;
      }
      t = upper;
      const double slack =
          kSlack * std::max({1.0, Pg.lpNorm<Eigen::Infinity>(), std::abs(t) * Qg.lpNorm<Eigen::Infinity>()});
      for (auto [a, q] : cons)
        if (a + t * q > slack) {
          out.feasible = false;
          out.notes.push_back("degree " + std::to_string(d) + ": empty selection interval");
          break;
        }
    }
    out.t[d] = t;
    out.c.col(d) = P + t * Q;
  }
  return out;
}

}  // namespace

EngineResult solve_recursive(const std::vector<StencilColumn>& cols, const EngineSpec& spec) {
  const int n = static_cast<int>(cols.size());
  const int R = static_cast<int>(spec.row_degree.size());
  if (static_cast<int>(spec.policy.size()) != spec.D + 1)
    throw std::invalid_argument("stencil engine: one policy per solved degree is required");
  const auto phi = build_phi(cols, R, spec.N);
  try {
    return solve_sequential(phi, spec, n);
  } catch (const std::runtime_error&) {
    // A rank-deficient A_d can make the degree-d system inconsistent for the
    // lower-degree choice already made. Without tie rules the coupled system
    // is solved instead.
    for (const auto& pol : spec.policy)
      if (!pol.tied.empty()) throw;
    return solve_joint(phi, spec, n);
  }
}

Eigen::VectorXd StencilResult::rhs_weights(double h) const {
  const int ns = columns.empty() ? 0 : static_cast<int>(columns[0].data_forms.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(ns);
  for (size_t j = 0; j < columns.size(); ++j) {
    double Cj = 0.0;
    for (int p = static_cast<int>(column_c.cols()) - 1; p >= 0; --p) Cj = Cj * h + column_c(j, p);
    if (Cj == 0.0) continue;
    const double x = columns[j].v * h, y = columns[j].w * h;
    for (int s = 0; s < ns; ++s) w(s) += Cj * columns[j].data_forms[s](x, y);
  }
  return w;
}

StencilResult make_stencil(RecursiveSystem system) {
  EngineResult er = solve_recursive(system.columns, system.spec);
  StencilResult r;
  r.columns = std::move(system.columns);
  r.column_c = er.c;
  r.spec = system.spec;
  r.monotone = er.feasible;
  r.notes = std::move(er.notes);
  r.stencil.offsets = system.offsets;
  r.stencil.scale = system.scale;
  r.stencil.c = Eigen::MatrixXd::Zero(system.offsets.size(), er.c.cols());
  for (int j = 0; j < static_cast<int>(r.columns.size()); ++j) r.stencil.c.row(r.spec.col_offset[j]) += er.c.row(j);
  return r;
}

MMatrixReport check_m_matrix(const StencilPoly& s, double rel_tol) {
  MMatrixReport rep;
  const int center = s.find(0, 0);
  const double tol = rel_tol * std::max(1.0, s.c.cwiseAbs().maxCoeff());
  for (int p = 0; p <= s.D(); ++p) {
    double sum = 0.0;
    for (int j = 0; j < s.size(); ++j) {
      const double c = s.c(j, p);
      sum += c;
      if (j == center) {
        if (p == 0 ? !(c > tol) : (c < -tol)) rep.violations.push_back({s.offsets[j], p, "center sign"});
      } else if (c > tol) {
        rep.violations.push_back({s.offsets[j], p, "off-center sign"});
      }
    }
    if (sum < -tol) rep.violations.push_back({{0, 0}, p, "row sum"});
  }
  if (center < 0) rep.violations.push_back({{0, 0}, 0, "missing center"});
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace hoif
