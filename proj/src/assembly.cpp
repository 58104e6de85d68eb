#include "hoif/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseLU>
#include <omp.h>

#include "hoif/stencil_regular.hpp"

namespace hoif {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string where(const Grid& g, int i, int j) {
  std::ostringstream os;
  os << "(" << g.x(i) << ", " << g.y(j) << ")";
  return os.str();
}

MlsOperator make_operator(const std::vector<Eigen::Vector2d>& offsets, int dim, int degree, double h,
                          double htilde, const std::vector<Index2>& requests) {
  MlsProblem p;
  p.dim = dim;
  p.samples = offsets;
  p.center = Eigen::Vector2d::Zero();
  p.degree = degree;
  p.h = h;
  p.htilde = htilde;
  return MlsOperator(p, requests);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

BoundaryId edge_id(int side) {
  switch (side) {
    case kLeft: return BoundaryId::Left;
    case kRight: return BoundaryId::Right;
    case kBottom: return BoundaryId::Bottom;
    default: return BoundaryId::Top;
  }
}

BoundaryId corner_id(int vertical, int horizontal) {
  if (vertical == kLeft) return horizontal == kBottom ? BoundaryId::CornerLB : BoundaryId::CornerLT;
  return horizontal == kBottom ? BoundaryId::CornerRB : BoundaryId::CornerRT;
}

}  // namespace

const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::Regular: return "regular";
    case RowKind::Irregular: return "irregular";
    case RowKind::Edge: return "edge";
    case RowKind::Corner: return "corner";
    case RowKind::Dirichlet: return "dirichlet";
  }
  return "?";
}

// ---------------------------------------------------------------- row builder

RowBuilder::RowBuilder(const Problem& problem, int J)
    : problem_(std::make_shared<const Problem>(problem)), geo_(problem.geometry()), jumps_(problem.jumps()) {
  const auto& d = problem.spec().domain;
  grid_ = Grid::make(d[0], d[1], d[2], d[3], J);
  cls_ = classify_grid(grid_, geo_);
  if (geo_.present() && cls_.n_irregular > 0) sampler_ = std::make_unique<CurveSampler>(geo_, grid_.h);

  const double h = grid_.h;
  {
    const SamplingRecipe r = sampling_recipe(MlsContext::RegularInterior, h);
    regular_.a = make_operator(r.offsets, 2, r.degree_a, h, r.htilde, all_derivatives_2d(6));
    regular_.f = make_operator(r.offsets, 2, r.degree_f, h, r.htilde, all_derivatives_2d(5));
  }
  {
    const SamplingRecipe r = sampling_recipe(MlsContext::EdgeBoundary, h);
    edge_.a = make_operator(r.offsets, 2, r.degree_a, h, r.htilde, all_derivatives_2d(5));
    edge_.f = make_operator(r.offsets, 2, r.degree_f, h, r.htilde, all_derivatives_2d(4));
    const SamplingRecipe r1 = sampling_recipe(MlsContext::EdgeBoundary1d, h);
    edge_.side1 = make_operator(r1.offsets, 1, r1.degree_a, h, r1.htilde, all_derivatives_1d(5));
  }
  {
    const SamplingRecipe r = sampling_recipe(MlsContext::CornerBoundary, h);
    corner_.a = make_operator(r.offsets, 2, r.degree_a, h, r.htilde, all_derivatives_2d(5));
    corner_.f = make_operator(r.offsets, 2, r.degree_f, h, r.htilde, all_derivatives_2d(4));
    const SamplingRecipe r1 = sampling_recipe(MlsContext::CornerBoundary1d, h);
    corner_.side1 = make_operator(r1.offsets, 1, r1.degree_a, h, r1.htilde, all_derivatives_1d(5));
    corner_.side2 = corner_.side1;
  }
}

RowKind RowBuilder::kind(int i, int j) const {
  const Grid& g = grid_;
  const int idx = g.index(i, j);
  switch (cls_.label[idx]) {
    case PointLabel::RegularInterior: return RowKind::Regular;
    case PointLabel::Irregular: return RowKind::Irregular;
    case PointLabel::BoundaryEdge: {
      const int side = (i == 0) ? kLeft : (i == g.N1) ? kRight : (j == 0) ? kBottom : kTop;
      return problem_->boundary_type(side) == BoundaryType::Robin ? RowKind::Edge : RowKind::Dirichlet;
    }
    case PointLabel::BoundaryCorner: {
      const int v = (i == 0) ? kLeft : kRight, hz = (j == 0) ? kBottom : kTop;
      const bool rr = problem_->boundary_type(v) == BoundaryType::Robin &&
                      problem_->boundary_type(hz) == BoundaryType::Robin;
      return rr ? RowKind::Corner : RowKind::Dirichlet;
    }
  }
  return RowKind::Regular;
}

AssembledRow RowBuilder::build(int i, int j, ChartKind chart) const {
  const Grid& g = grid_;
  const int idx = g.index(i, j);
  switch (cls_.label[idx]) {
    case PointLabel::RegularInterior:
      return build_regular(i, j);
    case PointLabel::Irregular:
      return build_irregular(i, j, chart);
    case PointLabel::BoundaryEdge: {
      const int side = (i == 0) ? kLeft : (i == g.N1) ? kRight : (j == 0) ? kBottom : kTop;
      if (problem_->boundary_type(side) == BoundaryType::Dirichlet) return build_dirichlet(i, j, side);
      if (cls_.straddle[idx])
        throw std::runtime_error("assembly: Robin boundary stencil at " + where(g, i, j) + " crosses the interface");
      return build_edge(i, j, side);
    }
    case PointLabel::BoundaryCorner: {
      const int v = (i == 0) ? kLeft : kRight, hz = (j == 0) ? kBottom : kTop;
      const bool rv = problem_->boundary_type(v) == BoundaryType::Robin;
      const bool rh = problem_->boundary_type(hz) == BoundaryType::Robin;
      if (rv && rh) {
        if (cls_.straddle[idx])
          throw std::runtime_error("assembly: Robin corner stencil at " + where(g, i, j) + " crosses the interface");
        return build_corner(i, j, v, hz);
      }
      return build_dirichlet(i, j, rv ? hz : v);
    }
  }
  throw std::logic_error("assembly: unknown point label");
}

void RowBuilder::finish(AssembledRow& row, int i, int j, const StencilPoly& stencil, double rhs_raw) const {
  const double h = grid_.h;
  const double s = std::pow(h, -stencil.scale);
  row.scale = stencil.scale;
  row.stencil = stencil;
  row.entries.clear();
  for (int k = 0; k < stencil.size(); ++k) {
    const auto [di, dj] = stencil.offsets[k];
    if (!grid_.inside(i + di, j + dj))
      throw std::runtime_error("assembly: stencil of " + where(grid_, i, j) + " leaves the grid");
    row.entries.emplace_back(grid_.index(i + di, j + dj), s * stencil.eval(k, h));
  }
  std::sort(row.entries.begin(), row.entries.end());
  row.rhs = s * rhs_raw;
}

AssembledRow RowBuilder::build_dirichlet(int i, int j, int side) const {
  AssembledRow row;
  row.kind = RowKind::Dirichlet;
  finish(row, i, j, dirichlet_row(), problem_->boundary_g(side, grid_.x(i), grid_.y(j)));
  return row;
}

AssembledRow RowBuilder::build_regular(int i, int j) const {
  const double x0 = grid_.x(i), y0 = grid_.y(j);
  const Problem& P = *problem_;
  const Side s = P.side(x0, y0);
  const SamplingRecipe r = sampling_recipe(MlsContext::RegularInterior, grid_.h);
  const int K = static_cast<int>(r.offsets.size());
  Eigen::VectorXd av(K), fv(K);
  for (int k = 0; k < K; ++k) {
    const double x = x0 + r.offsets[k].x(), y = y0 + r.offsets[k].y();
    av(k) = P.a(s, x, y);
    fv(k) = P.f(s, x, y);
  }
  const Jet2 a = Jet2::from_derivatives(x0, y0, 6, to_std(regular_.a.apply(av)));
  const Eigen::VectorXd f = regular_.f.apply(fv);
  const StencilResult st = regular_stencil(a);
  AssembledRow row;
  row.kind = RowKind::Regular;
  row.monotone = st.monotone;
  row.mls_condition = std::max(regular_.a.condition_estimate(), regular_.f.condition_estimate());
  finish(row, i, j, st.stencil, st.rhs_weights(grid_.h).dot(f));
  return row;
}

AssembledRow RowBuilder::build_edge(int i, int j, int side) const {
  const double x0 = grid_.x(i), y0 = grid_.y(j), h = grid_.h;
  const Problem& P = *problem_;
  const BoundaryId id = edge_id(side);
  const Frame F = boundary_frame(id);
  const Side s = P.side(x0, y0);

  const SamplingRecipe r = sampling_recipe(MlsContext::EdgeBoundary, h);
  const int K = static_cast<int>(r.offsets.size());
  Eigen::VectorXd av(K), fv(K);
  for (int k = 0; k < K; ++k) {
    const auto d = F.apply(r.offsets[k].x(), r.offsets[k].y());
    av(k) = P.a(s, x0 + d[0], y0 + d[1]);
    fv(k) = P.f(s, x0 + d[0], y0 + d[1]);
  }
  const SamplingRecipe r1 = sampling_recipe(MlsContext::EdgeBoundary1d, h);
  const int K1 = static_cast<int>(r1.offsets.size());
  Eigen::VectorXd alv(K1), gv(K1);
  for (int k = 0; k < K1; ++k) {
    const auto d = F.apply(0.0, r1.offsets[k].x());
    alv(k) = P.alpha(side, x0 + d[0], y0 + d[1]);
    gv(k) = P.boundary_g(side, x0 + d[0], y0 + d[1]);
  }
  const Jet2 a = Jet2::from_derivatives(0.0, 0.0, 5, to_std(edge_.a.apply(av)));
  const StencilResult st = solve_edge_stencil(a, to_std(edge_.side1.apply(alv)));

  Eigen::VectorXd data(15 + 6);
  data << edge_.f.apply(fv), edge_.side1.apply(gv);
  AssembledRow row;
  row.kind = RowKind::Edge;
  row.monotone = st.monotone;
  row.mls_condition = std::max({edge_.a.condition_estimate(), edge_.f.condition_estimate(),
                                edge_.side1.condition_estimate()});
  finish(row, i, j, map_by_reflection(st.stencil, id), st.rhs_weights(h).dot(data));
  return row;
}

AssembledRow RowBuilder::build_corner(int i, int j, int vertical, int horizontal) const {
  const double x0 = grid_.x(i), y0 = grid_.y(j), h = grid_.h;
  const Problem& P = *problem_;
  const BoundaryId id = corner_id(vertical, horizontal);
  const Frame F = boundary_frame(id);
  const Side s = P.side(x0, y0);

  const SamplingRecipe r = sampling_recipe(MlsContext::CornerBoundary, h);
  const int K = static_cast<int>(r.offsets.size());
  Eigen::VectorXd av(K), fv(K);
  for (int k = 0; k < K; ++k) {
    const auto d = F.apply(r.offsets[k].x(), r.offsets[k].y());
    av(k) = P.a(s, x0 + d[0], y0 + d[1]);
    fv(k) = P.f(s, x0 + d[0], y0 + d[1]);
  }
  // Canonical X = 0 is the vertical side (alpha, g1, along Y); Y = 0 the
  // horizontal side (beta, g3, along X).
  const SamplingRecipe r1 = sampling_recipe(MlsContext::CornerBoundary1d, h);
  const int K1 = static_cast<int>(r1.offsets.size());
  Eigen::VectorXd alv(K1), g1v(K1), bev(K1), g3v(K1);
  for (int k = 0; k < K1; ++k) {
    const double t = r1.offsets[k].x();
    const auto dv = F.apply(0.0, t), dh = F.apply(t, 0.0);
    alv(k) = P.alpha(vertical, x0 + dv[0], y0 + dv[1]);
    g1v(k) = P.boundary_g(vertical, x0 + dv[0], y0 + dv[1]);
    bev(k) = P.alpha(horizontal, x0 + dh[0], y0 + dh[1]);
    g3v(k) = P.boundary_g(horizontal, x0 + dh[0], y0 + dh[1]);
  }
  const Jet2 a = Jet2::from_derivatives(0.0, 0.0, 5, to_std(corner_.a.apply(av)));
  const CornerReduction red =
      build_corner_reduction(a, to_std(corner_.side1.apply(alv)), to_std(corner_.side2.apply(bev)));
  const StencilResult st = solve_corner_stencil(red);

  Eigen::VectorXd data(15 + 6 + 6);
  data << corner_.f.apply(fv), corner_.side1.apply(g1v), corner_.side2.apply(g3v);
  AssembledRow row;
  row.kind = RowKind::Corner;
  row.monotone = st.monotone;
  row.mls_condition = std::max({corner_.a.condition_estimate(), corner_.f.condition_estimate(),
                                corner_.side1.condition_estimate()});
  finish(row, i, j, map_by_reflection(st.stencil, id), st.rhs_weights(h).dot(data));
  return row;
}

AssembledRow RowBuilder::build_irregular(int i, int j, ChartKind chart) const {
  const double h = grid_.h;
  const Problem& P = *problem_;
  const Eigen::Vector2d node(grid_.x(i), grid_.y(j));
  const BasePoint base = sampler_->project(node);
  const CurveJet cj = estimate_curve_jet(geo_, jumps_, base, node, h, chart);

  // One-sided fits about the base point: a of degree 4, f of degree 3, from
  // the lattice points on each side (the doubled lattice if the fit is
  // ill-conditioned).
  struct SideFit {
    Jet2 a;
    Eigen::VectorXd f;
    double cond = 1.0;
  };
  const SamplingRecipe rec = sampling_recipe(MlsContext::IrregularInterface, h);
  auto fit = [&](Side s) {
    std::string last;
    for (double widen : {1.0, 2.0}) {
      std::vector<Eigen::Vector2d> off;
      std::vector<double> av, fv;
      for (const auto& o : rec.offsets) {
        const Eigen::Vector2d q = base.point + widen * o;
        if ((P.psi(q.x(), q.y()) > 0.0) != (s == Side::Plus)) continue;
        off.push_back(widen * o);
        av.push_back(P.a(s, q.x(), q.y()));
        fv.push_back(P.f(s, q.x(), q.y()));
      }
      try {
        const MlsOperator oa = make_operator(off, 2, rec.degree_a, widen * h, widen * rec.htilde, all_derivatives_2d(4));
        const MlsOperator of = make_operator(off, 2, rec.degree_f, widen * h, widen * rec.htilde, all_derivatives_2d(3));
        const Eigen::Map<const Eigen::VectorXd> A(av.data(), av.size()), Fv(fv.data(), fv.size());
        SideFit out;
        out.a = Jet2::from_derivatives(base.point.x(), base.point.y(), 4, to_std(oa.apply(A)));
        out.f = of.apply(Fv);
        out.cond = std::max(oa.condition_estimate(), of.condition_estimate());
        return out;
      } catch (const std::runtime_error& e) {
        last = e.what();
      }
    }
    throw std::runtime_error("assembly: one-sided fit at " + where(grid_, i, j) + " failed: " + last);
  };
  const SideFit fp = fit(Side::Plus), fm = fit(Side::Minus);

  const InterfaceReduction red = build_interface_reduction(fp.a, fm.a);
  const TransmissionTable T = build_transmission(cj, red);
  const auto sides = irregular_sides(grid_, geo_.psi, i, j);
  const StencilResult st = solve_irregular_stencil(assemble_irregular_system(sides, cj.v0, cj.w0, red, T));

  Eigen::VectorXd data(tsym::data_count);
  data.segment(tsym::fplus0 - tsym::kBand, tsym::kF) = fp.f;
  data.segment(tsym::fminus0 - tsym::kBand, tsym::kF) = fm.f;
  for (int p = 0; p < tsym::kG; ++p) data(tsym::g0 - tsym::kBand + p) = cj.g[p];
  for (int p = 0; p < tsym::kGG; ++p) data(tsym::gg0 - tsym::kBand + p) = cj.g_gamma[p];

  AssembledRow row;
  row.kind = RowKind::Irregular;
  row.monotone = st.monotone;
  row.mls_condition = std::max(fp.cond, fm.cond);
  finish(row, i, j, st.stencil, st.rhs_weights(h).dot(data));
  return row;
}

// ---------------------------------------------------------------- global system

GlobalSystem assemble(const Problem& problem, int J, const AssemblyOptions& options) {
  const RowBuilder builder(problem, J);
  const Grid& g = builder.grid();
  const int n = g.size();

  std::vector<int> irregular, other;
  for (int j = 0; j <= g.N2; ++j)
    for (int i = 0; i <= g.N1; ++i)
      (builder.kind(i, j) == RowKind::Irregular ? irregular : other).push_back(g.index(i, j));

  std::vector<AssembledRow> rows(n);
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
  auto run = [&](const std::vector<int>& list) {
    const int m = static_cast<int>(list.size());
    std::string error;
    auto one = [&](int k) {
      const int idx = list[k];
      const int i = idx % (g.N1 + 1), j = idx / (g.N1 + 1);
      rows[idx] = builder.build(i, j);
    };
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
      for (int k = 0; k < m; ++k) {
        try {
          one(k);
        } catch (const std::exception& e) {
#pragma omp critical(hoif_assembly_error)
          if (error.empty()) error = e.what();
        }
      }
    } else {
      for (int k = 0; k < m; ++k) one(k);
    }
    if (!error.empty()) throw std::runtime_error(error);
  };

  GlobalSystem sys;
  sys.grid = g;
  sys.n_irregular = static_cast<int>(irregular.size());
  auto t0 = Clock::now();
  run(other);
  sys.seconds_regular = seconds_since(t0);
  t0 = Clock::now();
  run(irregular);
  sys.seconds_irregular = seconds_since(t0);

  t0 = Clock::now();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * 13);
  sys.b.resize(n);
  sys.kind.resize(n);
  sys.scale.resize(n);
  sys.monotone.resize(n);
  sys.stencils.resize(n);
  for (int r = 0; r < n; ++r) {
    AssembledRow& row = rows[r];
    for (const auto& [c, v] : row.entries) trip.emplace_back(r, c, v);
    sys.b(r) = row.rhs;
    sys.kind[r] = row.kind;
    sys.scale[r] = static_cast<signed char>(row.scale);
    sys.monotone[r] = row.monotone ? 1 : 0;
    sys.max_mls_condition = std::max(sys.max_mls_condition, row.mls_condition);
    sys.stencils[r] = std::move(row.stencil);
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  sys.seconds_form = seconds_since(t0);
  return sys;
}

SolveReport solve(const GlobalSystem& system) {
  const auto t0 = Clock::now();
  const Eigen::SparseMatrix<double> A = system.A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve: sparse LU failed: " + lu.lastErrorMessage());

  SolveReport rep;
  rep.u = lu.solve(system.b);
  const double bn = std::max(system.b.norm(), std::numeric_limits<double>::min());
  Eigen::VectorXd r = system.b - A * rep.u;
  rep.residual = r.norm() / bn;
  // A few refinement steps recover accuracy lost to the h^-2 / h^-1 / 1 row scales.
  for (int it = 0; it < 3 && rep.residual > 1e-14; ++it) {
    const Eigen::VectorXd du = lu.solve(r);
    const Eigen::VectorXd cand = rep.u + du;
    const Eigen::VectorXd rc = system.b - A * cand;
    const double res = rc.norm() / bn;
    if (!(res < rep.residual)) break;
    rep.u = cand;
    r = rc;
    rep.residual = res;
  }
  rep.seconds = seconds_since(t0);
  if (!(rep.residual <= 1e-10)) {
    std::ostringstream os;
    os << "solve: relative residual " << rep.residual << " exceeds 1e-10";
    throw std::runtime_error(os.str());
  }
  return rep;
}

MMatrixAudit audit_m_matrix(const GlobalSystem& system) {
  MMatrixAudit out;
  const int n = static_cast<int>(system.kind.size());
  for (int r = 0; r < n; ++r) {
    const RowKind k = system.kind[r];
    if (k == RowKind::Irregular) {
      ++out.irregular;
      continue;
    }
    ++out.checked;
    if (k != RowKind::Dirichlet) {
      MMatrixReport rep = check_m_matrix(system.stencils[r]);
      if (!rep.pass) {
        ++out.failed;
        out.failures.push_back({r, k, std::move(rep)});
      }
    }
    double diag = 0.0, off_max = -INFINITY, scale = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(system.A, r); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
      if (it.col() == r)
        diag = it.value();
      else
        off_max = std::max(off_max, it.value());
    }
    // Entries assembled from exactly zero per-degree coefficients may carry
    // rounding of relative size 1e-13.
    if (!(diag > 0.0) || off_max > 1e-13 * scale) {
      out.matrix_signs = false;
      ++out.matrix_sign_failures;
    }
  }
  return out;
}

}  // namespace hoif
