#include "hoif/stencil_boundary.hpp"

#include <stdexcept>

namespace hoif {

Frame boundary_frame(BoundaryId id) {
  switch (id) {
    case BoundaryId::Left:
    case BoundaryId::CornerLB:
      return {{1, 0, 0, 1}};
    case BoundaryId::Right:
    case BoundaryId::CornerRB:
      return {{-1, 0, 0, 1}};
    case BoundaryId::Bottom:
      return {{0, 1, 1, 0}};
    case BoundaryId::Top:
      return {{0, 1, -1, 0}};
    case BoundaryId::CornerLT:
      return {{1, 0, 0, -1}};
    case BoundaryId::CornerRT:
      return {{-1, 0, 0, -1}};
  }
  return {};
}

bool is_corner(BoundaryId id) {
  return id == BoundaryId::CornerLB || id == BoundaryId::CornerRB || id == BoundaryId::CornerLT ||
         id == BoundaryId::CornerRT;
}

const std::vector<Index2>& edge_offsets() {
  static const std::vector<Index2> off = {{0, -1}, {0, 0}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
  return off;
}

const std::vector<Index2>& corner_offsets() {
  static const std::vector<Index2> off = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  return off;
}

namespace {

constexpr int kM = 6;

void require_jet(const std::vector<double>& d, const char* name) {
  if (static_cast<int>(d.size()) < kM) throw std::invalid_argument(std::string(name) + " needs derivatives 0..5");
}

// sum_{i=n}^{M-1} C(i,n) coef^{(i-n)} F(i) added to base (skipped for n = M).
template <class F>
Poly2 robin_combination(const Poly2& base, int n, const std::vector<double>& coef, F&& term) {
  Poly2 r = base;
  if (n < kM)
    for (int i = n; i <= kM - 1; ++i) r.axpy(binomial(i, n) * coef[i - n], term(i));
  return r;
}

}  // namespace

std::vector<Poly2> build_edge_basis(const GHPolys& gh6, const std::vector<double>& alpha) {
  if (gh6.K != kM || gh6.transposed) throw std::invalid_argument("edge basis needs the K=6 reduction");
  require_jet(alpha, "alpha");
  std::vector<Poly2> E;
  for (int n = 0; n <= kM; ++n)
    E.push_back(robin_combination(gh6.g(0, n), n, alpha, [&](int i) -> const Poly2& { return gh6.g(1, i); }));
  return E;
}

RecursiveSystem assemble_edge_system(const GHPolys& gh6, const std::vector<Poly2>& E) {
  RecursiveSystem sys;
  sys.offsets = edge_offsets();
  sys.scale = 1;
  for (auto [k, l] : sys.offsets) {
    StencilColumn c;
    c.offset = {k, l};
    c.v = k;
    c.w = l;
    c.u_forms = E;
    c.data_forms = gh6.H;
    for (int n = 0; n <= kM - 1; ++n) {
      Poly2 g(kM);
      g.axpy(-1.0, gh6.g(1, n));
      c.data_forms.push_back(g);
    }
    sys.columns.push_back(std::move(c));
  }
  EngineSpec& sp = sys.spec;
  sp.N = 7;
  sp.D = 6;
  for (int n = 0; n <= kM; ++n) sp.row_degree.push_back(n);
  sp.col_offset = {0, 1, 2, 3, 4, 5};
  sp.n_offsets = 6;
  sp.center_offset = 1;
  sp.sum_condition = true;
  // columns: 0 (0,-1) 1 (0,0) 2 (0,1) 3 (1,-1) 4 (1,0) 5 (1,1)
  sp.policy.resize(7);
  sp.policy[0].fixed = {{5, -1.0}};
  sp.policy[1].tied = {{5, 1.0}};
  sp.policy[2].tied = {{5, 1.0}};
  sp.policy[3].tied = {{4, 1.0}, {5, 1.0}};
  sp.policy[4].tied = {{3, 1.0}, {4, 1.0}, {5, 1.0}};
  sp.policy[5].tied = {{2, 1.0}, {3, 1.0}, {4, 1.0}, {5, 1.0}};
  sp.policy[6].fixed = {{2, 0.0}, {3, 0.0}, {4, 0.0}};
  sp.policy[6].tied = {{1, -2.0}, {5, 1.0}};
  for (int d = 1; d <= 6; ++d) sp.policy[d].maximize = true;
  return sys;
}

StencilResult solve_edge_stencil(const Jet2& a, const std::vector<double>& alpha) {
  GHPolys gh = build_GH_polynomials(build_reduction_table(a, kM));
  StencilResult r = make_stencil(assemble_edge_system(gh, build_edge_basis(gh, alpha)));
  if (alpha[0] < 0.0) {
    r.monotone = false;
    r.notes.push_back("alpha < 0 at the anchor: sum condition cannot hold");
  }
  return r;
}

CornerReduction build_corner_reduction(const Jet2& a, const std::vector<double>& alpha,
                                       const std::vector<double>& beta) {
  require_jet(alpha, "alpha");
  require_jet(beta, "beta");
  CornerReduction red;
  red.alpha = alpha;
  red.beta = beta;
  ReductionTable T = build_reduction_table(a, kM);
  ReductionTable Tt = transpose_reduction_table(a, kM);
  red.gh = build_GH_polynomials(T);
  red.ght = build_GH_polynomials(Tt);
  const int nf = tri_size(kM - 2);
  red.lambda = Eigen::MatrixXd::Zero(kM + 1, kM + 1);
  red.mu = Eigen::MatrixXd::Zero(kM + 1, kM);
  red.nu = Eigen::MatrixXd::Zero(kM + 1, nf);
  for (int m = 0; m <= kM; ++m) {
    for (int n = 0; n <= kM; ++n) red.lambda(m, n) = T.au(m, 0, 0, n);
    for (int n = 0; n <= kM - 1; ++n) red.mu(m, n) = T.au(m, 0, 1, n);
    for (int s = 0; s < nf; ++s) {
      auto [i, j] = tri_member(s);
      red.nu(m, s) = T.af(m, 0, i, j);
    }
  }
  red.p = red.lambda;
  for (int m = 0; m <= kM; ++m)
    for (int n = 0; n <= kM - 1; ++n)
      for (int i = n; i <= kM - 1; ++i) red.p(m, n) += binomial(i, n) * alpha[i - n] * red.mu(m, i);

  red.E = build_edge_basis(red.gh, alpha);
  for (int m = 0; m <= kM; ++m)
    red.Et.push_back(
        robin_combination(red.ght.g(m, 0), m, beta, [&](int i) -> const Poly2& { return red.ght.g(i, 1); }));
  return red;
}

RecursiveSystem assemble_corner_system(const CornerReduction& red) {
  const int nf = tri_size(kM - 2);
  // Tilde forms are shared by the four tilde columns.
  std::vector<Poly2> tilde_u(kM + 1, Poly2(kM));
  for (int n = 0; n <= kM; ++n)
    for (int m = 0; m <= kM; ++m) tilde_u[n].axpy(red.p(m, n), red.Et[m]);
  std::vector<Poly2> tilde_data;
  for (int s = 0; s < nf; ++s) {
    Poly2 q = red.ght.H[s];
    for (int m = 0; m <= kM; ++m) q.axpy(red.nu(m, s), red.Et[m]);
    tilde_data.push_back(q);
  }
  for (int n = 0; n <= kM - 1; ++n) {
    Poly2 q(kM);
    for (int m = 0; m <= kM; ++m) q.axpy(-red.mu(m, n), red.Et[m]);
    tilde_data.push_back(q);
  }
  for (int m = 0; m <= kM - 1; ++m) {
    Poly2 q(kM);
    q.axpy(-1.0, red.ght.g(m, 1));
    tilde_data.push_back(q);
  }
  std::vector<Poly2> hat_data = red.gh.H;
  for (int n = 0; n <= kM - 1; ++n) {
    Poly2 q(kM);
    q.axpy(-1.0, red.gh.g(1, n));
    hat_data.push_back(q);
  }
  for (int m = 0; m <= kM - 1; ++m) hat_data.push_back(Poly2(kM));

  RecursiveSystem sys;
  sys.offsets = corner_offsets();
  sys.scale = 1;
  for (int half = 0; half < 2; ++half)
    for (auto [k, l] : sys.offsets) {
      StencilColumn c;
      c.offset = {k, l};
      c.v = k;
      c.w = l;
      c.u_forms = half == 0 ? red.E : tilde_u;
      c.data_forms = half == 0 ? hat_data : tilde_data;
      sys.columns.push_back(std::move(c));
    }

  EngineSpec& sp = sys.spec;
  sp.N = 7;
  sp.D = 6;
  for (int n = 0; n <= kM; ++n) sp.row_degree.push_back(n);
  sp.col_offset = {0, 1, 2, 3, 0, 1, 2, 3};
  sp.n_offsets = 4;
  sp.center_offset = 0;
  sp.sum_condition = true;
  // hat: 0 (0,0) 1 (0,1) 2 (1,0) 3 (1,1); tilde: 4 (0,0) 5 (0,1) 6 (1,0) 7 (1,1)
  sp.policy.resize(7);
  sp.policy[0].fixed = {{7, -1.0}, {4, 0.0}, {6, 0.0}};
  sp.policy[1].fixed = {{4, 0.0}, {6, 0.0}};
  sp.policy[1].tied = {{7, 1.0}};
  sp.policy[2] = sp.policy[1];
  sp.policy[3].fixed = {{4, 0.0}, {6, 0.0}};
  sp.policy[3].tied = {{5, 1.0}, {7, 1.0}};
  sp.policy[4].fixed = {{4, 0.0}, {6, 0.0}};
  sp.policy[4].tied = {{3, 1.0}, {5, 2.0}, {7, 1.0}};
  sp.policy[5].fixed = {{4, 0.0}};
  sp.policy[5].tied = {{2, 1.0}, {3, 1.0}, {6, 1.0}, {7, 1.0}, {5, 3.0}};
  sp.policy[6].fixed = {{4, 0.0}};
  sp.policy[6].tied = {{1, 1.0}, {2, 1.0}, {3, 1.0}, {5, 1.0}, {6, 1.0}, {7, 1.0}};
  for (int d = 1; d <= 6; ++d) sp.policy[d].maximize = true;
  return sys;
}

StencilResult solve_corner_stencil(const CornerReduction& red) {
  StencilResult r = make_stencil(assemble_corner_system(red));
  if (red.alpha[0] + red.beta[0] < 0.0) {
    r.monotone = false;
    r.notes.push_back("alpha + beta < 0 at the corner: sum condition cannot hold");
  }
  return r;
}

StencilPoly map_by_reflection(const StencilPoly& canonical, BoundaryId id) {
  const Frame F = boundary_frame(id);
  StencilPoly s = canonical;
  for (auto& o : s.offsets) o = F.apply(o);
  return s;
}

StencilPoly dirichlet_row() {
  StencilPoly s;
  s.offsets = {{0, 0}};
  s.c = Eigen::MatrixXd::Ones(1, 1);
  s.scale = 0;
  return s;
}

}  // namespace hoif
