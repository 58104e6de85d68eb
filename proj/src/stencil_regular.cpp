#include "hoif/stencil_regular.hpp"

#include <stdexcept>

namespace hoif {

const std::vector<Index2>& regular_offsets() {
  static const std::vector<Index2> off = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 0},
                                          {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  return off;
}

RecursiveSystem assemble_regular_system(const GHPolys& gh) {
  if (gh.K != 7 || gh.transposed) throw std::invalid_argument("regular stencil needs the K=7 reduction");
  RecursiveSystem sys;
  sys.offsets = regular_offsets();
  sys.scale = 2;
  for (auto [k, l] : sys.offsets) {
    StencilColumn c;
    c.offset = {k, l};
    c.v = k;
    c.w = l;
    c.u_forms = gh.G;
    c.data_forms = gh.H;
    sys.columns.push_back(std::move(c));
  }

  EngineSpec& sp = sys.spec;
  sp.N = 8;
  sp.D = 6;
  for (const auto& [m, n] : lambda_sets(7).band.members) sp.row_degree.push_back(m + n);
  for (int j = 0; j < 9; ++j) sp.col_offset.push_back(j);
  sp.n_offsets = 9;
  sp.center_offset = regular_col(0, 0);
  sp.sum_condition = false;

  const int c11 = regular_col(1, 1), c10 = regular_col(1, 0), c1m = regular_col(1, -1);
  const int c01 = regular_col(0, 1), c00 = regular_col(0, 0), cm1 = regular_col(-1, 1);
  sp.policy.resize(7);
  sp.policy[0].fixed = {{c11, -1.0}};
  for (int d = 1; d <= 3; ++d) sp.policy[d].tied = {{c11, 1.0}};
  sp.policy[4].tied = {{c10, 1.0}, {c11, 1.0}};
  sp.policy[5].tied = {{c01, 1.0}, {c1m, 1.0}, {c10, 1.0}, {c11, 1.0}};
  sp.policy[6].tied = {{cm1, 1.0}, {c00, -8.0}, {c01, 1.0}, {c1m, 1.0}, {c10, 1.0}, {c11, 1.0}};
  for (int d = 1; d <= 6; ++d) sp.policy[d].maximize = true;
  return sys;
}

StencilResult solve_regular_stencil(const RecursiveSystem& system) { return make_stencil(system); }

StencilResult regular_stencil(const Jet2& a) {
  return solve_regular_stencil(assemble_regular_system(build_GH_polynomials(build_reduction_table(a, 7))));
}

}  // namespace hoif
