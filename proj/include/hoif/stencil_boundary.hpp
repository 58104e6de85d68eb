#pragma once

#include <array>

#include "hoif/stencil_core.hpp"

namespace hoif {

// Stencils are built in a canonical frame: the edge lies on X=0 with the
// domain at X>0, and a corner sits at the origin with the domain in the first
// quadrant. The Robin condition on X=0 reads -u_X + alpha u = g1 and on Y=0
// -u_Y + beta u = g3. alpha, beta, g1, g3 enter through their derivatives
// along the respective side, orders 0..5.

enum class BoundaryId { Left, Right, Bottom, Top, CornerLB, CornerRB, CornerLT, CornerRT };

// actual offset = S * canonical offset, S a signed permutation.
struct Frame {
  std::array<int, 4> s{1, 0, 0, 1};  // row-major 2x2
  Index2 apply(Index2 kl) const {
    return {s[0] * kl.first + s[1] * kl.second, s[2] * kl.first + s[3] * kl.second};
  }
  std::array<double, 2> apply(double X, double Y) const {
    return {s[0] * X + s[1] * Y, s[2] * X + s[3] * Y};
  }
};

Frame boundary_frame(BoundaryId id);
bool is_corner(BoundaryId id);

// Offsets (0,-1),(0,0),(0,1),(1,-1),(1,0),(1,1).
const std::vector<Index2>& edge_offsets();
// Offsets (0,0),(0,1),(1,0),(1,1).
const std::vector<Index2>& corner_offsets();

// E_n, n = 0..6, from a K=6 reduction and alpha^{(0..5)}.
std::vector<Poly2> build_edge_basis(const GHPolys& gh6, const std::vector<double>& alpha);

// Rows E_0..E_6; data symbols f^{(m,n)}, m+n <= 4 (15, triangular order),
// then g1^{(0..5)}.
RecursiveSystem assemble_edge_system(const GHPolys& gh6, const std::vector<Poly2>& E);
StencilResult solve_edge_stencil(const Jet2& a, const std::vector<double>& alpha);

struct CornerReduction {
  GHPolys gh;    // x-band polynomials G, H
  GHPolys ght;   // transposed (tilde) polynomials
  Eigen::MatrixXd lambda;  // 7 x 7: lambda(m,n) = a^u_{m,0,0,n}
  Eigen::MatrixXd mu;      // 7 x 6: mu(m,n) = a^u_{m,0,1,n}
  Eigen::MatrixXd nu;      // 7 x 15: nu(m, tri(i,j)) = a^f_{m,0,i,j}
  Eigen::MatrixXd p;       // 7 x 7: u^{(m,0)} = sum_n p(m,n) u^{(0,n)} + data
  std::vector<Poly2> E;    // E_n
  std::vector<Poly2> Et;   // tilde E_m
  std::vector<double> alpha, beta;
};

CornerReduction build_corner_reduction(const Jet2& a, const std::vector<double>& alpha,
                                       const std::vector<double>& beta);

// Hat columns 0..3 then tilde columns 4..7 at corner_offsets(). Data symbols:
// f (15), g1^{(0..5)}, g3^{(0..5)}.
RecursiveSystem assemble_corner_system(const CornerReduction& red);
StencilResult solve_corner_stencil(const CornerReduction& red);

StencilPoly map_by_reflection(const StencilPoly& canonical, BoundaryId id);

// Identity row u_{i,j} = g.
StencilPoly dirichlet_row();

}  // namespace hoif
