#pragma once

#include "hoif/stencil_core.hpp"

namespace hoif {

// Offsets (-1,-1),(-1,0),(-1,1),(0,-1),(0,0),(0,1),(1,-1),(1,0),(1,1).
const std::vector<Index2>& regular_offsets();
inline int regular_col(int k, int l) { return (k + 1) * 3 + (l + 1); }

// 9-point system at a regular point; gh must come from a K=7 reduction
// about the stencil center. Rows are the band of order 7, data symbols the
// source derivatives f^{(m,n)}, m+n <= 5, in triangular order.
RecursiveSystem assemble_regular_system(const GHPolys& gh);

// Sixth-order 9-point stencil with the maximal-parameter selection; scale 2.
StencilResult solve_regular_stencil(const RecursiveSystem& system);

// Convenience: reduction, assembly and solve from an a-jet of order >= 6.
StencilResult regular_stencil(const Jet2& a);

}  // namespace hoif
