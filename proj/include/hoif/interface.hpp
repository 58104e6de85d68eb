#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoif/stencil_core.hpp"

namespace hoif {

// Uniform grid x_i = l1 + i h, y_j = l3 + j h with h = (l2 - l1) / 2^J.
struct Grid {
  double l1 = 0, l2 = 1, l3 = 0, l4 = 1;
  int J = 0;
  int N1 = 1, N2 = 1;
  double h = 1.0;

  static Grid make(double l1, double l2, double l3, double l4, int J);
  double x(int i) const { return l1 + i * h; }
  double y(int j) const { return l3 + j * h; }
  int index(int i, int j) const { return j * (N1 + 1) + i; }
  int size() const { return (N1 + 1) * (N2 + 1); }
  bool inside(int i, int j) const { return i >= 0 && i <= N1 && j >= 0 && j <= N2; }
};

using ScalarField = std::function<double(double, double)>;

// psi > 0 is the plus side, psi <= 0 the minus side. A parametric curve also
// carries its parametrization; theta_at returns the curve parameter of a
// point on the curve (used to evaluate jump data given in terms of it).
struct InterfaceGeometry {
  ScalarField psi;
  std::function<Eigen::Vector2d(double)> curve;
  ScalarField theta_at;
  // Optional exact grad psi and curve tangent. When present, the flux jump is
  // sampled together with the chart speed.
  std::function<Eigen::Vector2d(double, double)> grad;
  std::function<Eigen::Vector2d(double)> tangent;
  bool present() const { return static_cast<bool>(psi); }
  bool parametric() const { return static_cast<bool>(curve); }
  bool plus(double x, double y) const { return psi(x, y) > 0.0; }
};

// Jump data [u] = g and [a grad u . n] = g_gamma at a curve point (x, y)
// with curve parameter theta.
struct JumpData {
  std::function<double(double, double, double)> g;
  std::function<double(double, double, double)> g_gamma;
};

enum class PointLabel { RegularInterior, Irregular, BoundaryEdge, BoundaryCorner };

struct StencilFootprint {
  std::vector<Index2> d_plus, d_minus;  // 3x3 offsets by side
  std::vector<Index2> e_plus, e_minus;  // (+-2,0), (0,+-2) by side
  bool irregular() const { return !d_plus.empty() && !d_minus.empty(); }
};

struct Classification {
  std::vector<PointLabel> label;
  std::vector<unsigned char> plus;      // side of the node itself
  std::vector<unsigned char> straddle;  // boundary node whose one-sided stencil crosses the interface
  int n_irregular = 0;
};

StencilFootprint footprint(const Grid& grid, const ScalarField& psi, int i, int j);

// Boundary labels take precedence; interior nodes are irregular iff their 3x3
// footprint straddles the interface. Throws std::invalid_argument if an
// irregular node's 13-point footprint leaves the grid; boundary nodes whose one-sided stencil crosses
// the interface are marked in straddle.
Classification classify_grid(const Grid& grid, const InterfaceGeometry& geo);

// Local parametrization data at a base point (x*, y*) on the curve. r, s hold
// derivatives in t at t*; g and g_gamma hold Taylor coefficients in t of g(t)
// and g_gamma(t) * |gamma'(t)|. The parameter runs so that (s', -r') points to
// the plus side.
struct CurveJet {
  double t_star = 0.0;
  std::array<double, 6> r{}, s{};
  std::array<double, 6> g{};
  std::array<double, 5> g_gamma{};
  Eigen::Vector2d base{0.0, 0.0};
  double v0 = 0.0, w0 = 0.0;  // node = base + (v0, w0) h
};

// Derivatives of r, s, g and of g_gamma in a raw parameter; orients the
// parameter by grad_psi and forms the speed product unless g_gamma_raw
// already holds derivatives of g_gamma times the speed.
CurveJet finalize_curve_jet(double t_star, const std::array<double, 6>& r, const std::array<double, 6>& s,
                            const std::array<double, 6>& g, const std::array<double, 5>& g_gamma_raw,
                            const Eigen::Vector2d& grad_psi, bool speed_included = false);

enum class ChartKind { Auto, GraphX, GraphY, Angle };

// Closest curve point to the node: for level sets among roots of psi along
// grid-aligned lines at spacing h/16 within the box +-h (then +-2h); for
// parametric curves among the points of a parameter discretization whose
// chord length is at most h/16. Returns the base point and, for parametric
// curves, its parameter.
struct BasePoint {
  Eigen::Vector2d point{0.0, 0.0};
  double theta = 0.0;
};

class CurveSampler {
 public:
  CurveSampler(const InterfaceGeometry& geo, double h);
  BasePoint project(const Eigen::Vector2d& node) const;

 private:
  InterfaceGeometry geo_;
  double h_;
  std::vector<double> theta_;
  std::vector<Eigen::Vector2d> points_;
};

// Curve jet at a base point by moving least squares on 11 parameter samples
// at spacing h/16: graph over x or y (level sets and parametric curves) or the
// curve's own angle parameter (parametric only). Auto picks the angle chart
// for parametric curves and the graph over the dominant coordinate otherwise.
CurveJet estimate_curve_jet(const InterfaceGeometry& geo, const JumpData& jumps, const BasePoint& base,
                            const Eigen::Vector2d& node, double h, ChartKind chart = ChartKind::Auto);

// Solves psi(x, y) = 0 for y at fixed x (axis 0) or for x at fixed y (axis 1),
// starting near guess.
double solve_on_line(const ScalarField& psi, int axis, double fixed, double guess, double h);

// Symbol layout of every transmission form: u_+ band Lambda^1_5 (11), f_+
// derivatives Lambda_3 (10), f_- derivatives Lambda_3 (10), g Taylor
// coefficients 0..5, g_gamma Taylor coefficients 0..4.
namespace tsym {
inline constexpr int kBand = 11, kF = 10, kG = 6, kGG = 5;
inline constexpr int u0 = 0, fplus0 = kBand, fminus0 = fplus0 + kF, g0 = fminus0 + kF, gg0 = g0 + kG;
inline constexpr int count = gg0 + kGG;
inline constexpr int data_count = count - kBand;
}  // namespace tsym

// u_-^{(m',n')} = T.row(band(m',n')) . symbols, for (m',n') in Lambda^1_5.
struct TransmissionTable {
  Eigen::MatrixXd T;             // 11 x 42
  std::array<double, 6> det{};  // determinant of the 2x2 solve at step p (det[0] unused)

  double u_plus(int mp, int np, int m, int n) const { return T(band_index(mp, np), tsym::u0 + band_index(m, n)); }
  double f_plus(int mp, int np, int i, int j) const { return T(band_index(mp, np), tsym::fplus0 + tri_index(i, j)); }
  double f_minus(int mp, int np, int i, int j) const {
    return T(band_index(mp, np), tsym::fminus0 + tri_index(i, j));
  }
  double g(int mp, int np, int p) const { return T(band_index(mp, np), tsym::g0 + p); }
  double g_gamma(int mp, int np, int p) const { return T(band_index(mp, np), tsym::gg0 + p); }
};

// Order-5 reductions of both sides at the base point; a-jets of order >= 4.
struct InterfaceReduction {
  GHPolys plus, minus;
  Jet2 a_plus, a_minus;
};
InterfaceReduction build_interface_reduction(const Jet2& a_plus, const Jet2& a_minus);

TransmissionTable build_transmission(const CurveJet& curve, const InterfaceReduction& red);

// Offsets (-1,-1),(-1,0),(-1,1),(0,-1),(0,0),(0,1),(1,-1),(1,0),(1,1),
// (-2,0),(2,0),(0,-2),(0,2).
const std::vector<Index2>& irregular_offsets();

// plus[j] tells the side of offset j. Rows are Lambda^1_5; data symbols are
// the 31 non-u_+ symbols of the transmission layout.
RecursiveSystem assemble_irregular_system(const std::array<bool, 13>& plus, double v0, double w0,
                                          const InterfaceReduction& red, const TransmissionTable& T);

// c_{0,0,0} = 1, C_5 = 0, free parameters zero.
StencilResult solve_irregular_stencil(const RecursiveSystem& system);

std::array<bool, 13> irregular_sides(const Grid& grid, const ScalarField& psi, int i, int j);

}  // namespace hoif
