#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rieffel/fourier.hpp"
#include "rieffel/grid.hpp"

namespace rieffel {

/// The deformed product f x_J g, computed in the frequency domain as the
/// twisted convolution
///   F(f x_J g)(xi) = (2 pi)^{-n/2} sum_w F(f)(w) F(g)(xi - w)
///                      e^{i <xi, J w> / (2 pi)} dw,
/// with dw the frequency-cell measure and xi - w wrapped periodically.
/// Inputs may be given in either representation; a frequency-space argument
/// is taken as the transform of the corresponding position-space factor
/// (useful to keep exactly sparse spectra sparse).  The result is returned
/// in position space.
GridFunction deformed_product(const GridFunction& f, const GridFunction& g, const SkewForm& j);

/// Adjointable linear map on GridFunctions.  Immutable; composition trees
/// share nodes.  apply() takes and returns position-space functions,
/// apply_freq() works on frequency representations (the two are conjugate by
/// the transform, with apply_freq exact on sparse spectra).
class GridOperator {
 public:
  struct Node;

  GridFunction apply(const GridFunction& g) const;
  GridFunction apply_freq(const GridFunction& g_hat) const;
  GridOperator adjoint() const;

  const TorusGrid& grid() const;
  int k() const;

  /// True when the operator supports exact structural derivations
  /// (left/right multiplications, Heisenberg words, their combinations).
  bool has_exact_derivation() const;

  explicit GridOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Left multiplication L_f: g -> f x_J g.  f may be position- or
/// frequency-space (the latter is used directly as F(f)).
GridOperator op_left(const GridFunction& f, const SkewForm& j);

/// Right multiplication R_g: f -> f x_J g.
GridOperator op_right(const GridFunction& g, const SkewForm& j);

/// Heisenberg unitary U_{a,b,c}: f -> e^{ic} e^{i<b,x>} f(x - a) with periodic
/// wraparound.  a must lie on the position lattice and b on the frequency
/// lattice; off-lattice parameters are rejected.
GridOperator heisenberg_op(const TorusGrid& grid, int k, std::span<const double> a,
                           std::span<const double> b, double c);
/// Same, parameterized by integer lattice steps (a = a_steps * h,
/// b = b_steps * 2 pi / L).
GridOperator heisenberg_op_steps(const TorusGrid& grid, int k, std::span<const int> a_steps,
                                 std::span<const int> b_steps, double c);

GridOperator identity_op(const TorusGrid& grid, int k);
GridOperator zero_op(const TorusGrid& grid, int k);

/// Dense operator over the (point, matrix-row) coordinate space, acting as
/// the identity on the matrix-column index so the map is right-module linear
/// (hence adjointable).  For k = 1 this is an arbitrary N^n x N^n matrix.
GridOperator dense_op(const TorusGrid& grid, int k, Eigen::MatrixXcd matrix);

/// Module rank-one operator h -> w <v, h>.
GridOperator rank_one_op(const GridFunction& w, const GridFunction& v);

GridOperator compose(const GridOperator& a, const GridOperator& b);
GridOperator lin_comb(std::vector<Complex> coeffs, std::vector<GridOperator> terms);
GridOperator scale_op(Complex c, const GridOperator& a);
GridOperator sum_op(const GridOperator& a, const GridOperator& b);

/// Conjugation by the Heisenberg unitary: U_{a,b,0} A U_{a,b,0}^{-1}
/// (independent of the central parameter).
GridOperator ad_u(const GridOperator& a_op, std::span<const double> a, std::span<const double> b);
GridOperator ad_u_steps(const GridOperator& a_op, std::span<const int> a_steps,
                        std::span<const int> b_steps);

/// Smallest admissible derivation step along direction k_index (1-based,
/// 1..2n): the grid spacing for translation directions, 1/L for modulation
/// directions (whose one-parameter family is b = 2 pi t e_k).
double derivation_min_step(const TorusGrid& grid, int k_index);

/// Lattice derivation of the conjugation action along direction k_index,
/// realized as a symmetric difference quotient at steps t and 2t combined by
/// one Richardson level (O(t^4) error on smooth families).  The step must be
/// a positive integer multiple of derivation_min_step.
GridOperator derivation(int k_index, const GridOperator& a_op, double step);

/// Exact structural derivation: d(L_f) = L_{d_v f}, phase rules for
/// Heisenberg words, Leibniz on compositions.  Throws std::invalid_argument
/// for kinds with no exact rule (dense).
GridOperator derivation_exact(int k_index, const GridOperator& a_op);

/// Exact operator norm of the dense materialization (largest singular value).
/// Memory is O((N^n k)^2); intended for small grids.
double operator_norm_dense(const GridOperator& a_op);

/// Randomized power iteration on A*A with a seeded deterministic start;
/// approaches the norm from below.
double operator_norm_estimate(const GridOperator& a_op, std::uint64_t seed = 7,
                              int iterations = 50);

/// Materialize the operator over the (point, row) coordinate space.
Eigen::MatrixXcd materialize(const GridOperator& a_op);

/// Weighted l1 norm of a spectrum: sum over modes of cstar_norm times the
/// frequency-cell measure (the discrete ||F f||_1).
double spectrum_l1_norm(const GridFunction& f_hat);

}  // namespace rieffel
