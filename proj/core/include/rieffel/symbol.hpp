#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rieffel/deform.hpp"
#include "rieffel/mollifier.hpp"

namespace rieffel {

/// A MatrixElement-valued function on the discrete phase space: one value per
/// (position point, frequency mode) pair, N^n x N^n of them.
class PhaseSpaceFunction {
 public:
  PhaseSpaceFunction(TorusGrid grid, int k);

  const TorusGrid& grid() const { return grid_; }
  int k() const { return k_; }

  MatrixElement value(std::int64_t point, std::int64_t mode) const;
  void set_value(std::int64_t point, std::int64_t mode, const MatrixElement& v);
  Complex* at(std::int64_t point, std::int64_t mode) {
    return values_.data() + (point * grid_.point_count() + mode) * k_ * k_;
  }
  const Complex* at(std::int64_t point, std::int64_t mode) const {
    return values_.data() + (point * grid_.point_count() + mode) * k_ * k_;
  }

 private:
  TorusGrid grid_;
  int k_;
  std::vector<Complex> values_;
};

/// Kohn-Nirenberg symbol of a grid operator, read off by probing with every
/// lattice plane wave: a(x, xi) = e^{-i<xi,x>} (A e_xi)(x).  Op(a) reproduces
/// the action of A on the plane-wave basis by construction.
PhaseSpaceFunction extract_symbol(const GridOperator& a_op);

/// One frequency slice of the symbol: x -> a(x, xi_mode).
GridFunction symbol_slice(const GridOperator& a_op, std::int64_t mode);

/// Quantize: Op(a) g (x) = (2 pi)^{-n/2} sum_xi a(x, xi) F(g)(xi) e^{i<xi,x>} dxi.
GridFunction apply_kohn_nirenberg(const PhaseSpaceFunction& a, const GridFunction& g);

/// Restriction map: the xi = 0 slice of a phase-space function.
GridFunction restrict_symbol(const PhaseSpaceFunction& a);

/// Scalar probe data for the Cordes-style pairing.  The 2n-variable probes
/// are outer products u = u1 (x) u2 and v = v1 (x) v2; the braced operator
/// acts on the first factor, so v1 lives on the frequency lattice (it is fed
/// through F^{-1}) while u1, u2, v2 live on the position grid.
struct CordesProbes {
  GridFunction u1, u2, v1, v2;
};

/// L2-normalized Gaussian probes.
CordesProbes default_cordes_probes(const TorusGrid& grid);

struct CordesOptions {
  /// Use exact structural derivations when the operator supports them;
  /// otherwise fall back to lattice difference quotients.
  bool prefer_exact_derivations = true;
  /// Step multiplier for difference-quotient derivations.
  int diff_step_units = 1;
};

struct CordesResult {
  MatrixElement value;
  /// Cauchy-Schwarz majorant (2 pi)^{n/2} ||u||_{L2} ||braced(v . 1)||_{E},
  /// computed from the actually evaluated factors.
  double cauchy_schwarz_bound = 0.0;
  /// norm_E of the braced operator applied to v1 . 1_C (first factor).
  double braced_image_norm = 0.0;
};

/// Cordes-style symbol pairing
///   S(A)(x, xi) = (2 pi)^{n/2} < u . 1_C,
///       { (D [Ad U(-x,-xi)(A)] o F^{-1}) (x) I } v . 1_C >_{E_{2n}}
/// with D the product of (1 + d_{x_j})^2 (1 + d_{xi_j})^2 built from the
/// lattice derivations.  The sample point is given in lattice steps.
CordesResult cordes_pairing(const GridOperator& a_op, const CordesProbes& probes,
                            std::span<const int> x_steps, std::span<const int> xi_steps,
                            const CordesOptions& opts = {});

/// The derivation polynomial D applied at the operator level (independent of
/// the sample point):  D [Ad U(-x,-xi)(A)] = Ad U(-x,-xi)(D~ A).
GridOperator cordes_d_operator(const GridOperator& a_op, const CordesOptions& opts = {});

/// Probe pairs (g, h) for commutant tests together with cached
/// operator-norm estimates of the R_g factors.
struct CommutantProbes {
  std::vector<std::pair<GridFunction, GridFunction>> pairs;
  std::vector<GridOperator> right_ops;
  std::vector<double> scales;
};
CommutantProbes make_commutant_probes(std::vector<std::pair<GridFunction, GridFunction>> pairs,
                                      const SkewForm& j);

/// Relative commutator residual against right multiplications:
/// max over probe pairs (g, h) of
///   norm_E((A R_g - R_g A) h) / (norm_E(h) * scale(g)),
/// scale(g) an operator-norm estimate of R_g.
double commutant_residual(const GridOperator& a_op, const CommutantProbes& probes);
double commutant_residual(const GridOperator& a_op,
                          std::span<const std::pair<GridFunction, GridFunction>> probes,
                          const SkewForm& j);

enum class VerdictKind { is_left_mult, not_in_commutant, reconstruction_mismatch };

struct ConjectureVerdict {
  VerdictKind kind;
  double commutant_res = 0.0;
  double reconstruction_gap = 0.0;
  /// The recovered multiplier (restrict o extract_symbol)(A) when the
  /// operator passed the commutant test.
  std::optional<GridFunction> multiplier;
};

/// Decide whether A lies in the commutant of the right multiplications and,
/// if so, whether it is the left multiplication by its restricted symbol.
ConjectureVerdict verify_conjecture(const GridOperator& a_op, const SkewForm& j,
                                    const CommutantProbes& probes, double tol);
ConjectureVerdict verify_conjecture(const GridOperator& a_op, const SkewForm& j,
                                    std::span<const std::pair<GridFunction, GridFunction>> probes,
                                    double tol);

struct SymbolSample {
  std::int64_t point = 0;  // flat position index
  std::int64_t mode = 0;   // flat frequency index
};

struct SymbolConvergenceRow {
  int m = 0;
  std::vector<double> residuals;  // one per sample
  double max_residual = 0.0;
};

/// Pointwise convergence of the symbol of A o L_{e_m} toward the symbol of A
/// across the mollifier sweep, using extract_symbol slices at the samples.
std::vector<SymbolConvergenceRow> symbol_convergence_test(const GridOperator& a_op,
                                                          const MollifierFamily& family,
                                                          std::span<const SymbolSample> samples,
                                                          std::span<const int> m_list,
                                                          const SkewForm& j);

}  // namespace rieffel
