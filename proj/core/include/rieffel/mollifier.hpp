#pragma once

#include <vector>

#include "rieffel/deform.hpp"
#include "rieffel/grid.hpp"

namespace rieffel {

/// The scaled bump family psi_m(xi) = m^n psi(m xi) on the frequency lattice,
/// with psi the standard compactly supported bump C exp(-1/(1 - |xi|^2)) on
/// the open unit ball.  Each psi_m is renormalized after sampling so its
/// discrete mass (frequency-cell measure times the sample sum) is exactly 1.
class MollifierFamily {
 public:
  explicit MollifierFamily(TorusGrid grid);

  const TorusGrid& grid() const { return grid_; }

  /// Largest m such that the ball of radius 1/m still contains three
  /// frequency-lattice points per axis ({0, +-2 pi/L}), i.e. m < L / (2 pi).
  int max_admissible_m() const;
  bool admissible(int m) const { return m >= 1 && m <= max_admissible_m(); }

  /// Sampled, renormalized psi_m as a scalar frequency-space function.
  /// Rejects inadmissible m (support under-resolved).
  GridFunction psi_m(int m) const;

  /// Exact spectrum of the approximate identity:
  /// F(e_m tensor 1_C) = (2 pi)^{n/2} psi_m * 1_C.
  GridFunction e_m_spectrum(int m, int k = 1) const;

 private:
  TorusGrid grid_;
};

/// e_m tensor 1_C in position space: (2 pi)^{n/2} F^{-1}(psi_m) * 1_C.
GridFunction make_e_m(const MollifierFamily& family, int m, int k = 1);

struct MollifierRow {
  int m = 0;
  double residual = 0.0;
};

/// Residuals norm_E(L_{e_m}(g) - g) across the mollifier sweep.
std::vector<MollifierRow> approx_identity_test(const GridFunction& g,
                                               const MollifierFamily& family,
                                               std::span<const int> m_list, const SkewForm& j);

/// One term c * d_1^{beta_1} ... d_{2n}^{beta_{2n}} of a constant-coefficient
/// polynomial in the 2n derivation generators.
struct DifferentialMonomial {
  Complex coeff;
  std::vector<int> beta;  // length 2n, orders per generator
};

/// Residuals norm_L2(D0(L_{e_m})(g)) across the sweep, computed through the
/// exact rule d^beta(L_{e_m}) = L_{d_v^beta e_m} rather than difference
/// quotients.  D0 must have no order-zero term.
std::vector<MollifierRow> derivation_decay_test(std::span<const DifferentialMonomial> d0,
                                                const GridFunction& g,
                                                const MollifierFamily& family,
                                                std::span<const int> m_list, const SkewForm& j);

/// The spectrum of D0 applied to L_{e_m}: sum of c_beta (i<v,xi>)^beta times
/// (2 pi)^{n/2} psi_m(xi) * 1_C, with v the translation or J-twisted
/// modulation direction per generator.
GridFunction d0_e_m_spectrum(std::span<const DifferentialMonomial> d0,
                             const MollifierFamily& family, int m, const SkewForm& j, int k = 1);

}  // namespace rieffel
