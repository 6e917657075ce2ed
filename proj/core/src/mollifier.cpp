#include "rieffel/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rieffel {

namespace {

// Unnormalized bump exp(-1/(1 - |u|^2)) on |u| < 1, zero outside.
double bump(double r2) {
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

}  // namespace

MollifierFamily::MollifierFamily(TorusGrid grid) : grid_(grid) {
  // psi_1 must fit inside the Nyquist band, |xi| < pi N / L per axis.
  if (std::numbers::pi * grid_.samples() / grid_.length() <= 1.0)
    throw std::invalid_argument("MollifierFamily: grid cannot resolve the unit-ball bump");
  if (max_admissible_m() < 1)
    throw std::invalid_argument("MollifierFamily: no admissible mollifier index on this grid");
}

int MollifierFamily::max_admissible_m() const {
  // Strict m * (2 pi / L) < 1.
  double bound = 1.0 / grid_.freq_step();
  int m = static_cast<int>(std::floor(bound));
  if (static_cast<double>(m) >= bound) m -= 1;
  return m;
}

GridFunction MollifierFamily::psi_m(int m) const {
  if (!admissible(m))
    throw std::invalid_argument(
        "MollifierFamily: inadmissible index m (bump support under-resolved on the frequency "
        "lattice)");
  int n = grid_.dim();
  GridFunction out(grid_, 1, Space::frequency);
  int idx[8];
  double mass = 0.0;
  double mn = std::pow(static_cast<double>(m), n);
  for (std::int64_t q = 0; q < grid_.point_count(); ++q) {
    grid_.decode(q, idx);
    double r2 = 0.0;
    for (int ax = 0; ax < n; ++ax) {
      double u = m * grid_.freq(idx[ax]);
      r2 += u * u;
    }
    double v = mn * bump(r2);
    *out.at(q) = Complex(v, 0);
    mass += v;
  }
  mass *= grid_.freq_cell_volume();
  out *= Complex(1.0 / mass, 0);
  return out;
}

GridFunction MollifierFamily::e_m_spectrum(int m, int k) const {
  GridFunction psi = psi_m(m);
  double amp = std::pow(2.0 * std::numbers::pi, 0.5 * grid_.dim());
  psi *= Complex(amp, 0);
  return promote(psi, k);
}

GridFunction make_e_m(const MollifierFamily& family, int m, int k) {
  return fourier_inv(family.e_m_spectrum(m, k));
}

std::vector<MollifierRow> approx_identity_test(const GridFunction& g,
                                               const MollifierFamily& family,
                                               std::span<const int> m_list, const SkewForm& j) {
  std::vector<MollifierRow> rows;
  rows.reserve(m_list.size());
  for (int m : m_list) {
    GridOperator lm = op_left(family.e_m_spectrum(m, g.k()), j);
    GridFunction diff = lm.apply(g) - g;
    rows.push_back({m, norm_E(diff)});
  }
  return rows;
}

GridFunction d0_e_m_spectrum(std::span<const DifferentialMonomial> d0,
                             const MollifierFamily& family, int m, const SkewForm& j, int k) {
  const TorusGrid& grid = family.grid();
  int n = grid.dim();
  for (const auto& term : d0) {
    if (static_cast<int>(term.beta.size()) != 2 * n)
      throw std::invalid_argument("derivation_decay_test: monomial has wrong generator count");
    int order = 0;
    for (int b : term.beta) order += b;
    if (order == 0 && term.coeff != Complex(0, 0))
      throw std::invalid_argument("derivation_decay_test: order-zero coefficient must vanish");
  }
  // Direction vectors: e_l for the first n generators, J e_l for the rest.
  std::vector<std::vector<double>> dirs(2 * n);
  for (int l = 0; l < n; ++l) {
    dirs[l].assign(n, 0.0);
    dirs[l][l] = 1.0;
    std::vector<double> e(n, 0.0);
    e[l] = 1.0;
    dirs[n + l] = j.apply(e);
  }
  GridFunction spec = family.e_m_spectrum(m, k);
  GridFunction out(grid, k, Space::frequency);
  int kk = k * k;
  int idx[8];
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    grid.decode(q, idx);
    double xi[8];
    for (int ax = 0; ax < n; ++ax) xi[ax] = grid.freq(idx[ax]);
    Complex weight(0, 0);
    for (const auto& term : d0) {
      Complex w = term.coeff;
      for (int l = 0; l < 2 * n; ++l) {
        if (term.beta[l] == 0) continue;
        double dot = 0.0;
        for (int ax = 0; ax < n; ++ax) dot += dirs[l][ax] * xi[ax];
        Complex factor(0, dot);
        for (int p = 0; p < term.beta[l]; ++p) w *= factor;
      }
      weight += w;
    }
    const Complex* src = spec.at(q);
    Complex* dst = out.at(q);
    for (int e = 0; e < kk; ++e) dst[e] = weight * src[e];
  }
  return out;
}

std::vector<MollifierRow> derivation_decay_test(std::span<const DifferentialMonomial> d0,
                                                const GridFunction& g,
                                                const MollifierFamily& family,
                                                std::span<const int> m_list, const SkewForm& j) {
  std::vector<MollifierRow> rows;
  rows.reserve(m_list.size());
  for (int m : m_list) {
    GridFunction spec = d0_e_m_spectrum(d0, family, m, j, g.k());
    GridOperator lm = op_left(spec, j);
    rows.push_back({m, norm_L2(lm.apply(g))});
  }
  return rows;
}

}  // namespace rieffel
