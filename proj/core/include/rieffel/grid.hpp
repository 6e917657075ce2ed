#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rieffel/algebra.hpp"

namespace rieffel {

/// Uniform periodic grid on [-L/2, L/2)^n with N samples per axis (N a power
/// of two) and the dual frequency lattice {2*pi*j/L : -N/2 <= j < N/2}.
class TorusGrid {
 public:
  TorusGrid(int dim, int samples, double length);

  int dim() const { return dim_; }
  int samples() const { return samples_; }
  double length() const { return length_; }
  double spacing() const { return length_ / samples_; }
  /// Frequency-lattice step 2*pi/L per axis.
  double freq_step() const;
  /// Total number of grid points (= number of frequency modes), N^n.
  std::int64_t point_count() const { return point_count_; }
  /// Quadrature cell h^n for position space.
  double cell_volume() const;
  /// Frequency cell (2*pi/L)^n.
  double freq_cell_volume() const;

  /// Position coordinate of per-axis index m in [0, N): x = -L/2 + m*h.
  double coord(int m) const { return -0.5 * length_ + m * spacing(); }
  /// Centered integer mode of per-axis storage index q in [0, N).
  int centered_mode(int q) const { return q < samples_ / 2 ? q : q - samples_; }
  /// Storage index of a centered mode j in [-N/2, N/2).
  int storage_index(int j) const { return j >= 0 ? j : j + samples_; }
  /// Frequency value 2*pi*j/L of per-axis storage index q.
  double freq(int q) const { return freq_step() * centered_mode(q); }

  /// Decode a flat row-major index into per-axis indices (size dim).
  void decode(std::int64_t flat, int* idx) const;
  std::int64_t encode(const int* idx) const;

  /// Position vector of a flat index.
  std::vector<double> point(std::int64_t flat) const;
  /// Frequency vector of a flat index.
  std::vector<double> freq_point(std::int64_t flat) const;

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.dim_ == b.dim_ && a.samples_ == b.samples_ && a.length_ == b.length_;
  }

 private:
  int dim_;
  int samples_;
  double length_;
  std::int64_t point_count_;
};

/// Real skew-symmetric n x n transformation J.  Antisymmetry is checked and
/// the stored matrix satisfies J^T = -J exactly.
class SkewForm {
 public:
  SkewForm(int dim, const Eigen::MatrixXd& entries);

  /// theta times the standard symplectic-style block form; the zero form for
  /// n = 1 (a 1 x 1 skew matrix is always 0).
  static SkewForm standard(int dim, double theta);
  static SkewForm zero(int dim) { return standard(dim, 0.0); }

  int dim() const { return dim_; }
  const Eigen::MatrixXd& entries() const { return j_; }
  bool is_zero() const;

  /// J applied to a vector.
  std::vector<double> apply(std::span<const double> v) const;

 private:
  int dim_;
  Eigen::MatrixXd j_;
};

enum class Space { position, frequency };

/// A MatrixElement-valued function sampled on a TorusGrid, in either the
/// position or the frequency representation.  Values are stored point-major:
/// entry (r, c) of the value at flat index m lives at m*k*k + r*k + c.
class GridFunction {
 public:
  GridFunction(TorusGrid grid, int k, Space space);
  GridFunction(TorusGrid grid, int k, Space space, std::vector<Complex> values);

  const TorusGrid& grid() const { return grid_; }
  int k() const { return k_; }
  Space space() const { return space_; }
  std::int64_t point_count() const { return grid_.point_count(); }

  MatrixElement value(std::int64_t flat) const;
  void set_value(std::int64_t flat, const MatrixElement& v);

  Complex* at(std::int64_t flat) { return values_.data() + flat * k_ * k_; }
  const Complex* at(std::int64_t flat) const { return values_.data() + flat * k_ * k_; }
  std::span<Complex> raw() { return values_; }
  std::span<const Complex> raw() const { return values_; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(Complex c);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

 private:
  TorusGrid grid_;
  int k_;
  Space space_;
  std::vector<Complex> values_;
};

/// Sample a pointwise closure on every grid point.  Rejects non-finite values
/// with a diagnostic naming the offending point.
GridFunction sample(const std::function<MatrixElement(std::span<const double>)>& fn,
                    const TorusGrid& grid);

/// Scalar convenience overload: samples fn * 1_C at algebra dimension k.
GridFunction sample_scalar(const std::function<Complex(std::span<const double>)>& fn,
                           const TorusGrid& grid, int k = 1);

/// C-valued inner product: measure-weighted sum of f(x)* g(x), conjugate
/// linear in f.  Both arguments must share grid, k and representation; the
/// measure is h^n in position space and (2*pi/L)^n in frequency space.
MatrixElement inner_product_E(const GridFunction& f, const GridFunction& g);

/// Module norm: cstar_norm(<f, f>)^(1/2).
double norm_E(const GridFunction& f);

/// L2 norm: (sum of cstar_norm(f(x))^2 times the cell measure)^(1/2).
double norm_L2(const GridFunction& f);

/// sup_x cstar_norm(f(x)) over grid points.
double norm_sup(const GridFunction& f);

/// Pointwise matrix product h(x) = f(x) g(x).
GridFunction pointwise_product(const GridFunction& f, const GridFunction& g);

/// Pointwise involution f*(x) = f(x)^*.
GridFunction adjoint_pointwise(const GridFunction& f);

/// Tensor a scalar (k = 1) function with 1_C at dimension k.
GridFunction promote(const GridFunction& f, int k);

/// Position-space plane wave e^{i<xi_j, x>} * 1_C at the lattice mode j
/// (centered per-axis integers).
GridFunction plane_wave(const TorusGrid& grid, int k, std::span<const int> mode);

/// Frequency-space delta: the exact transform of plane_wave(grid, k, mode),
/// a single nonzero mode of value (2*pi)^(-n/2) L^n * 1_C.
GridFunction plane_wave_spectrum(const TorusGrid& grid, int k, std::span<const int> mode);

struct SeminormResult {
  double value = 0.0;
  /// Set when the top third of the spectrum carries more than the configured
  /// share of the total energy, making spectral derivatives unreliable.
  bool aliasing_warning = false;
  double tail_energy_fraction = 0.0;
};

/// Schwartz seminorm p_{alpha,beta}(f) = sup_x cstar_norm(x^alpha d^beta f(x))
/// with the derivative taken spectrally.  Derivative order is capped at
/// max_order_per_axis per axis.
SeminormResult seminorm_p(const GridFunction& f, std::span<const int> alpha,
                          std::span<const int> beta, int max_order_per_axis = 4);

/// Sobolev-style seminorm q_{N1,N2}(f): l2 combination of norm_E over all
/// |alpha| <= N1, |beta| <= N2.
SeminormResult seminorm_q(const GridFunction& f, int n1, int n2,
                          int max_order_per_axis = 4);

}  // namespace rieffel
