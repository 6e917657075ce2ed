#include "rieffel/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rieffel/fourier.hpp"

namespace rieffel {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_compatible(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("grid mismatch");
  if (f.k() != g.k()) throw std::invalid_argument("algebra dimension mismatch");
  if (f.space() != g.space()) throw std::invalid_argument("representation (space tag) mismatch");
}

}  // namespace

TorusGrid::TorusGrid(int dim, int samples, double length)
    : dim_(dim), samples_(samples), length_(length) {
  if (dim < 1 || dim > 8) throw std::invalid_argument("TorusGrid: dim must be in [1, 8]");
  if (!is_power_of_two(samples)) throw std::invalid_argument("TorusGrid: N must be a power of two");
  if (!(length > 0.0)) throw std::invalid_argument("TorusGrid: L must be positive");
  point_count_ = 1;
  for (int ax = 0; ax < dim; ++ax) point_count_ *= samples;
}

double TorusGrid::freq_step() const { return 2.0 * std::numbers::pi / length_; }

double TorusGrid::cell_volume() const { return std::pow(spacing(), dim_); }

double TorusGrid::freq_cell_volume() const { return std::pow(freq_step(), dim_); }

void TorusGrid::decode(std::int64_t flat, int* idx) const {
  for (int ax = dim_ - 1; ax >= 0; --ax) {
    idx[ax] = static_cast<int>(flat % samples_);
    flat /= samples_;
  }
}

std::int64_t TorusGrid::encode(const int* idx) const {
  std::int64_t flat = 0;
  for (int ax = 0; ax < dim_; ++ax) flat = flat * samples_ + idx[ax];
  return flat;
}

std::vector<double> TorusGrid::point(std::int64_t flat) const {
  std::vector<double> x(dim_);
  int idx[8];
  decode(flat, idx);
  for (int ax = 0; ax < dim_; ++ax) x[ax] = coord(idx[ax]);
  return x;
}

std::vector<double> TorusGrid::freq_point(std::int64_t flat) const {
  std::vector<double> xi(dim_);
  int idx[8];
  decode(flat, idx);
  for (int ax = 0; ax < dim_; ++ax) xi[ax] = freq(idx[ax]);
  return xi;
}

SkewForm::SkewForm(int dim, const Eigen::MatrixXd& entries) : dim_(dim) {
  if (entries.rows() != dim || entries.cols() != dim) {
    throw std::invalid_argument("SkewForm: entries must be n x n");
  }
  double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries + entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("SkewForm: matrix is not skew-symmetric");
  }
  // Store the exact antisymmetrization so J^T = -J holds bitwise.
  j_ = 0.5 * (entries - entries.transpose());
}

SkewForm SkewForm::standard(int dim, double theta) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; i += 2) {
    j(i, i + 1) = theta;
    j(i + 1, i) = -theta;
  }
  return SkewForm(dim, j);
}

bool SkewForm::is_zero() const { return j_.cwiseAbs().maxCoeff() == 0.0; }

std::vector<double> SkewForm::apply(std::span<const double> v) const {
  std::vector<double> out(dim_, 0.0);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out[r] += j_(r, c) * v[c];
  return out;
}

GridFunction::GridFunction(TorusGrid grid, int k, Space space)
    : grid_(grid), k_(k), space_(space), values_(grid.point_count() * k * k, Complex(0, 0)) {
  if (k < 1) throw std::invalid_argument("GridFunction: k must be >= 1");
}

GridFunction::GridFunction(TorusGrid grid, int k, Space space, std::vector<Complex> values)
    : grid_(grid), k_(k), space_(space), values_(std::move(values)) {
  if (k < 1) throw std::invalid_argument("GridFunction: k must be >= 1");
  if (static_cast<std::int64_t>(values_.size()) != grid_.point_count() * k * k) {
    throw std::invalid_argument("GridFunction: value array has wrong size");
  }
}

MatrixElement GridFunction::value(std::int64_t flat) const {
  Eigen::MatrixXcd m(k_, k_);
  const Complex* p = at(flat);
  for (int r = 0; r < k_; ++r)
    for (int c = 0; c < k_; ++c) m(r, c) = p[r * k_ + c];
  return MatrixElement(std::move(m));
}

void GridFunction::set_value(std::int64_t flat, const MatrixElement& v) {
  if (v.dim() != k_) throw std::invalid_argument("set_value: algebra dimension mismatch");
  Complex* p = at(flat);
  for (int r = 0; r < k_; ++r)
    for (int c = 0; c < k_; ++c) p[r * k_ + c] = v(r, c);
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction sample(const std::function<MatrixElement(std::span<const double>)>& fn,
                    const TorusGrid& grid) {
  std::int64_t count = grid.point_count();
  std::vector<double> x(grid.dim());
  int idx[8];
  MatrixElement first = fn(std::span<const double>(grid.point(0)));
  int k = first.dim();
  GridFunction out(grid, k, Space::position);
  for (std::int64_t m = 0; m < count; ++m) {
    grid.decode(m, idx);
    for (int ax = 0; ax < grid.dim(); ++ax) x[ax] = grid.coord(idx[ax]);
    MatrixElement v = m == 0 ? first : fn(std::span<const double>(x));
    if (v.dim() != k) throw std::invalid_argument("sample: closure changed algebra dimension");
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        Complex z = v(r, c);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          std::ostringstream msg;
          msg << "sample: non-finite value at grid point (";
          for (int ax = 0; ax < grid.dim(); ++ax) msg << (ax ? ", " : "") << x[ax];
          msg << "), entry (" << r << ", " << c << ")";
          throw std::domain_error(msg.str());
        }
      }
    out.set_value(m, v);
  }
  return out;
}

GridFunction sample_scalar(const std::function<Complex(std::span<const double>)>& fn,
                           const TorusGrid& grid, int k) {
  return sample(
      [&](std::span<const double> x) { return MatrixElement::scalar(k, fn(x)); }, grid);
}

MatrixElement inner_product_E(const GridFunction& f, const GridFunction& g) {
  require_compatible(f, g);
  int k = f.k();
  double cell = f.space() == Space::position ? f.grid().cell_volume()
                                             : f.grid().freq_cell_volume();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(k, k);
  std::int64_t count = f.point_count();
  for (std::int64_t m = 0; m < count; ++m) {
    const Complex* a = f.at(m);
    const Complex* b = g.at(m);
    // acc += f(x)^* g(x), accumulated entrywise to avoid temporaries.
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        Complex s(0, 0);
        for (int l = 0; l < k; ++l) s += std::conj(a[l * k + r]) * b[l * k + c];
        acc(r, c) += s;
      }
  }
  return MatrixElement(cell * acc);
}

double norm_E(const GridFunction& f) {
  return std::sqrt(std::max(cstar_norm(inner_product_E(f, f)), 0.0));
}

double norm_L2(const GridFunction& f) {
  double cell = f.space() == Space::position ? f.grid().cell_volume()
                                             : f.grid().freq_cell_volume();
  double acc = 0.0;
  std::int64_t count = f.point_count();
  for (std::int64_t m = 0; m < count; ++m) {
    double nm = cstar_norm(f.value(m));
    acc += nm * nm;
  }
  return std::sqrt(cell * acc);
}

double norm_sup(const GridFunction& f) {
  double top = 0.0;
  for (std::int64_t m = 0; m < f.point_count(); ++m) top = std::max(top, cstar_norm(f.value(m)));
  return top;
}

GridFunction pointwise_product(const GridFunction& f, const GridFunction& g) {
  require_compatible(f, g);
  int k = f.k();
  GridFunction out(f.grid(), k, f.space());
  for (std::int64_t m = 0; m < f.point_count(); ++m) {
    const Complex* a = f.at(m);
    const Complex* b = g.at(m);
    Complex* o = out.at(m);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        Complex s(0, 0);
        for (int l = 0; l < k; ++l) s += a[r * k + l] * b[l * k + c];
        o[r * k + c] = s;
      }
  }
  return out;
}

GridFunction adjoint_pointwise(const GridFunction& f) {
  int k = f.k();
  GridFunction out(f.grid(), k, f.space());
  for (std::int64_t m = 0; m < f.point_count(); ++m) {
    const Complex* a = f.at(m);
    Complex* o = out.at(m);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) o[r * k + c] = std::conj(a[c * k + r]);
  }
  return out;
}

GridFunction promote(const GridFunction& f, int k) {
  if (f.k() != 1) throw std::invalid_argument("promote: input must be scalar (k = 1)");
  if (k == 1) return f;
  GridFunction out(f.grid(), k, f.space());
  for (std::int64_t m = 0; m < f.point_count(); ++m) {
    Complex v = *f.at(m);
    Complex* o = out.at(m);
    for (int r = 0; r < k; ++r) o[r * k + r] = v;
  }
  return out;
}

GridFunction plane_wave(const TorusGrid& grid, int k, std::span<const int> mode) {
  if (static_cast<int>(mode.size()) != grid.dim())
    throw std::invalid_argument("plane_wave: mode has wrong dimension");
  GridFunction out(grid, k, Space::position);
  int idx[8];
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    grid.decode(m, idx);
    double phase = 0.0;
    for (int ax = 0; ax < grid.dim(); ++ax)
      phase += grid.freq_step() * mode[ax] * grid.coord(idx[ax]);
    Complex v = std::exp(Complex(0, phase));
    Complex* o = out.at(m);
    for (int r = 0; r < k; ++r) o[r * k + r] = v;
  }
  return out;
}

GridFunction plane_wave_spectrum(const TorusGrid& grid, int k, std::span<const int> mode) {
  if (static_cast<int>(mode.size()) != grid.dim())
    throw std::invalid_argument("plane_wave_spectrum: mode has wrong dimension");
  GridFunction out(grid, k, Space::frequency);
  int idx[8];
  for (int ax = 0; ax < grid.dim(); ++ax) {
    if (mode[ax] < -grid.samples() / 2 || mode[ax] >= grid.samples() / 2)
      throw std::invalid_argument("plane_wave_spectrum: mode outside the lattice band");
    idx[ax] = grid.storage_index(mode[ax]);
  }
  double n = grid.dim();
  double amp = std::pow(2.0 * std::numbers::pi, -0.5 * n) * std::pow(grid.length(), n);
  out.set_value(grid.encode(idx), MatrixElement::scalar(k, amp));
  return out;
}

namespace {

// Enumerate all multi-indices alpha in N^dim with |alpha| <= total.
void enumerate_multi_indices(int dim, int total, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == dim) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[axis] = v;
      rec(axis + 1, remaining - v);
    }
    cur[axis] = 0;
  };
  rec(0, total);
}

GridFunction monomial_weight(const GridFunction& f, std::span<const int> alpha) {
  GridFunction out = f;
  const TorusGrid& grid = f.grid();
  int kk = f.k() * f.k();
  int idx[8];
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    grid.decode(m, idx);
    double w = 1.0;
    for (int ax = 0; ax < grid.dim(); ++ax)
      for (int p = 0; p < alpha[ax]; ++p) w *= grid.coord(idx[ax]);
    Complex* o = out.at(m);
    for (int e = 0; e < kk; ++e) o[e] *= w;
  }
  return out;
}

}  // namespace

SeminormResult seminorm_p(const GridFunction& f, std::span<const int> alpha,
                          std::span<const int> beta, int max_order_per_axis) {
  if (f.space() != Space::position)
    throw std::invalid_argument("seminorm_p: input must be position-space");
  for (int b : beta)
    if (b > max_order_per_axis)
      throw std::invalid_argument("seminorm_p: derivative order exceeds the configured cap");
  SeminormResult res;
  res.tail_energy_fraction = spectral_tail_fraction(f);
  res.aliasing_warning = res.tail_energy_fraction > 1e-8;
  GridFunction df = spectral_derivative(f, beta);
  GridFunction weighted = monomial_weight(df, alpha);
  res.value = norm_sup(weighted);
  return res;
}

SeminormResult seminorm_q(const GridFunction& f, int n1, int n2, int max_order_per_axis) {
  if (f.space() != Space::position)
    throw std::invalid_argument("seminorm_q: input must be position-space");
  if (n2 > max_order_per_axis)
    throw std::invalid_argument("seminorm_q: derivative order exceeds the configured cap");
  SeminormResult res;
  res.tail_energy_fraction = spectral_tail_fraction(f);
  res.aliasing_warning = res.tail_energy_fraction > 1e-8;
  std::vector<std::vector<int>> alphas, betas;
  enumerate_multi_indices(f.grid().dim(), n1, alphas);
  enumerate_multi_indices(f.grid().dim(), n2, betas);
  double acc = 0.0;
  for (const auto& beta : betas) {
    GridFunction df = spectral_derivative(f, beta);
    for (const auto& alpha : alphas) {
      double nm = norm_E(monomial_weight(df, alpha));
      acc += nm * nm;
    }
  }
  res.value = std::sqrt(acc);
  return res;
}

}  // namespace rieffel
