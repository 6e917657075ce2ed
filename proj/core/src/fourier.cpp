#include "rieffel/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace rieffel {

namespace {

// Cached FFTW plans.  Planning is not thread-safe, execution via the
// new-array interface is; FFTW_UNALIGNED keeps plans valid for any buffer.
class PlanCache {
 public:
  fftw_plan get(int dim, int samples, int howmany, int sign) {
    std::scoped_lock lock(mu_);
    auto key = std::make_tuple(dim, samples, howmany, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::int64_t count = 1;
    for (int ax = 0; ax < dim; ++ax) count *= samples;
    std::vector<fftw_complex> scratch(count * howmany);
    std::vector<int> n(dim, samples);
    fftw_plan plan = fftw_plan_many_dft(dim, n.data(), howmany, scratch.data(), nullptr,
                                        howmany, 1, scratch.data(), nullptr, howmany, 1,
                                        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fourier: FFTW failed to create a plan");
    plans_[key] = plan;
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Parity (-1)^(sum of centered per-axis modes) of a flat storage index.  For
// even N the centered mode and the storage index have equal parity.
inline int mode_parity(const TorusGrid& grid, std::int64_t flat) {
  int sum = 0;
  std::int64_t rest = flat;
  for (int ax = 0; ax < grid.dim(); ++ax) {
    sum += static_cast<int>(rest % grid.samples());
    rest /= grid.samples();
  }
  return (sum & 1) ? -1 : 1;
}

}  // namespace

GridFunction fourier(const GridFunction& f) {
  if (f.space() != Space::position)
    throw std::invalid_argument("fourier: input must be position-space");
  const TorusGrid& grid = f.grid();
  int k = f.k();
  int kk = k * k;
  GridFunction out(grid, k, Space::frequency, std::vector<Complex>(f.raw().begin(), f.raw().end()));
  fftw_plan plan = plan_cache().get(grid.dim(), grid.samples(), kk, FFTW_FORWARD);
  auto* data = reinterpret_cast<fftw_complex*>(out.raw().data());
  fftw_execute_dft(plan, data, data);
  // Centering phase e^{+i pi sum_l j_l} from x_0 = -L/2, plus the measure.
  double scale = std::pow(2.0 * std::numbers::pi, -0.5 * grid.dim()) * grid.cell_volume();
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    double s = scale * mode_parity(grid, q);
    Complex* p = out.at(q);
    for (int e = 0; e < kk; ++e) p[e] *= s;
  }
  return out;
}

GridFunction fourier_inv(const GridFunction& g) {
  if (g.space() != Space::frequency)
    throw std::invalid_argument("fourier_inv: input must be frequency-space");
  const TorusGrid& grid = g.grid();
  int k = g.k();
  int kk = k * k;
  GridFunction out(grid, k, Space::position, std::vector<Complex>(g.raw().begin(), g.raw().end()));
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    double s = static_cast<double>(mode_parity(grid, q));
    Complex* p = out.at(q);
    for (int e = 0; e < kk; ++e) p[e] *= s;
  }
  fftw_plan plan = plan_cache().get(grid.dim(), grid.samples(), kk, FFTW_BACKWARD);
  auto* data = reinterpret_cast<fftw_complex*>(out.raw().data());
  fftw_execute_dft(plan, data, data);
  double scale = std::pow(2.0 * std::numbers::pi, -0.5 * grid.dim()) * grid.freq_cell_volume();
  for (Complex& v : out.raw()) v *= scale;
  return out;
}

GridFunction spectral_derivative(const GridFunction& f, std::span<const int> beta) {
  if (static_cast<int>(beta.size()) != f.grid().dim())
    throw std::invalid_argument("spectral_derivative: beta has wrong dimension");
  bool all_zero = true;
  for (int b : beta) {
    if (b < 0) throw std::invalid_argument("spectral_derivative: negative order");
    if (b > 0) all_zero = false;
  }
  if (all_zero) return f;
  const TorusGrid& grid = f.grid();
  GridFunction spec = f.space() == Space::frequency ? f : fourier(f);
  int kk = f.k() * f.k();
  int idx[8];
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    grid.decode(q, idx);
    Complex factor(1, 0);
    for (int ax = 0; ax < grid.dim(); ++ax) {
      Complex ixi(0, grid.freq(idx[ax]));
      for (int p = 0; p < beta[ax]; ++p) factor *= ixi;
    }
    Complex* o = spec.at(q);
    for (int e = 0; e < kk; ++e) o[e] *= factor;
  }
  return f.space() == Space::frequency ? spec : fourier_inv(spec);
}

GridFunction directional_derivative(const GridFunction& f, std::span<const double> v) {
  if (static_cast<int>(v.size()) != f.grid().dim())
    throw std::invalid_argument("directional_derivative: direction has wrong dimension");
  const TorusGrid& grid = f.grid();
  GridFunction spec = f.space() == Space::frequency ? f : fourier(f);
  int kk = f.k() * f.k();
  int idx[8];
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    grid.decode(q, idx);
    double dot = 0.0;
    for (int ax = 0; ax < grid.dim(); ++ax) dot += v[ax] * grid.freq(idx[ax]);
    Complex factor(0, dot);
    Complex* o = spec.at(q);
    for (int e = 0; e < kk; ++e) o[e] *= factor;
  }
  return f.space() == Space::frequency ? spec : fourier_inv(spec);
}

double spectral_tail_fraction(const GridFunction& f) {
  const TorusGrid& grid = f.grid();
  GridFunction spec = f.space() == Space::frequency ? f : fourier(f);
  int kk = f.k() * f.k();
  int cutoff = grid.samples() / 3;
  int idx[8];
  double total = 0.0, tail = 0.0;
  for (std::int64_t q = 0; q < grid.point_count(); ++q) {
    grid.decode(q, idx);
    bool in_tail = false;
    for (int ax = 0; ax < grid.dim(); ++ax)
      if (std::abs(grid.centered_mode(idx[ax])) >= cutoff) in_tail = true;
    const Complex* p = spec.at(q);
    double e = 0.0;
    for (int i = 0; i < kk; ++i) e += std::norm(p[i]);
    total += e;
    if (in_tail) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace rieffel
