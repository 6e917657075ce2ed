#include "rieffel/deform.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "rieffel/parallel.hpp"
#include "rieffel/rng.hpp"

namespace rieffel {

struct GridOperator::Node {
  enum class Kind { left_mult, right_mult, heisenberg, dense, rank_one, compose, lin_comb };

  Kind kind;
  TorusGrid grid;
  int k;

  // left_mult / right_mult: the factor's spectrum and the skew form.
  std::optional<GridFunction> symbol_freq;
  std::optional<SkewForm> j;

  // heisenberg: lattice steps and the central phase.
  std::vector<int> a_steps, b_steps;
  double c = 0.0;

  // dense: matrix over the (point, row) coordinate space.
  Eigen::MatrixXcd mat;

  // rank_one: h -> w <v, h> (both position-space).
  std::optional<GridFunction> w_fn, v_fn;

  // compose (applied right to left) / lin_comb.
  std::vector<GridOperator> children;
  std::vector<Complex> coeffs;

  Node(Kind kd, TorusGrid g, int kdim) : kind(kd), grid(g), k(kdim) {}
};

namespace {

using Node = GridOperator::Node;
using Kind = Node::Kind;

GridOperator make_node(std::shared_ptr<Node> node) {
  return GridOperator(std::shared_ptr<const Node>(std::move(node)));
}

GridFunction to_frequency(const GridFunction& f) {
  return f.space() == Space::frequency ? f : fourier(f);
}

GridFunction to_position(const GridFunction& f) {
  return f.space() == Space::position ? f : fourier_inv(f);
}

std::vector<std::int64_t> support_modes(const GridFunction& f_hat) {
  std::vector<std::int64_t> supp;
  int kk = f_hat.k() * f_hat.k();
  for (std::int64_t q = 0; q < f_hat.point_count(); ++q) {
    const Complex* p = f_hat.at(q);
    for (int e = 0; e < kk; ++e) {
      if (p[e] != Complex(0, 0)) {
        supp.push_back(q);
        break;
      }
    }
  }
  return supp;
}

// out(q) = (2 pi)^{-n/2} dw  sum_w  L(w) R(wrap(q - w)) e^{i <xi_q, J xi_w>/(2 pi)}.
// The sum runs over the smaller of the two supports; skipping exact zeros
// leaves the value unchanged.
GridFunction twisted_convolution(const GridFunction& lhs_hat, const GridFunction& rhs_hat,
                                 const SkewForm& j) {
  const TorusGrid& grid = lhs_hat.grid();
  if (!(grid == rhs_hat.grid()) || lhs_hat.k() != rhs_hat.k())
    throw std::invalid_argument("deformed_product: grid or algebra dimension mismatch");
  if (j.dim() != grid.dim())
    throw std::invalid_argument("deformed_product: skew form has wrong dimension");

  int n = grid.dim();
  int nsamp = grid.samples();
  int k = lhs_hat.k();
  std::int64_t count = grid.point_count();
  double scale = std::pow(2.0 * std::numbers::pi, -0.5 * n) * grid.freq_cell_volume();
  double inv_two_pi = 1.0 / (2.0 * std::numbers::pi);
  bool twist = !j.is_zero();

  std::vector<std::int64_t> supp_l = support_modes(lhs_hat);
  std::vector<std::int64_t> supp_r = support_modes(rhs_hat);
  bool sum_over_left = supp_l.size() <= supp_r.size();
  const std::vector<std::int64_t>& supp = sum_over_left ? supp_l : supp_r;

  // Per-axis indices of the summation modes, hoisted out of the q loop.
  std::vector<int> supp_idx(supp.size() * n);
  for (std::size_t s = 0; s < supp.size(); ++s) grid.decode(supp[s], supp_idx.data() + s * n);

  const Eigen::MatrixXd& jm = j.entries();
  GridFunction out(grid, k, Space::frequency);
  parallel_for(count, [&](std::int64_t q) {
    int qi[8], wi[8];
    double jt_xi_q[8];
    grid.decode(q, qi);
    // <xi_q, J xi_w> = <J^T xi_q, xi_w>; the left factor is fixed per output
    // mode, so only a dot product remains in the inner loop.
    for (int ax = 0; ax < n; ++ax) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) acc += jm(r, ax) * grid.freq(qi[r]);
      jt_xi_q[ax] = acc;
    }
    Complex* o = out.at(q);
    for (std::size_t s = 0; s < supp.size(); ++s) {
      const int* si = supp_idx.data() + s * n;
      const Complex* lv;
      const Complex* rv;
      if (sum_over_left) {
        for (int ax = 0; ax < n; ++ax) wi[ax] = si[ax];
        lv = lhs_hat.at(supp[s]);
        int oi[8];
        for (int ax = 0; ax < n; ++ax) {
          int d = qi[ax] - wi[ax];
          oi[ax] = d < 0 ? d + nsamp : d;
        }
        rv = rhs_hat.at(grid.encode(oi));
      } else {
        // Sum index is the right factor's mode u; the left mode is q - u.
        int oi[8];
        for (int ax = 0; ax < n; ++ax) {
          int d = qi[ax] - si[ax];
          wi[ax] = d < 0 ? d + nsamp : d;
          oi[ax] = si[ax];
        }
        lv = lhs_hat.at(grid.encode(wi));
        rv = rhs_hat.at(grid.encode(oi));
      }
      Complex phase(scale, 0);
      if (twist) {
        double dot = 0.0;
        for (int ax = 0; ax < n; ++ax) dot += jt_xi_q[ax] * grid.freq(wi[ax]);
        phase = scale * std::exp(Complex(0, dot * inv_two_pi));
      }
      for (int r = 0; r < k; ++r)
        for (int c2 = 0; c2 < k; ++c2) {
          Complex acc(0, 0);
          for (int l = 0; l < k; ++l) acc += lv[r * k + l] * rv[l * k + c2];
          o[r * k + c2] += phase * acc;
        }
    }
  });
  return out;
}

double lattice_steps_or_throw(double value, double unit, const char* what) {
  double ratio = value / unit;
  double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw std::invalid_argument(std::string(what) + ": parameter is off the lattice");
  return rounded;
}

}  // namespace

GridFunction deformed_product(const GridFunction& f, const GridFunction& g, const SkewForm& j) {
  GridFunction prod_hat = twisted_convolution(to_frequency(f), to_frequency(g), j);
  return fourier_inv(prod_hat);
}

const TorusGrid& GridOperator::grid() const { return node_->grid; }
int GridOperator::k() const { return node_->k; }

GridFunction GridOperator::apply(const GridFunction& g) const {
  if (g.space() != Space::position)
    throw std::invalid_argument("GridOperator::apply: input must be position-space");
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::left_mult:
    case Kind::right_mult:
      return to_position(apply_freq(fourier(g)));
    case Kind::heisenberg: {
      const TorusGrid& grid = n.grid;
      int k = n.k, kk = k * k, dims = grid.dim(), nsamp = grid.samples();
      GridFunction out(grid, k, Space::position);
      Complex central = std::exp(Complex(0, n.c));
      int mi[8], pi[8];
      for (std::int64_t m = 0; m < grid.point_count(); ++m) {
        grid.decode(m, mi);
        double bx = 0.0;
        for (int ax = 0; ax < dims; ++ax) {
          bx += n.b_steps[ax] * grid.freq_step() * grid.coord(mi[ax]);
          int d = mi[ax] - n.a_steps[ax];
          d %= nsamp;
          if (d < 0) d += nsamp;
          pi[ax] = d;
        }
        Complex phase = central * std::exp(Complex(0, bx));
        const Complex* src = g.at(grid.encode(pi));
        Complex* dst = out.at(m);
        for (int e = 0; e < kk; ++e) dst[e] = phase * src[e];
      }
      return out;
    }
    case Kind::dense: {
      const TorusGrid& grid = n.grid;
      int k = n.k;
      std::int64_t m_count = grid.point_count();
      GridFunction out(grid, k, Space::position);
      Eigen::VectorXcd col(m_count * k), res(m_count * k);
      for (int c2 = 0; c2 < k; ++c2) {
        for (std::int64_t m = 0; m < m_count; ++m)
          for (int r = 0; r < k; ++r) col(m * k + r) = g.at(m)[r * k + c2];
        res = n.mat * col;
        for (std::int64_t m = 0; m < m_count; ++m)
          for (int r = 0; r < k; ++r) out.at(m)[r * k + c2] = res(m * k + r);
      }
      return out;
    }
    case Kind::rank_one: {
      MatrixElement ip = inner_product_E(*n.v_fn, g);
      const GridFunction& w = *n.w_fn;
      int k = n.k;
      GridFunction out(n.grid, k, Space::position);
      for (std::int64_t m = 0; m < n.grid.point_count(); ++m) {
        const Complex* a = w.at(m);
        Complex* o = out.at(m);
        for (int r = 0; r < k; ++r)
          for (int c2 = 0; c2 < k; ++c2) {
            Complex s(0, 0);
            for (int l = 0; l < k; ++l) s += a[r * k + l] * ip(l, c2);
            o[r * k + c2] = s;
          }
      }
      return out;
    }
    case Kind::compose: {
      GridFunction cur = g;
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) cur = it->apply(cur);
      return cur;
    }
    case Kind::lin_comb: {
      GridFunction acc(n.grid, n.k, Space::position);
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        GridFunction term = n.children[i].apply(g);
        term *= n.coeffs[i];
        acc += term;
      }
      return acc;
    }
  }
  throw std::logic_error("GridOperator::apply: unknown node kind");
}

GridFunction GridOperator::apply_freq(const GridFunction& g_hat) const {
  if (g_hat.space() != Space::frequency)
    throw std::invalid_argument("GridOperator::apply_freq: input must be frequency-space");
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::left_mult:
      return twisted_convolution(*n.symbol_freq, g_hat, *n.j);
    case Kind::right_mult:
      return twisted_convolution(g_hat, *n.symbol_freq, *n.j);
    case Kind::heisenberg: {
      // F(U f)(xi) = e^{ic} e^{-i<a, xi - b>} F(f)(xi - b), exact on the
      // lattice (both phase representatives agree for lattice a).
      const TorusGrid& grid = n.grid;
      int k = n.k, kk = k * k, dims = grid.dim(), nsamp = grid.samples();
      GridFunction out(grid, k, Space::frequency);
      Complex central = std::exp(Complex(0, n.c));
      int qi[8], pi[8];
      for (std::int64_t q = 0; q < grid.point_count(); ++q) {
        grid.decode(q, qi);
        double ax_dot = 0.0;
        for (int ax = 0; ax < dims; ++ax) {
          int d = qi[ax] - n.b_steps[ax];
          d %= nsamp;
          if (d < 0) d += nsamp;
          pi[ax] = d;
          ax_dot += n.a_steps[ax] * grid.spacing() * grid.freq(d);
        }
        Complex phase = central * std::exp(Complex(0, -ax_dot));
        const Complex* src = g_hat.at(grid.encode(pi));
        Complex* dst = out.at(q);
        for (int e = 0; e < kk; ++e) dst[e] = phase * src[e];
      }
      return out;
    }
    case Kind::compose: {
      GridFunction cur = g_hat;
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) cur = it->apply_freq(cur);
      return cur;
    }
    case Kind::lin_comb: {
      GridFunction acc(n.grid, n.k, Space::frequency);
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        GridFunction term = n.children[i].apply_freq(g_hat);
        term *= n.coeffs[i];
        acc += term;
      }
      return acc;
    }
    case Kind::dense:
    case Kind::rank_one:
      return fourier(apply(fourier_inv(g_hat)));
  }
  throw std::logic_error("GridOperator::apply_freq: unknown node kind");
}

GridOperator GridOperator::adjoint() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::left_mult:
    case Kind::right_mult: {
      // (L_f)^* = L_{f*} with F(f*)(xi) = F(f)(-xi)^*.  For right
      // multiplications the same rule gives (R_g)^* = R_{g*}; at k >= 2 that
      // adjoint is with respect to the tracial inner product (R_g is not
      // right-module linear, so no module adjoint exists), which is the
      // pairing the norm estimators use.
      const GridFunction& sym = *n.symbol_freq;
      const TorusGrid& grid = n.grid;
      int k = n.k, dims = grid.dim(), nsamp = grid.samples();
      GridFunction conj_sym(grid, k, Space::frequency);
      int qi[8], ri[8];
      for (std::int64_t q = 0; q < grid.point_count(); ++q) {
        grid.decode(q, qi);
        for (int ax = 0; ax < dims; ++ax) ri[ax] = qi[ax] == 0 ? 0 : nsamp - qi[ax];
        const Complex* src = sym.at(grid.encode(ri));
        Complex* dst = conj_sym.at(q);
        for (int r = 0; r < k; ++r)
          for (int c2 = 0; c2 < k; ++c2) dst[r * k + c2] = std::conj(src[c2 * k + r]);
      }
      auto node = std::make_shared<Node>(n.kind, grid, k);
      node->symbol_freq = std::move(conj_sym);
      node->j = n.j;
      return make_node(std::move(node));
    }
    case Kind::heisenberg: {
      auto node = std::make_shared<Node>(Kind::heisenberg, n.grid, n.k);
      node->a_steps.resize(n.grid.dim());
      node->b_steps.resize(n.grid.dim());
      double ba = 0.0;
      for (int ax = 0; ax < n.grid.dim(); ++ax) {
        node->a_steps[ax] = -n.a_steps[ax];
        node->b_steps[ax] = -n.b_steps[ax];
        ba += static_cast<double>(n.b_steps[ax]) * n.a_steps[ax];
      }
      // Group inverse: (a, b, c)^{-1} = (-a, -b, -c - <b, a>).
      node->c = -n.c - (2.0 * std::numbers::pi / n.grid.samples()) * ba;
      return make_node(std::move(node));
    }
    case Kind::dense: {
      auto node = std::make_shared<Node>(Kind::dense, n.grid, n.k);
      node->mat = n.mat.adjoint();
      return make_node(std::move(node));
    }
    case Kind::rank_one: {
      auto node = std::make_shared<Node>(Kind::rank_one, n.grid, n.k);
      node->w_fn = n.v_fn;
      node->v_fn = n.w_fn;
      return make_node(std::move(node));
    }
    case Kind::compose: {
      auto node = std::make_shared<Node>(Kind::compose, n.grid, n.k);
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
        node->children.push_back(it->adjoint());
      return make_node(std::move(node));
    }
    case Kind::lin_comb: {
      auto node = std::make_shared<Node>(Kind::lin_comb, n.grid, n.k);
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        node->children.push_back(n.children[i].adjoint());
        node->coeffs.push_back(std::conj(n.coeffs[i]));
      }
      return make_node(std::move(node));
    }
  }
  throw std::logic_error("GridOperator::adjoint: unknown node kind");
}

bool GridOperator::has_exact_derivation() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::left_mult:
    case Kind::right_mult:
    case Kind::heisenberg:
    case Kind::rank_one:
      return true;
    case Kind::dense:
      return false;
    case Kind::compose:
    case Kind::lin_comb:
      for (const auto& ch : n.children)
        if (!ch.has_exact_derivation()) return false;
      return true;
  }
  return false;
}

GridOperator op_left(const GridFunction& f, const SkewForm& j) {
  if (j.dim() != f.grid().dim()) throw std::invalid_argument("op_left: skew form dimension mismatch");
  auto node = std::make_shared<Node>(Kind::left_mult, f.grid(), f.k());
  node->symbol_freq = to_frequency(f);
  node->j = j;
  return make_node(std::move(node));
}

GridOperator op_right(const GridFunction& g, const SkewForm& j) {
  if (j.dim() != g.grid().dim()) throw std::invalid_argument("op_right: skew form dimension mismatch");
  auto node = std::make_shared<Node>(Kind::right_mult, g.grid(), g.k());
  node->symbol_freq = to_frequency(g);
  node->j = j;
  return make_node(std::move(node));
}

GridOperator heisenberg_op_steps(const TorusGrid& grid, int k, std::span<const int> a_steps,
                                 std::span<const int> b_steps, double c) {
  if (static_cast<int>(a_steps.size()) != grid.dim() ||
      static_cast<int>(b_steps.size()) != grid.dim())
    throw std::invalid_argument("heisenberg_op: parameter dimension mismatch");
  auto node = std::make_shared<Node>(Kind::heisenberg, grid, k);
  node->a_steps.assign(a_steps.begin(), a_steps.end());
  node->b_steps.assign(b_steps.begin(), b_steps.end());
  node->c = c;
  return make_node(std::move(node));
}

GridOperator heisenberg_op(const TorusGrid& grid, int k, std::span<const double> a,
                           std::span<const double> b, double c) {
  if (static_cast<int>(a.size()) != grid.dim() || static_cast<int>(b.size()) != grid.dim())
    throw std::invalid_argument("heisenberg_op: parameter dimension mismatch");
  std::vector<int> a_steps(grid.dim()), b_steps(grid.dim());
  for (int ax = 0; ax < grid.dim(); ++ax) {
    a_steps[ax] = static_cast<int>(lattice_steps_or_throw(a[ax], grid.spacing(), "heisenberg_op: a"));
    b_steps[ax] = static_cast<int>(lattice_steps_or_throw(b[ax], grid.freq_step(), "heisenberg_op: b"));
  }
  return heisenberg_op_steps(grid, k, a_steps, b_steps, c);
}

GridOperator identity_op(const TorusGrid& grid, int k) {
  std::vector<int> zero(grid.dim(), 0);
  return heisenberg_op_steps(grid, k, zero, zero, 0.0);
}

GridOperator zero_op(const TorusGrid& grid, int k) {
  auto node = std::make_shared<Node>(Kind::lin_comb, grid, k);
  return make_node(std::move(node));
}

GridOperator dense_op(const TorusGrid& grid, int k, Eigen::MatrixXcd matrix) {
  std::int64_t d = grid.point_count() * k;
  if (matrix.rows() != d || matrix.cols() != d)
    throw std::invalid_argument("dense_op: matrix must be (N^n k) x (N^n k)");
  auto node = std::make_shared<Node>(Kind::dense, grid, k);
  node->mat = std::move(matrix);
  return make_node(std::move(node));
}

GridOperator rank_one_op(const GridFunction& w, const GridFunction& v) {
  if (!(w.grid() == v.grid()) || w.k() != v.k())
    throw std::invalid_argument("rank_one_op: mismatched factors");
  auto node = std::make_shared<Node>(Kind::rank_one, w.grid(), w.k());
  node->w_fn = to_position(w);
  node->v_fn = to_position(v);
  return make_node(std::move(node));
}

GridOperator compose(const GridOperator& a, const GridOperator& b) {
  if (!(a.grid() == b.grid()) || a.k() != b.k())
    throw std::invalid_argument("compose: operator domains differ");
  auto node = std::make_shared<Node>(Kind::compose, a.grid(), a.k());
  node->children = {a, b};
  return make_node(std::move(node));
}

GridOperator lin_comb(std::vector<Complex> coeffs, std::vector<GridOperator> terms) {
  if (coeffs.size() != terms.size())
    throw std::invalid_argument("lin_comb: coefficient/term count mismatch");
  if (terms.empty()) throw std::invalid_argument("lin_comb: empty combination needs a grid (use zero_op)");
  auto node = std::make_shared<Node>(Kind::lin_comb, terms.front().grid(), terms.front().k());
  for (const auto& t : terms)
    if (!(t.grid() == node->grid) || t.k() != node->k)
      throw std::invalid_argument("lin_comb: operator domains differ");
  node->children = std::move(terms);
  node->coeffs = std::move(coeffs);
  return make_node(std::move(node));
}

GridOperator scale_op(Complex c, const GridOperator& a) { return lin_comb({c}, {a}); }

GridOperator sum_op(const GridOperator& a, const GridOperator& b) {
  return lin_comb({Complex(1, 0), Complex(1, 0)}, {a, b});
}

GridOperator ad_u_steps(const GridOperator& a_op, std::span<const int> a_steps,
                        std::span<const int> b_steps) {
  GridOperator u = heisenberg_op_steps(a_op.grid(), a_op.k(), a_steps, b_steps, 0.0);
  return compose(compose(u, a_op), u.adjoint());
}

GridOperator ad_u(const GridOperator& a_op, std::span<const double> a, std::span<const double> b) {
  GridOperator u = heisenberg_op(a_op.grid(), a_op.k(), a, b, 0.0);
  return compose(compose(u, a_op), u.adjoint());
}

double derivation_min_step(const TorusGrid& grid, int k_index) {
  if (k_index < 1 || k_index > 2 * grid.dim())
    throw std::invalid_argument("derivation: direction index out of range");
  return k_index <= grid.dim() ? grid.spacing() : 1.0 / grid.length();
}

namespace {

// Conjugation at parameter t along direction k_index.  Translations use the
// family Ad U(-t e_k, 0); modulations use Ad U(0, 2 pi t e_k), the
// parameterization under which d(L_f) = L_{d_v f} holds with v = e_k and
// v = J e_k respectively.
GridOperator ad_along(int k_index, const GridOperator& a_op, int steps) {
  const TorusGrid& grid = a_op.grid();
  int n = grid.dim();
  std::vector<int> a_steps(n, 0), b_steps(n, 0);
  if (k_index <= n) {
    a_steps[k_index - 1] = -steps;
  } else {
    b_steps[k_index - n - 1] = steps;
  }
  return ad_u_steps(a_op, a_steps, b_steps);
}

}  // namespace

GridOperator derivation(int k_index, const GridOperator& a_op, double step) {
  const TorusGrid& grid = a_op.grid();
  double unit = derivation_min_step(grid, k_index);
  if (step < unit * (1.0 - 1e-9))
    throw std::invalid_argument("derivation: step below lattice resolution");
  double ratio = lattice_steps_or_throw(step, unit, "derivation: step");
  int s = static_cast<int>(ratio);
  double t = s * unit;
  // Richardson-combined symmetric differences at t and 2t.
  std::vector<Complex> coeffs = {
      Complex(2.0 / (3.0 * t), 0), Complex(-2.0 / (3.0 * t), 0),
      Complex(-1.0 / (12.0 * t), 0), Complex(1.0 / (12.0 * t), 0)};
  std::vector<GridOperator> terms = {ad_along(k_index, a_op, s), ad_along(k_index, a_op, -s),
                                     ad_along(k_index, a_op, 2 * s),
                                     ad_along(k_index, a_op, -2 * s)};
  return lin_comb(std::move(coeffs), std::move(terms));
}

namespace {

GridFunction multiply_by_coordinate(const GridFunction& f, int axis, Complex factor) {
  GridFunction pos = to_position(f);
  GridFunction out = pos;
  const TorusGrid& grid = f.grid();
  int kk = f.k() * f.k();
  int idx[8];
  for (std::int64_t m = 0; m < grid.point_count(); ++m) {
    grid.decode(m, idx);
    Complex w = factor * grid.coord(idx[axis]);
    Complex* o = out.at(m);
    for (int e = 0; e < kk; ++e) o[e] *= w;
  }
  return out;
}

std::vector<double> derivation_direction(const SkewForm& j, int k_index) {
  int n = j.dim();
  std::vector<double> v(n, 0.0);
  if (k_index <= n) {
    v[k_index - 1] = 1.0;
  } else {
    std::vector<double> e(n, 0.0);
    e[k_index - n - 1] = 1.0;
    v = j.apply(e);
  }
  return v;
}

}  // namespace

GridOperator derivation_exact(int k_index, const GridOperator& a_op) {
  const Node& n = a_op.node();
  const TorusGrid& grid = n.grid;
  if (k_index < 1 || k_index > 2 * grid.dim())
    throw std::invalid_argument("derivation: direction index out of range");
  switch (n.kind) {
    case Kind::left_mult: {
      // d_k(L_f) = L_{d_{v_k} f}, v_k = e_k for translations, J e_k for
      // modulation directions.
      std::vector<double> v = derivation_direction(*n.j, k_index);
      return op_left(directional_derivative(*n.symbol_freq, v), *n.j);
    }
    case Kind::right_mult: {
      std::vector<double> v = derivation_direction(*n.j, k_index);
      GridFunction dsym = directional_derivative(*n.symbol_freq, v);
      if (k_index > grid.dim()) dsym *= Complex(-1, 0);
      return op_right(dsym, *n.j);
    }
    case Kind::heisenberg: {
      // Conjugation multiplies U_{a,b,c} by a pure phase; differentiate it.
      Complex coeff;
      if (k_index <= grid.dim()) {
        coeff = Complex(0, n.b_steps[k_index - 1] * grid.freq_step());
      } else {
        coeff = Complex(0, 2.0 * std::numbers::pi * n.a_steps[k_index - grid.dim() - 1] *
                               grid.spacing());
      }
      return scale_op(coeff, a_op);
    }
    case Kind::rank_one: {
      GridFunction dw = n.w_fn.value(), dv = n.v_fn.value();
      if (k_index <= grid.dim()) {
        std::vector<double> e(grid.dim(), 0.0);
        e[k_index - 1] = 1.0;
        dw = directional_derivative(*n.w_fn, e);
        dv = directional_derivative(*n.v_fn, e);
      } else {
        int axis = k_index - grid.dim() - 1;
        Complex f2pi(0, 2.0 * std::numbers::pi);
        dw = multiply_by_coordinate(*n.w_fn, axis, f2pi);
        dv = multiply_by_coordinate(*n.v_fn, axis, f2pi);
      }
      return sum_op(rank_one_op(to_position(dw), *n.v_fn), rank_one_op(*n.w_fn, to_position(dv)));
    }
    case Kind::compose: {
      std::vector<Complex> coeffs;
      std::vector<GridOperator> terms;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        std::vector<GridOperator> factors = n.children;
        factors[i] = derivation_exact(k_index, factors[i]);
        auto node = std::make_shared<Node>(Kind::compose, grid, n.k);
        node->children = std::move(factors);
        terms.push_back(make_node(std::move(node)));
        coeffs.emplace_back(1, 0);
      }
      return lin_comb(std::move(coeffs), std::move(terms));
    }
    case Kind::lin_comb: {
      if (n.children.empty()) return a_op;  // zero operator
      std::vector<Complex> coeffs = n.coeffs;
      std::vector<GridOperator> terms;
      for (const auto& ch : n.children) terms.push_back(derivation_exact(k_index, ch));
      return lin_comb(std::move(coeffs), std::move(terms));
    }
    case Kind::dense:
      throw std::invalid_argument("derivation_exact: dense operators have no structural rule");
  }
  throw std::logic_error("derivation_exact: unknown node kind");
}

Eigen::MatrixXcd materialize(const GridOperator& a_op) {
  const TorusGrid& grid = a_op.grid();
  int k = a_op.k();
  std::int64_t d = grid.point_count() * k;
  Eigen::MatrixXcd mat(d, d);
  for (std::int64_t m0 = 0; m0 < grid.point_count(); ++m0)
    for (int r0 = 0; r0 < k; ++r0) {
      GridFunction basis(grid, k, Space::position);
      basis.at(m0)[r0 * k + 0] = Complex(1, 0);
      GridFunction img = a_op.apply(basis);
      for (std::int64_t m = 0; m < grid.point_count(); ++m)
        for (int r = 0; r < k; ++r) mat(m * k + r, m0 * k + r0) = img.at(m)[r * k + 0];
    }
  return mat;
}

double operator_norm_dense(const GridOperator& a_op) {
  Eigen::MatrixXcd mat = materialize(a_op);
  Eigen::MatrixXcd gram = mat.adjoint() * mat;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

namespace {

double hs_norm(const GridFunction& f) {
  double acc = 0.0;
  for (const Complex& v : f.raw()) acc += std::norm(v);
  return std::sqrt(acc * f.grid().cell_volume());
}

}  // namespace

double operator_norm_estimate(const GridOperator& a_op, std::uint64_t seed, int iterations) {
  const TorusGrid& grid = a_op.grid();
  int k = a_op.k();
  Rng rng(seed);
  GridFunction v(grid, k, Space::position);
  for (Complex& z : v.raw()) z = rng.normal_complex();
  GridOperator adj = a_op.adjoint();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    GridFunction w = a_op.apply(v);
    double wn = hs_norm(w);
    double vn = hs_norm(v);
    if (wn == 0.0 || vn == 0.0) return 0.0;
    estimate = wn / vn;
    v = adj.apply(w);
    double nn = hs_norm(v);
    if (nn == 0.0) return estimate;
    v *= Complex(1.0 / nn, 0);
  }
  return estimate;
}

double spectrum_l1_norm(const GridFunction& f_hat) {
  const GridFunction spec = to_frequency(f_hat);
  double acc = 0.0;
  for (std::int64_t q = 0; q < spec.point_count(); ++q) acc += cstar_norm(spec.value(q));
  return acc * spec.grid().freq_cell_volume();
}

}  // namespace rieffel
