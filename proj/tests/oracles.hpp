#pragma once

#include <vector>

#include "rieffel/deform.hpp"
#include "rieffel/grid.hpp"

// Independent reference computations used to freeze expected test values.
// Everything here is deliberately written against the defining formulas
// (direct sums, quadrature) rather than the library's fast paths.
namespace rieffel::oracles {

/// Largest singular value by Eigen's Jacobi SVD (a different algorithm from
/// the library's Gram eigensolve).
double svd_norm(const MatrixElement& m);

/// Largest eigenvalue of a (Hermitian positive) matrix.
double top_eigenvalue(const MatrixElement& m);

/// Direct O(M^2) evaluation of the forward transform
/// (2 pi)^{-n/2} h^n sum_m e^{-i<x_m, xi_j>} f(x_m).
GridFunction dft_forward(const GridFunction& f);

/// Direct evaluation of the inverse transform.
GridFunction dft_inverse(const GridFunction& g);

/// The forward formula evaluated at reflected points, F(g)(-x), with g a
/// frequency-space function; equals fourier_inv(g) on the lattice.
GridFunction dft_forward_reflected(const GridFunction& g);

/// Regularized brute-force quadrature of the deformed-product double
/// integral for scalar 1-d functions:
///   (f x_J g)(x) = int int f(x + J xi) g(x + y) e^{2 pi i xi y} dy dxi
/// with Gaussian dampers e^{-eps(xi^2 + y^2)} and Richardson extrapolation
/// eps -> 0.  Both integrals are trapezoid sums; the inner one is evaluated
/// for all dual nodes at once with an FFT.  f and g are given by their
/// lattice spectra so off-grid points can be evaluated exactly.
Complex deformed_product_quadrature_1d(const GridFunction& f_hat, const GridFunction& g_hat,
                                       double x, const std::vector<double>& eps_levels);

/// The same regularized quadrature specialized to one axis of a plane-wave
/// pair: int int e^{i c xi} e^{i d y} e^{2 pi i xi y} e^{-eps(xi^2+y^2)},
/// which tends to e^{-i c d / (2 pi)}.
Complex twisted_phase_quadrature(double c, double d, const std::vector<double>& eps_levels);

/// Richardson extrapolation of A(eps) -> A(0) assuming an expansion in eps,
/// for levels eps, eps/2, eps/4, ...
Complex richardson_limit(const std::vector<Complex>& values);

}  // namespace rieffel::oracles
