#pragma once

#include <span>

#include "rieffel/grid.hpp"

namespace rieffel {

/// Forward transform in the angular convention with unit prefactor
/// (2*pi)^(-n/2):  F(g)(xi_j) = (2*pi)^(-n/2) h^n sum_m e^{-i<x_m, xi_j>} g(x_m).
/// Holds verbatim on the centered grids; computed entrywise by FFT with
/// explicit centering phases.  Input must be position-space.
GridFunction fourier(const GridFunction& f);

/// Exact lattice inverse of fourier: the same transform evaluated with the
/// reflected kernel, F^{-1}(g)(x) = F(g)(-x).  Input must be frequency-space.
GridFunction fourier_inv(const GridFunction& g);

/// Spectral partial derivative d^beta f: multiplication by (i xi)^beta in the
/// frequency domain.  beta has one (nonnegative) order per axis.
GridFunction spectral_derivative(const GridFunction& f, std::span<const int> beta);

/// Spectral directional derivative along v (length-n vector): multiplication
/// by i<v, xi>.
GridFunction directional_derivative(const GridFunction& f, std::span<const double> v);

/// Fraction of the total spectral energy carried by modes whose per-axis
/// centered index exceeds N/3 in absolute value (the aliasing-sensitive band).
double spectral_tail_fraction(const GridFunction& f);

}  // namespace rieffel
