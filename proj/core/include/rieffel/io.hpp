#pragma once

#include <string>

#include "rieffel/grid.hpp"
#include "rieffel/symbol.hpp"

namespace rieffel {

/// Self-describing JSON container for a sampled function: n, N, L, k, the
/// space tag and row-major [re, im] entries.
void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path);

/// Dense operator export in the same container format (square complex matrix
/// over the (point, row) coordinate space plus grid metadata).
void save_dense_operator(const std::string& path, const TorusGrid& grid, int k,
                         const Eigen::MatrixXcd& matrix);
Eigen::MatrixXcd load_dense_operator(const std::string& path, TorusGrid* grid_out = nullptr,
                                     int* k_out = nullptr);

/// CSV export: one row per grid point, coordinates first, then the k*k
/// entries as re/im pairs.
void export_grid_function_csv(const std::string& path, const GridFunction& f);

/// CSV export of a phase-space function: x coordinates, xi coordinates, then
/// entries as re/im pairs.
void export_phase_space_csv(const std::string& path, const PhaseSpaceFunction& a);

/// Write a file atomically (temp file + rename) so partially written outputs
/// are never observed.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace rieffel
