#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rieffel/mollifier.hpp"
#include "rieffel/rng.hpp"
#include "rieffel/symbol.hpp"

namespace rieffel {

/// Flat key = value experiment description; the schema is documented in the
/// README.  Defaults reproduce the desk-scale suites.
struct ExperimentConfig {
  int n = 1;
  int N = 128;
  double L = 16.0;
  std::vector<int> k_list = {1, 2};
  std::vector<double> thetas = {0.0, 0.5, 2.0};
  /// Explicit row-major n x n entries for J; when set it replaces the theta
  /// sweep with this single form.  Must be skew-symmetric.
  std::vector<double> j_entries;
  int band = 5;
  std::uint64_t seed = 1;

  int trials_plancherel = 50;
  int trials_weyl = 20;
  int trials_homomorphism = 30;
  int trials_l2 = 100;
  int trials_commutation = 50;
  int trials_left_inverse = 30;
  int trials_conjecture = 20;

  /// Mollifier sweep; empty means every admissible index on the grid.
  std::vector<int> m_list;
  /// Grid for the mollifier/symbol sweeps.  0 picks the desk-scale default
  /// for the dimension: N = 2048, L = 1024 at n = 1 (where the convergence
  /// thresholds are calibrated) and N = 64, L = 40 at n >= 2.
  int mollifier_N = 0;
  double mollifier_L = 0.0;

  double tol_verify = 1e-8;
  double floor_commutant = 0.1;

  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct ReportRow {
  std::string suite;
  std::string name;
  /// The identity or bound the row exercises, written as mathematics.
  std::string anchor;
  double residual = 0.0;
  double gate = 0.0;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<ReportRow> rows;
  bool all_pass() const;
};

std::string report_to_json(const Report& report, const ExperimentConfig& cfg);
std::string report_to_csv(const Report& report);

/// Random ensembles (deterministic in the Rng stream).
/// Band-limited frequency representation with independent normal modes on
/// the centered band |j|_inf <= band, normalized to norm_E == 1.
GridFunction random_band_limited(const TorusGrid& grid, int k, int band, Rng& rng);
std::vector<std::pair<GridFunction, GridFunction>> random_probe_pairs(const TorusGrid& grid, int k,
                                                                      int band, int count,
                                                                      Rng& rng);

/// Residual checks shared by the CLI suites and the acceptance gate.  Each
/// returns the worst observed residual (or ratio) over the ensemble.
namespace checks {

double plancherel_isometry(const TorusGrid& grid, int k, int band, int trials, Rng& rng);
double plancherel_adjoint(const TorusGrid& grid, int k, int band, int trials, Rng& rng);
double weyl_relation(const TorusGrid& grid, int k, const SkewForm& j, int pairs, Rng& rng);
double homomorphism(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                    Rng& rng);
double involution(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials, Rng& rng);
double undeformed_limit(const TorusGrid& grid, int k, int band, int trials, Rng& rng);
/// max over pairs of ||L_f g||_{L2} / ((2 pi)^{-n/2} ||F f||_1 ||g||_{L2}).
double l2_bound_ratio(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                      Rng& rng);
double commutation(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                   Rng& rng);
double adjoint_contract(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                        Rng& rng);
double left_inverse(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                    Rng& rng);

struct SweepGates {
  bool non_increasing = false;
  double final_residual = 0.0;
  double initial_residual = 0.0;
  bool all_zero = false;
};

SweepGates sweep_gates(const std::vector<MollifierRow>& rows, double slack);

}  // namespace checks

/// Positive-direction conjecture trial: verify_conjecture(op_left(f)) for a
/// random band-limited f; returns the recovery error norm_E(f' - f).
struct ConjectureTrial {
  VerdictKind kind;
  double commutant_res;
  double reconstruction_gap;
  double recovery_error;
};
ConjectureTrial conjecture_positive_trial(const TorusGrid& grid, int k, const SkewForm& j,
                                          int band, double tol, Rng& rng);

struct NegativeMember {
  std::string name;
  GridOperator op;
};
/// The non-example ensemble: module rank-one operators, pure translations,
/// pure modulations (modulations are genuine non-members only when J != 0;
/// at J = 0 they are left multiplications by plane waves).
std::vector<NegativeMember> negative_ensemble(const TorusGrid& grid, int k, const SkewForm& j,
                                              int rank_ones, int translations, int modulations,
                                              int band, Rng& rng);

/// Suites driven by a config; reports are written under cfg.out_dir when the
/// emit flags ask for it.
Report run_identities(const ExperimentConfig& cfg);
Report run_mollifier(const ExperimentConfig& cfg);
Report run_conjecture(const ExperimentConfig& cfg);

}  // namespace rieffel
