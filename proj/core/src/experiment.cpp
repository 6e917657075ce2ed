#include "rieffel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rieffel/io.hpp"

namespace rieffel {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& part : split(v, ',')) {
    std::string p = trim(part);
    if (!p.empty()) out.push_back(std::stoi(p));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) {
    std::string p = trim(part);
    if (!p.empty()) out.push_back(std::stod(p));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "n") cfg.n = std::stoi(value);
      else if (key == "N") cfg.N = std::stoi(value);
      else if (key == "L") cfg.L = std::stod(value);
      else if (key == "k_list") cfg.k_list = parse_int_list(value);
      else if (key == "thetas") cfg.thetas = parse_double_list(value);
      else if (key == "j_entries") cfg.j_entries = parse_double_list(value);
      else if (key == "band") cfg.band = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "trials_plancherel") cfg.trials_plancherel = std::stoi(value);
      else if (key == "trials_weyl") cfg.trials_weyl = std::stoi(value);
      else if (key == "trials_homomorphism") cfg.trials_homomorphism = std::stoi(value);
      else if (key == "trials_l2") cfg.trials_l2 = std::stoi(value);
      else if (key == "trials_commutation") cfg.trials_commutation = std::stoi(value);
      else if (key == "trials_left_inverse") cfg.trials_left_inverse = std::stoi(value);
      else if (key == "trials_conjecture") cfg.trials_conjecture = std::stoi(value);
      else if (key == "m_list") cfg.m_list = parse_int_list(value);
      else if (key == "mollifier_N") cfg.mollifier_N = std::stoi(value);
      else if (key == "mollifier_L") cfg.mollifier_L = std::stod(value);
      else if (key == "tol_verify") cfg.tol_verify = std::stod(value);
      else if (key == "floor_commutant") cfg.floor_commutant = std::stod(value);
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "emit") {
        cfg.emit_csv = cfg.emit_json = false;
        for (const auto& part : split(value, ',')) {
          std::string p = trim(part);
          if (p == "csv") cfg.emit_csv = true;
          else if (p == "json") cfg.emit_json = true;
          else throw ConfigError("config: unknown emit format '" + p + "'");
        }
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value for '" +
                        key + "'");
    }
  }
  // Validation: the SkewForm and TorusGrid constructors enforce their own
  // invariants; fail fast here before any computation.
  if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
  if (cfg.N < 2 || (cfg.N & (cfg.N - 1)) != 0) throw ConfigError("config: N must be a power of two");
  if (!(cfg.L > 0)) throw ConfigError("config: L must be positive");
  if (cfg.k_list.empty()) throw ConfigError("config: k_list must be nonempty");
  for (int k : cfg.k_list)
    if (k < 1) throw ConfigError("config: algebra dimensions must be >= 1");
  if (cfg.band < 1 || cfg.band >= cfg.N / 2) throw ConfigError("config: band must be in [1, N/2)");
  if (cfg.mollifier_N != 0 && (cfg.mollifier_N < 2 || (cfg.mollifier_N & (cfg.mollifier_N - 1)) != 0))
    throw ConfigError("config: mollifier_N must be a power of two (or 0 for the default)");
  if (!cfg.j_entries.empty()) {
    if (static_cast<int>(cfg.j_entries.size()) != cfg.n * cfg.n)
      throw ConfigError("config: j_entries must have n*n values");
    Eigen::MatrixXd j(cfg.n, cfg.n);
    for (int r = 0; r < cfg.n; ++r)
      for (int c = 0; c < cfg.n; ++c) j(r, c) = cfg.j_entries[r * cfg.n + c];
    try {
      SkewForm check(cfg.n, j);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

bool Report::all_pass() const {
  for (const auto& row : rows)
    if (!row.pass) return false;
  return true;
}

std::string report_to_json(const Report& report, const ExperimentConfig& cfg) {
  json j;
  j["config"] = {{"n", cfg.n},       {"N", cfg.N},       {"L", cfg.L},
                 {"band", cfg.band}, {"seed", cfg.seed}, {"k_list", cfg.k_list},
                 {"thetas", cfg.thetas}};
  j["all_pass"] = report.all_pass();
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"suite", row.suite},
                    {"name", row.name},
                    {"anchor", row.anchor},
                    {"residual", row.residual},
                    {"gate", row.gate},
                    {"pass", row.pass},
                    {"detail", row.detail}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "suite,name,anchor,residual,gate,pass,detail\n";
  for (const auto& row : report.rows) {
    out << row.suite << ',' << row.name << ",\"" << row.anchor << "\",";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", row.residual);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", row.gate);
    out << buf << ',' << (row.pass ? "pass" : "FAIL") << ",\"" << row.detail << "\"\n";
  }
  return out.str();
}

GridFunction random_band_limited(const TorusGrid& grid, int k, int band, Rng& rng) {
  if (band < 1 || band >= grid.samples() / 2)
    throw std::invalid_argument("random_band_limited: band must be in [1, N/2)");
  GridFunction f(grid, k, Space::frequency);
  int n = grid.dim();
  std::vector<int> mode(n, -band), idx(n);
  for (;;) {
    for (int ax = 0; ax < n; ++ax) idx[ax] = grid.storage_index(mode[ax]);
    Complex* p = f.at(grid.encode(idx.data()));
    for (int e = 0; e < k * k; ++e) p[e] = rng.normal_complex();
    int ax = n - 1;
    for (; ax >= 0; --ax) {
      if (++mode[ax] <= band) break;
      mode[ax] = -band;
    }
    if (ax < 0) break;
  }
  double nm = norm_E(f);
  f *= Complex(1.0 / nm, 0);
  return f;
}

std::vector<std::pair<GridFunction, GridFunction>> random_probe_pairs(const TorusGrid& grid, int k,
                                                                      int band, int count,
                                                                      Rng& rng) {
  std::vector<std::pair<GridFunction, GridFunction>> probes;
  probes.reserve(count);
  for (int i = 0; i < count; ++i) {
    GridFunction g = random_band_limited(grid, k, band, rng);
    GridFunction h = random_band_limited(grid, k, band, rng);
    probes.emplace_back(std::move(g), std::move(h));
  }
  return probes;
}

namespace checks {

double plancherel_isometry(const TorusGrid& grid, int k, int band, int trials, Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, k, band, rng));
    worst = std::max(worst, std::abs(norm_E(fourier(f)) - norm_E(f)));
  }
  return worst;
}

double plancherel_adjoint(const TorusGrid& grid, int k, int band, int trials, Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, k, band, rng));
    GridFunction g_hat = random_band_limited(grid, k, band, rng);
    MatrixElement lhs = inner_product_E(fourier(f), g_hat);
    MatrixElement rhs = inner_product_E(f, fourier_inv(g_hat));
    worst = std::max(worst, cstar_norm(lhs - rhs));
  }
  return worst;
}

double weyl_relation(const TorusGrid& grid, int k, const SkewForm& j, int pairs, Rng& rng) {
  int n = grid.dim();
  int bound = grid.samples() / 4 - 1;  // keeps a + b inside the band
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    std::vector<int> a(n), b(n), ab(n);
    for (int ax = 0; ax < n; ++ax) {
      a[ax] = rng.uniform_int(-bound, bound);
      b[ax] = rng.uniform_int(-bound, bound);
      ab[ax] = a[ax] + b[ax];
    }
    GridFunction prod = deformed_product(plane_wave_spectrum(grid, k, a),
                                         plane_wave_spectrum(grid, k, b), j);
    // Closed form: e_a x_J e_b = e^{i <b, J a>/(2 pi)} e_{a+b}.
    std::vector<double> xa(n), xb(n);
    for (int ax = 0; ax < n; ++ax) {
      xa[ax] = grid.freq_step() * a[ax];
      xb[ax] = grid.freq_step() * b[ax];
    }
    std::vector<double> ja = j.apply(xa);
    double dot = 0.0;
    for (int ax = 0; ax < n; ++ax) dot += xb[ax] * ja[ax];
    Complex phase = std::exp(Complex(0, dot / (2.0 * std::numbers::pi)));
    GridFunction expected = plane_wave(grid, k, ab);
    expected *= phase;
    worst = std::max(worst, norm_E(prod - expected) / norm_E(expected));
  }
  return worst;
}

double homomorphism(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                    Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(grid, k, band, rng);
    GridFunction g = random_band_limited(grid, k, band, rng);
    GridFunction h = fourier_inv(random_band_limited(grid, k, band, rng));
    GridOperator lf = op_left(f, j), lg = op_left(g, j);
    GridFunction lhs = lf.apply(lg.apply(h));
    GridFunction prod_hat = fourier(deformed_product(f, g, j));
    GridFunction rhs = op_left(prod_hat, j).apply(h);
    worst = std::max(worst, norm_E(lhs - rhs) / norm_E(h));
  }
  return worst;
}

double involution(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                  Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(grid, k, band, rng);
    GridFunction g = random_band_limited(grid, k, band, rng);
    GridFunction lhs = adjoint_pointwise(deformed_product(f, g, j));
    GridFunction rhs = deformed_product(adjoint_pointwise(fourier_inv(g)),
                                        adjoint_pointwise(fourier_inv(f)), j);
    worst = std::max(worst, norm_E(lhs - rhs));
  }
  return worst;
}

double undeformed_limit(const TorusGrid& grid, int k, int band, int trials, Rng& rng) {
  SkewForm zero = SkewForm::zero(grid.dim());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = fourier_inv(random_band_limited(grid, k, band, rng));
    GridFunction g = fourier_inv(random_band_limited(grid, k, band, rng));
    GridFunction lhs = deformed_product(f, g, zero);
    GridFunction rhs = pointwise_product(f, g);
    worst = std::max(worst, norm_E(lhs - rhs));
  }
  return worst;
}

double l2_bound_ratio(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                      Rng& rng) {
  double worst = 0.0;
  double pref = std::pow(2.0 * std::numbers::pi, -0.5 * grid.dim());
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(grid, k, band, rng);
    GridFunction g = fourier_inv(random_band_limited(grid, k, band, rng));
    double lhs = norm_L2(op_left(f, j).apply(g));
    double rhs = pref * spectrum_l1_norm(f) * norm_L2(g);
    worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

double commutation(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                   Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(grid, k, band, rng);
    GridFunction g = random_band_limited(grid, k, band, rng);
    GridFunction h = fourier_inv(random_band_limited(grid, k, band, rng));
    GridOperator lf = op_left(f, j), rg = op_right(g, j);
    GridFunction lhs = lf.apply(rg.apply(h));
    GridFunction rhs = rg.apply(lf.apply(h));
    worst = std::max(worst, norm_E(lhs - rhs) / norm_E(h));
  }
  return worst;
}

double adjoint_contract(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                        Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(grid, k, band, rng);
    GridOperator a = op_left(f, j);
    if (t % 3 == 1) {
      std::vector<int> a_steps(grid.dim()), b_steps(grid.dim());
      for (int ax = 0; ax < grid.dim(); ++ax) {
        a_steps[ax] = rng.uniform_int(-grid.samples() / 4, grid.samples() / 4);
        b_steps[ax] = rng.uniform_int(-grid.samples() / 4, grid.samples() / 4);
      }
      a = heisenberg_op_steps(grid, k, a_steps, b_steps, rng.uniform());
    } else if (t % 3 == 2) {
      GridFunction w = fourier_inv(random_band_limited(grid, k, band, rng));
      GridFunction v = fourier_inv(random_band_limited(grid, k, band, rng));
      a = rank_one_op(w, v);
    }
    GridFunction u = fourier_inv(random_band_limited(grid, k, band, rng));
    GridFunction w = fourier_inv(random_band_limited(grid, k, band, rng));
    MatrixElement lhs = inner_product_E(a.apply(u), w);
    MatrixElement rhs = inner_product_E(u, a.adjoint().apply(w));
    worst = std::max(worst, cstar_norm(lhs - rhs));
  }
  return worst;
}

double left_inverse(const TorusGrid& grid, int k, const SkewForm& j, int band, int trials,
                    Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f_hat = random_band_limited(grid, k, band, rng);
    GridFunction f = fourier_inv(f_hat);
    GridFunction recovered = restrict_symbol(extract_symbol(op_left(f_hat, j)));
    worst = std::max(worst, norm_E(recovered - f));
  }
  return worst;
}

SweepGates sweep_gates(const std::vector<MollifierRow>& rows, double slack) {
  SweepGates gates;
  if (rows.empty()) return gates;
  gates.initial_residual = rows.front().residual;
  gates.final_residual = rows.back().residual;
  gates.non_increasing = true;
  gates.all_zero = true;
  double allowance = slack * std::max(gates.initial_residual, 1.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].residual != 0.0) gates.all_zero = false;
    if (i > 0 && rows[i].residual > rows[i - 1].residual + allowance) gates.non_increasing = false;
  }
  return gates;
}

}  // namespace checks

ConjectureTrial conjecture_positive_trial(const TorusGrid& grid, int k, const SkewForm& j,
                                          int band, double tol, Rng& rng) {
  GridFunction f_hat = random_band_limited(grid, k, band, rng);
  GridFunction f = fourier_inv(f_hat);
  auto probes = random_probe_pairs(grid, k, band, 4, rng);
  ConjectureVerdict verdict = verify_conjecture(op_left(f_hat, j), j, probes, tol);
  ConjectureTrial trial{verdict.kind, verdict.commutant_res, verdict.reconstruction_gap, 0.0};
  if (verdict.multiplier) trial.recovery_error = norm_E(*verdict.multiplier - f);
  return trial;
}

std::vector<NegativeMember> negative_ensemble(const TorusGrid& grid, int k, const SkewForm& j,
                                              int rank_ones, int translations, int modulations,
                                              int band, Rng& rng) {
  std::vector<NegativeMember> members;
  // Calibrated once against the default probe ensembles and frozen: narrow
  // rank-one factors keep the commutator correlated with band-limited
  // probes, and modulation frequencies start high enough that the twisted
  // shift J b / (2 pi) moves by a sizable fraction of a cell.
  int factor_band = std::max(1, band / 3);
  for (int i = 0; i < rank_ones; ++i) {
    GridFunction w = fourier_inv(random_band_limited(grid, k, factor_band, rng));
    GridFunction v = fourier_inv(random_band_limited(grid, k, factor_band, rng));
    members.push_back({"rank_one_" + std::to_string(i), rank_one_op(w, v)});
  }
  int n = grid.dim();
  for (int i = 0; i < translations; ++i) {
    std::vector<int> a_steps(n, 0), b_steps(n, 0);
    a_steps[i % n] = grid.samples() / 4 + i * (grid.samples() / 8);
    members.push_back(
        {"translation_" + std::to_string(i), heisenberg_op_steps(grid, k, a_steps, b_steps, 0.0)});
  }
  for (int i = 0; i < modulations; ++i) {
    std::vector<int> a_steps(n, 0), b_steps(n, 0);
    b_steps[i % n] = std::min(grid.samples() / 2 - 1, 2 * band + 3 * (i + 1));
    members.push_back(
        {"modulation_" + std::to_string(i), heisenberg_op_steps(grid, k, a_steps, b_steps, 0.0)});
  }
  return members;
}

namespace {

void emit_report(const Report& report, const ExperimentConfig& cfg, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  if (cfg.emit_json)
    write_file_atomic((fs::path(cfg.out_dir) / (stem + ".json")).string(),
                      report_to_json(report, cfg));
  if (cfg.emit_csv)
    write_file_atomic((fs::path(cfg.out_dir) / (stem + ".csv")).string(), report_to_csv(report));
}

std::string theta_tag(double theta) {
  std::ostringstream out;
  out << "theta=" << theta;
  return out.str();
}

// The J sweep: explicit entries when given, otherwise the standard block
// form at each theta scale.
std::vector<std::pair<std::string, SkewForm>> skew_sweep(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, SkewForm>> sweep;
  if (!cfg.j_entries.empty()) {
    Eigen::MatrixXd j(cfg.n, cfg.n);
    for (int r = 0; r < cfg.n; ++r)
      for (int c = 0; c < cfg.n; ++c) j(r, c) = cfg.j_entries[r * cfg.n + c];
    sweep.emplace_back("J=explicit", SkewForm(cfg.n, j));
    return sweep;
  }
  for (double theta : cfg.thetas)
    sweep.emplace_back(theta_tag(theta), SkewForm::standard(cfg.n, theta));
  return sweep;
}

}  // namespace

Report run_identities(const ExperimentConfig& cfg) {
  Report report;
  TorusGrid grid(cfg.n, cfg.N, cfg.L);
  auto sweep = skew_sweep(cfg);
  for (int k : cfg.k_list) {
    for (std::size_t sj = 0; sj < sweep.size(); ++sj) {
      const SkewForm& j = sweep[sj].second;
      std::string tag = "k=" + std::to_string(k) + "," + sweep[sj].first;
      Rng rng(cfg.seed * 1000003 + static_cast<std::uint64_t>(k) * 101 +
              static_cast<std::uint64_t>(sj) * 16 + 7);

      auto push = [&](const std::string& name, const std::string& anchor, double residual,
                      double gate) {
        report.rows.push_back({"identities", name, anchor, residual, gate, residual <= gate, tag});
      };
      push("plancherel_isometry", "||F f||_2 = ||f||_2",
           checks::plancherel_isometry(grid, k, cfg.band, cfg.trials_plancherel, rng), 1e-12);
      push("plancherel_adjoint", "<F f, g> = <f, F^-1 g>",
           checks::plancherel_adjoint(grid, k, cfg.band, cfg.trials_plancherel, rng), 1e-12);
      push("weyl_relation", "e_a x_J e_b = e^{i<b,Ja>/2pi} e_{a+b}",
           checks::weyl_relation(grid, k, j, cfg.trials_weyl, rng), 1e-12);
      push("homomorphism", "L_f L_g = L_{f x_J g}",
           checks::homomorphism(grid, k, j, cfg.band, cfg.trials_homomorphism, rng), 1e-10);
      push("involution", "(f x_J g)* = g* x_J f*",
           checks::involution(grid, k, j, cfg.band, cfg.trials_homomorphism, rng), 1e-10);
      push("adjoint_contract", "(L_f)* = L_{f*}; <A f, g> = <f, A* g>",
           checks::adjoint_contract(grid, k, j, cfg.band, cfg.trials_homomorphism, rng), 1e-10);
      push("l2_bound", "||L_f g||_L2 <= (2pi)^{-n/2} ||F f||_1 ||g||_L2",
           checks::l2_bound_ratio(grid, k, j, cfg.band, cfg.trials_l2, rng), 1.0 + 1e-12);
      push("commutation", "[L_f, R_g] = 0",
           checks::commutation(grid, k, j, cfg.band, cfg.trials_commutation, rng), 1e-10);
      push("left_inverse", "restrict(symbol(L_f)) = f",
           checks::left_inverse(grid, k, j, cfg.band, cfg.trials_left_inverse, rng), 1e-12);
      if (j.is_zero()) {
        push("undeformed_limit", "x_J at J = 0 is the pointwise product",
             checks::undeformed_limit(grid, k, cfg.band, cfg.trials_homomorphism, rng), 1e-12);
      }
    }
  }
  emit_report(report, cfg, "identities");
  return report;
}

namespace {

GridFunction mollifier_test_function(const TorusGrid& grid, int k) {
  GridFunction g = sample_scalar(
      [](std::span<const double> x) {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return Complex(std::exp(-0.5 * r2), 0);
      },
      grid, k);
  double nm = norm_E(g);
  g *= Complex(1.0 / nm, 0);
  return g;
}

std::vector<int> default_sweep(const MollifierFamily& family, bool resolved_only) {
  int top = family.max_admissible_m();
  if (resolved_only) top = std::max(1, static_cast<int>(std::floor(0.6 * top)));
  std::vector<int> ms;
  for (int m = 1; m <= top; ++m) ms.push_back(m);
  return ms;
}

std::string mollifier_csv(const std::vector<MollifierRow>& rows, int samples) {
  std::ostringstream out;
  out << "m,residual,N\n";
  for (const auto& row : rows) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", row.residual);
    out << row.m << ',' << buf << ',' << samples << "\n";
  }
  return out.str();
}

}  // namespace

Report run_mollifier(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  Report report;
  int sweep_samples = cfg.mollifier_N > 0 ? cfg.mollifier_N : (cfg.n == 1 ? 2048 : 64);
  double sweep_length = cfg.mollifier_L > 0 ? cfg.mollifier_L : (cfg.n == 1 ? 1024.0 : 40.0);
  TorusGrid grid(cfg.n, sweep_samples, sweep_length);
  MollifierFamily family(grid);
  SkewForm j = skew_sweep(cfg).back().second;
  std::vector<int> sweep = cfg.m_list.empty() ? default_sweep(family, true) : cfg.m_list;
  std::vector<int> full_sweep = cfg.m_list.empty() ? default_sweep(family, false) : cfg.m_list;
  fs::create_directories(cfg.out_dir);

  for (int k : cfg.k_list) {
    GridFunction g = mollifier_test_function(grid, k);
    std::string tag = "k=" + std::to_string(k);
    if (cfg.n != 1) tag += " (absolute thresholds are calibrated on the n = 1 default grid)";

    auto rows = approx_identity_test(g, family, sweep, j);
    if (cfg.emit_csv)
      write_file_atomic(
          (fs::path(cfg.out_dir) / ("mollifier_approx_identity_k" + std::to_string(k) + ".csv"))
              .string(),
          mollifier_csv(rows, grid.samples()));
    auto gates = checks::sweep_gates(rows, 1e-12);
    report.rows.push_back({"mollifier", "approx_identity_monotone", "L_{e_m} g -> g",
                           gates.non_increasing ? 0.0 : 1.0, 0.5, gates.non_increasing, tag});
    report.rows.push_back({"mollifier", "approx_identity_final", "||L_{e_m} g - g||_2 -> 0",
                           gates.final_residual, 1e-3 * norm_E(g),
                           gates.final_residual <= 1e-3 * norm_E(g), tag});

    // Uniform bound: the L2 operator-norm estimate of L_{e_m} stays <= 1.
    double worst_norm = 0.0;
    for (int m : sweep) {
      double est = std::pow(2.0 * std::numbers::pi, -0.5 * cfg.n) *
                   spectrum_l1_norm(family.e_m_spectrum(m, 1));
      worst_norm = std::max(worst_norm, est);
    }
    report.rows.push_back({"mollifier", "uniform_bound", "sup_m ||L_{e_m}||_{L2} <= 1", worst_norm,
                           1.0 + 1e-10, worst_norm <= 1.0 + 1e-10, tag});

    int n2 = 2 * cfg.n;
    std::vector<std::pair<std::string, std::vector<DifferentialMonomial>>> d0s;
    {
      std::vector<int> beta(n2, 0);
      beta[0] = 1;
      d0s.push_back({"d1", {{Complex(1, 0), beta}}});
      beta[0] = 2;
      d0s.push_back({"d1^2", {{Complex(1, 0), beta}}});
      std::vector<int> beta2(n2, 0);
      beta2[cfg.n] = 1;
      d0s.push_back({"d_{n+1}", {{Complex(1, 0), beta2}}});
    }
    for (const auto& [name, d0] : d0s) {
      auto decay = derivation_decay_test(d0, g, family, full_sweep, j);
      if (cfg.emit_csv)
        write_file_atomic((fs::path(cfg.out_dir) /
                           ("mollifier_decay_" + name + "_k" + std::to_string(k) + ".csv"))
                              .string(),
                          mollifier_csv(decay, grid.samples()));
      auto dg = checks::sweep_gates(decay, 1e-12);
      bool ratio_ok = dg.all_zero || dg.final_residual <= 1e-2 * dg.initial_residual;
      std::string detail = tag + (dg.all_zero ? " (identically zero)" : "");
      report.rows.push_back({"mollifier", "derivation_decay_" + name, "D0(L_{e_m}) g -> 0",
                             dg.all_zero ? 0.0 : dg.final_residual,
                             dg.all_zero ? 1.0 : 1e-2 * dg.initial_residual,
                             dg.non_increasing && ratio_ok, detail});
    }

    // Symbol convergence at a small sample set.
    GridOperator a_op = op_left(fourier(g), j);
    std::vector<SymbolSample> samples;
    for (int sx = -1; sx <= 1; ++sx)
      for (int sq = -1; sq <= 1; ++sq) {
        std::vector<int> pi(cfg.n, 0), qi(cfg.n, 0);
        pi[0] = grid.samples() / 2 + sx * std::max(1, static_cast<int>(2.0 / grid.spacing()));
        qi[0] = grid.storage_index(sq);
        std::vector<int> pidx(cfg.n);
        for (int ax = 0; ax < cfg.n; ++ax) pidx[ax] = ax == 0 ? pi[0] : grid.samples() / 2;
        samples.push_back({grid.encode(pidx.data()), grid.encode(qi.data())});
      }
    auto conv = symbol_convergence_test(a_op, family, samples, sweep, j);
    std::vector<MollifierRow> conv_rows;
    for (const auto& row : conv) conv_rows.push_back({row.m, row.max_residual});
    if (cfg.emit_csv)
      write_file_atomic(
          (fs::path(cfg.out_dir) / ("mollifier_symbol_convergence_k" + std::to_string(k) + ".csv"))
              .string(),
          mollifier_csv(conv_rows, grid.samples()));
    auto sg = checks::sweep_gates(conv_rows, 1e-12);
    bool sg_ok = sg.all_zero || sg.final_residual <= 1e-3 * sg.initial_residual;
    report.rows.push_back({"mollifier", "symbol_convergence", "S(A L_{e_m}) -> S(A) pointwise",
                           sg.final_residual, sg.all_zero ? 1.0 : 1e-3 * sg.initial_residual,
                           sg.non_increasing && sg_ok, tag});
  }
  emit_report(report, cfg, "mollifier");
  return report;
}

Report run_conjecture(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  Report report;
  TorusGrid grid(cfg.n, cfg.N, cfg.L);
  json verdicts = json::array();
  int mismatches = 0;

  auto sweep = skew_sweep(cfg);
  for (int k : cfg.k_list) {
    for (std::size_t sj = 0; sj < sweep.size(); ++sj) {
      const SkewForm& j = sweep[sj].second;
      double theta = cfg.j_entries.empty() ? cfg.thetas[sj] : 0.0;
      std::string tag = "k=" + std::to_string(k) + "," + sweep[sj].first;
      Rng rng(cfg.seed * 7000003 + static_cast<std::uint64_t>(k) * 131 +
              static_cast<std::uint64_t>(sj) * 16 + 3);

      double worst_recovery = 0.0;
      bool all_left = true;
      for (int t = 0; t < cfg.trials_conjecture; ++t) {
        ConjectureTrial trial =
            conjecture_positive_trial(grid, k, j, cfg.band, cfg.tol_verify, rng);
        if (trial.kind != VerdictKind::is_left_mult) all_left = false;
        if (trial.kind == VerdictKind::reconstruction_mismatch) ++mismatches;
        worst_recovery = std::max(worst_recovery, trial.recovery_error);
        verdicts.push_back({{"ensemble", "positive"},
                            {"operator", "left_mult_random"},
                            {"k", k},
                            {"theta", theta},
                            {"kind", trial.kind == VerdictKind::is_left_mult
                                         ? "IsLeftMult"
                                         : (trial.kind == VerdictKind::not_in_commutant
                                                ? "NotInCommutant"
                                                : "ReconstructionMismatch")},
                            {"commutant_residual", trial.commutant_res},
                            {"reconstruction_gap", trial.reconstruction_gap},
                            {"recovery_error", trial.recovery_error}});
      }
      report.rows.push_back({"conjecture", "positive_direction",
                             "A in commutant & smooth => A = L_{R(S(A))}", worst_recovery, 1e-9,
                             all_left && worst_recovery <= 1e-9, tag});

      bool include_modulations = !j.is_zero();
      auto members = negative_ensemble(grid, k, j, 5, 3, include_modulations ? 3 : 0, cfg.band, rng);
      // Mixed probe bandwidths: narrow pairs keep rank-one commutators
      // correlated, wide pairs expose the unitary non-members.
      auto pairs = random_probe_pairs(grid, k, std::max(1, cfg.band / 3), 4, rng);
      auto wide = random_probe_pairs(grid, k, cfg.band, 4, rng);
      pairs.insert(pairs.end(), wide.begin(), wide.end());
      CommutantProbes probes = make_commutant_probes(std::move(pairs), j);
      double min_residual = members.empty() ? 1.0 : 1e300;
      bool all_rejected = true;
      for (const auto& member : members) {
        ConjectureVerdict verdict = verify_conjecture(member.op, j, probes, cfg.tol_verify);
        if (verdict.kind != VerdictKind::not_in_commutant) all_rejected = false;
        if (verdict.kind == VerdictKind::reconstruction_mismatch) ++mismatches;
        min_residual = std::min(min_residual, verdict.commutant_res);
        verdicts.push_back({{"ensemble", "negative"},
                            {"operator", member.name},
                            {"k", k},
                            {"theta", theta},
                            {"kind", verdict.kind == VerdictKind::not_in_commutant
                                         ? "NotInCommutant"
                                         : (verdict.kind == VerdictKind::is_left_mult
                                                ? "IsLeftMult"
                                                : "ReconstructionMismatch")},
                            {"commutant_residual", verdict.commutant_res}});
      }
      report.rows.push_back({"conjecture", "negative_direction",
                             "A not in commutant => rejected (residual >= floor)", min_residual,
                             cfg.floor_commutant,
                             all_rejected && min_residual >= cfg.floor_commutant,
                             tag + " (residual is a minimum; gate is a floor)"});

      if (!include_modulations) {
        // At J = 0 a pure modulation is L_{e_b}; it must verify as one.
        std::vector<int> a0(cfg.n, 0), b0(cfg.n, 0);
        b0[0] = cfg.band + 3;
        ConjectureVerdict verdict = verify_conjecture(
            heisenberg_op_steps(grid, k, a0, b0, 0.0), j, probes, cfg.tol_verify);
        bool ok = verdict.kind == VerdictKind::is_left_mult;
        report.rows.push_back({"conjecture", "modulation_zero_form",
                               "J = 0: modulations are left multiplications",
                               verdict.reconstruction_gap, cfg.tol_verify, ok, tag});
      }
    }
  }

  report.rows.push_back({"conjecture", "no_reconstruction_mismatch",
                         "reconstruction never fails on commutant members",
                         static_cast<double>(mismatches), 0.5, mismatches == 0, ""});

  fs::create_directories(cfg.out_dir);
  if (cfg.emit_json)
    write_file_atomic((fs::path(cfg.out_dir) / "conjecture_verdicts.json").string(),
                      verdicts.dump(2) + "\n");
  emit_report(report, cfg, "conjecture");
  return report;
}

}  // namespace rieffel
