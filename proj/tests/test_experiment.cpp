#include <gtest/gtest.h>

#include <filesystem>

#include "rieffel/experiment.hpp"

namespace rieffel {
namespace {

namespace fs = std::filesystem;

TEST(Config, DefaultsAndOverrides) {
  ExperimentConfig cfg = parse_config_text("");
  EXPECT_EQ(cfg.n, 1);
  EXPECT_EQ(cfg.N, 128);
  cfg = parse_config_text("n = 2\nN = 32\nL = 12.8\nk_list = 1,2\nthetas = 0,0.5\nband = 3\n"
                          "seed = 9\nemit = json\n# comment line\n");
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.N, 32);
  EXPECT_EQ(cfg.k_list.size(), 2u);
  EXPECT_EQ(cfg.thetas.size(), 2u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_FALSE(cfg.emit_csv);
  EXPECT_TRUE(cfg.emit_json);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config_text("bogus_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("n\n"), ConfigError);
  EXPECT_THROW(parse_config_text("N = 48\n"), ConfigError);
  EXPECT_THROW(parse_config_text("N = abc\n"), ConfigError);
  EXPECT_THROW(parse_config_text("band = 0\n"), ConfigError);
  // A non-skew explicit J is rejected before any computation.
  EXPECT_THROW(parse_config_text("n = 2\nj_entries = 0,1,1,0\n"), ConfigError);
  EXPECT_NO_THROW(parse_config_text("n = 2\nj_entries = 0,1,-1,0\n"));
}

TEST(Suites, IdentitiesPassAtSmallScaleAndAreDeterministic) {
  ExperimentConfig cfg;
  cfg.n = 1;
  cfg.N = 32;
  cfg.L = 8.0;
  cfg.k_list = {1, 2};
  cfg.thetas = {0.0};
  cfg.band = 3;
  cfg.trials_plancherel = 5;
  cfg.trials_weyl = 5;
  cfg.trials_homomorphism = 4;
  cfg.trials_l2 = 5;
  cfg.trials_commutation = 4;
  cfg.trials_left_inverse = 3;
  cfg.out_dir = (fs::temp_directory_path() / "rieffel_suite_out").string();
  Report r1 = run_identities(cfg);
  EXPECT_TRUE(r1.all_pass());
  std::string j1 = report_to_json(r1, cfg);
  Report r2 = run_identities(cfg);
  EXPECT_EQ(j1, report_to_json(r2, cfg));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "identities.json"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "identities.csv"));
  fs::remove_all(cfg.out_dir);
}

TEST(Suites, ConjectureSmallScale) {
  ExperimentConfig cfg;
  cfg.n = 1;
  cfg.N = 32;
  cfg.L = 8.0;
  cfg.k_list = {1};
  cfg.thetas = {0.0};
  cfg.band = 3;
  cfg.trials_conjecture = 3;
  cfg.out_dir = (fs::temp_directory_path() / "rieffel_conj_out").string();
  Report report = run_conjecture(cfg);
  EXPECT_TRUE(report.all_pass());
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "conjecture_verdicts.json"));
  fs::remove_all(cfg.out_dir);
}

TEST(Suites, MollifierSmallScale) {
  ExperimentConfig cfg;
  cfg.n = 1;
  cfg.k_list = {1};
  cfg.thetas = {0.0};
  cfg.out_dir = (fs::temp_directory_path() / "rieffel_moll_out").string();
  Report report = run_mollifier(cfg);
  for (const auto& row : report.rows)
    EXPECT_TRUE(row.pass) << row.name << " residual " << row.residual << " gate " << row.gate;
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "mollifier_approx_identity_k1.csv"));
  fs::remove_all(cfg.out_dir);
}

}  // namespace
}  // namespace rieffel
