#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "flexbid/csv.hpp"
#include "flexbid/errors.hpp"
#include "flexbid/pipeline.hpp"

using namespace flexbid;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content = "")
      : path(fs::temp_directory_path() / ("flexbid_pipe_" + name)) {
    if (!content.empty()) {
      std::ofstream out(path);
      out << content;
    }
  }
  ~TempFile() { std::remove(path.string().c_str()); }
};

}  // namespace

TEST_CASE("defaults resolve the derived quantities") {
  const PipelineConfig cfg;
  CHECK(cfg.eps == 0.1);
  CHECK(cfg.resolved_alpha() == doctest::Approx(0.1 / 3.0));
  CHECK(cfg.resolved_in_sample_size() == 216);  // sample-size bound at (0.1, 0.01, 2)
  const ExperimentConfig ec = cfg.experiment_config();
  CHECK(ec.in_sample_size == 216);
  CHECK(ec.alpha == doctest::Approx(0.1 / 3.0));
}

TEST_CASE("config files override defaults and reject unknown keys") {
  TempFile f("good.cfg",
             "# comment\n"
             "eps = 0.2\n"
             "alpha=0.05\n"
             "seed = 99\n"
             "n_evs = 17\n"
             "charger_levels_kw = 3.7, 11\n"
             "\n"
             "cv_reps=250\n");
  PipelineConfig cfg;
  apply_config_file(cfg, f.path);
  CHECK(cfg.eps == 0.2);
  CHECK(cfg.alpha == 0.05);
  CHECK(cfg.seed == 99);
  CHECK(cfg.synth.seed == 99);  // master seed propagates to the generator
  CHECK(cfg.synth.n_evs == 17);
  REQUIRE(cfg.synth.charger_levels_kw.size() == 2);
  CHECK(cfg.synth.charger_levels_kw[1] == 11.0);
  CHECK(cfg.cv_reps == 250);
  validate_pipeline_config(cfg);

  TempFile bad("bad.cfg", "frequency = 50\n");
  PipelineConfig cfg2;
  CHECK_THROWS_AS(apply_config_file(cfg2, bad.path), UsageError);
  TempFile bad2("bad2.cfg", "eps 0.1\n");
  CHECK_THROWS_AS(apply_config_file(cfg2, bad2.path), UsageError);
  TempFile bad3("bad3.cfg", "eps = fast\n");
  CHECK_THROWS_AS(apply_config_file(cfg2, bad3.path), UsageError);
  CHECK_THROWS_AS(apply_config_file(cfg2, fs::path("/nonexistent/x.cfg")), UsageError);
}

TEST_CASE("cross-field validation") {
  PipelineConfig cfg;
  cfg.eps = 0.0;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.alpha = 0.2;  // above eps
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.n_runs = 0;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.in_sample_size = 1;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.grid.lo = -1.0;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.cv_reps = 1;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
  cfg = {};
  cfg.synth.plug_in_prob = 2.0;
  CHECK_THROWS_AS(validate_pipeline_config(cfg), UsageError);
}

TEST_CASE("bids CSV round-trips, including the manifest comment block") {
  TempFile f("bids.csv",
             "# tool: flexbid 1.0.0\n"
             "# seed: 7\n"
             "run,hour,method,alpha,b_up_kw,b_down_kw,feasible\n"
             "0,13,analytical,0.0333,4.25,1.5,1\n"
             "0,14,scenario,0.1,0,0,0\n");
  const auto rows = read_bids_csv(f.path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].hour == 13);
  CHECK(rows[0].method == "analytical");
  CHECK(rows[0].b_up_kw == 4.25);
  CHECK(rows[0].feasible);
  CHECK(rows[1].method == "scenario");
  CHECK(!rows[1].feasible);

  TempFile bad("bids_bad.csv",
               "run,hour,method,alpha,b_up_kw,b_down_kw,feasible\n"
               "0,13,simplex,0.1,1,1,1\n");
  CHECK_THROWS_AS(read_bids_csv(bad.path), DataError);
}

TEST_CASE("fits CSV round-trips no-fit rows as NaN") {
  TempFile f("fits.csv",
             "run,hour,flexibility,threshold_kw,kappa,gamma,n_tail,nll\n"
             "0,3,up,12.5,0.8,1.1,22,31.5\n"
             "0,3,down,0,nan,nan,1,nan\n");
  const auto rows = read_fits_csv(f.path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].flex == Flex::up);
  CHECK(rows[0].kappa == 0.8);
  CHECK(rows[1].flex == Flex::down);
  CHECK(std::isnan(rows[1].kappa));
  CHECK(rows[1].n_tail == 1);
}

TEST_CASE("price CSV rejects duplicates and negative prices") {
  TempFile f("prices.csv",
             "day,hour,pi_up_eur_per_kw,pi_down_eur_per_kw\n"
             "0,0,0.5,0.25\n"
             "0,1,0.5,0.25\n");
  const auto prices = read_prices_csv(f.path);
  CHECK(prices.size() == 2);
  CHECK(prices.at({0, 1}).pi_down == 0.25);

  TempFile dup("prices_dup.csv",
               "day,hour,pi_up_eur_per_kw,pi_down_eur_per_kw\n"
               "0,0,0.5,0.25\n"
               "0,0,0.5,0.25\n");
  CHECK_THROWS_AS(read_prices_csv(dup.path), DataError);
  TempFile neg("prices_neg.csv",
               "day,hour,pi_up_eur_per_kw,pi_down_eur_per_kw\n"
               "0,0,-0.5,0.25\n");
  CHECK_THROWS_AS(read_prices_csv(neg.path), DataError);
}

TEST_CASE("synth driver stamps a manifest and honors the seed") {
  PipelineConfig cfg;
  cfg.seed = 31;
  cfg.synth.n_evs = 6;
  cfg.synth.n_days = 2;
  TempFile out("synth_out.csv");
  cmd_synth(cfg, out.path);
  std::ifstream in(out.path);
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line == "# tool: flexbid 1.0.0");
  const auto records = read_minute_csv(out.path);
  CHECK(!records.empty());

  // Same parameters, same bytes.
  TempFile out2("synth_out2.csv");
  cmd_synth(cfg, out2.path);
  CHECK(fnv1a64_file(out.path) == fnv1a64_file(out2.path));
}

TEST_CASE("estimate driver records input digests in the manifest") {
  PipelineConfig cfg;
  cfg.synth.n_evs = 5;
  cfg.synth.n_days = 2;
  TempFile minutes("est_minutes.csv");
  TempFile hourly("est_hourly.csv");
  cmd_synth(cfg, minutes.path);
  cmd_estimate(cfg, minutes.path, hourly.path);
  std::ifstream in(hourly.path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("# input_minutes_fnv1a64: ") != std::string::npos);
  CHECK(text.find("# subcommand: estimate") != std::string::npos);
  CHECK(read_hourly_csv(hourly.path).size() == 48);
}
