#include "doctest.h"

#include "cwss/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace cwss;
using namespace cwss::harness;
using recovery::Method;

namespace {

config::ExperimentConfig small_config() {
  config::ExperimentConfig c;
  c.profile.grid_size = 64;
  c.trials = 4;
  c.seed = 11;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cwss_test_harness_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("noiseless sparse trial is recovered by BP") {
  config::ExperimentConfig c;
  c.profile.grid_size = 128;
  c.profile.bands = {{100e6, 115e6, {50, 60}}};
  c.profile.noise_floor_range = {0, 0};
  c.profile.snr_db = signal::kNoiselessSnr;
  c.delta = 0.0;
  c.methods = {Method::bp};
  const TrialResult t = run_trial(c, 5);
  const MethodOutcome& bp = t.outcomes.at(Method::bp);
  REQUIRE(bp.result.converged());
  CHECK(bp.relative_error < 1e-3);
  CHECK(t.delta_norm == 0.0);
}

TEST_CASE("trials are deterministic per seed") {
  const config::ExperimentConfig c = small_config();
  const TrialResult a = run_trial(c, 3);
  const TrialResult b = run_trial(c, 3);
  CHECK(a.truth == b.truth);
  for (Method m : c.methods) {
    CHECK(a.outcomes.at(m).result.r_hat == b.outcomes.at(m).result.r_hat);
    CHECK(a.outcomes.at(m).input_hash == b.outcomes.at(m).input_hash);
  }
  CHECK(run_trial(c, 4).truth != a.truth);
}

TEST_CASE("every method of a trial sees the same draw") {
  config::ExperimentConfig c = small_config();
  c.methods = {Method::bp, Method::lasso, Method::asd};
  const TrialResult t = run_trial(c, 8);
  const std::uint64_t h = t.outcomes.at(Method::bp).input_hash;
  CHECK(t.outcomes.at(Method::lasso).input_hash == h);
  CHECK(t.outcomes.at(Method::asd).input_hash == h);
  CHECK(t.outcomes.at(Method::lasso).param == doctest::Approx(0.1 * t.y_norm));
  CHECK(t.outcomes.at(Method::asd).param == t.delta_elem);
}

TEST_CASE("default experiment energies are normalized per method") {
  config::ExperimentConfig c;
  const TrialResult t = run_trial(c, 1);
  for (Method m : c.methods) {
    const MethodOutcome& oc = t.outcomes.at(m);
    REQUIRE(oc.result.converged());
    CHECK(std::abs(oc.energies.sum() - 1.0) <= 1e-10);
  }
  CHECK(t.eer.size() == 9);
}

TEST_CASE("delta_solver modes pick the configured value") {
  config::ExperimentConfig c = small_config();
  c.delta_solver = config::DeltaSolver::norm;
  const TrialResult t = run_trial(c, 2);
  CHECK(t.delta_solver == t.delta_norm);
  c.delta_solver = config::DeltaSolver::value;
  c.delta_solver_value = 0.3;
  CHECK(run_trial(c, 2).delta_solver == 0.3);
}

TEST_CASE("stage errors carry the stage name") {
  config::ExperimentConfig c = small_config();
  c.m = 1000;
  CHECK_THROWS_AS(run_trial(c, 1), StageError);
  try {
    run_trial(c, 1);
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
  }
}

TEST_CASE("single-trial report equals that trial") {
  config::ExperimentConfig c = small_config();
  c.trials = 1;
  const McReport r = run_monte_carlo(c);
  const TrialResult t = run_trial(c, c.seed);
  for (Method m : c.methods) {
    const MethodSummary* s = r.find(m);
    REQUIRE(s != nullptr);
    CHECK(s->mean_energy == t.outcomes.at(m).energies);
    CHECK(s->mean_objective == t.outcomes.at(m).result.objective_value);
  }
}

TEST_CASE("report means equal an independent re-aggregation of the trials") {
  const McReport r = run_monte_carlo(small_config());
  for (const MethodSummary& s : r.methods) {
    RVector sum = RVector::Zero(9);
    double count = 0;
    for (const TrialSummary& t : r.trial_summaries) {
      const MethodRecord* m = t.find(s.method);
      if (m == nullptr || !m->converged()) continue;
      for (Eigen::Index k = 0; k < 9; ++k) sum[k] += m->energies[k];
      count += 1;
    }
    CHECK(count == static_cast<double>(s.converged));
    CHECK(((sum / count) - s.mean_energy).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(r.converged_fraction_ok());
  CHECK(r.eer_of_means.size() == 9);
  CHECK(r.mean_trial_eer.size() == 9);
}

TEST_CASE("reports do not depend on the worker count") {
  config::ExperimentConfig c = small_config();
  c.trials = 6;
  c.parallel = 1;
  const McReport a = run_monte_carlo(c);
  c.parallel = 4;
  const McReport b = run_monte_carlo(c);
  CHECK(identical(a, b));
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("CSV export has the table layout") {
  const McReport r = run_monte_carlo(small_config());
  const auto dir = scratch("csv");
  const auto files = export_report(r, ReportFormat::csv, dir.string());
  REQUIRE(files.size() == 1);
  std::ifstream in(files[0]);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].rfind("row,subband_1", 0) == 0);
  CHECK(lines[1].rfind("lasso,", 0) == 0);
  CHECK(lines[2].rfind("asd,", 0) == 0);
  CHECK(lines[3].rfind("eer,", 0) == 0);
  for (const auto& l : lines) CHECK(std::count(l.begin(), l.end(), ',') == 9);
}

TEST_CASE("JSON export round trips exactly") {
  const McReport r = run_monte_carlo(small_config());
  const auto dir = scratch("json");
  export_report(r, ReportFormat::json, dir.string());
  CHECK(std::filesystem::exists(dir / "timing.json"));
  const McReport back = read_report_json((dir / "report.json").string());
  CHECK(identical(r, back));
  REQUIRE(back.methods.size() == r.methods.size());
  CHECK(back.methods[0].mean_energy == r.methods[0].mean_energy);
  CHECK(back.trial_summaries[2].methods[1].objective == r.trial_summaries[2].methods[1].objective);
  CHECK(back.trial_summaries[1].methods[0].input_hash == r.trial_summaries[1].methods[0].input_hash);
  CHECK(back.config_echo == r.config_echo);
}

TEST_CASE("format and I/O errors") {
  CHECK_THROWS_AS(parse_report_format("xml"), ConfigError);
  CHECK_THROWS_AS(read_report_json("/nonexistent/report.json"), IoError);
  CHECK_THROWS_AS(report_from_json("{\"trials\": 1}"), IoError);
  CHECK_THROWS_AS(report_from_json("not json"), IoError);
  const McReport r = run_monte_carlo([] {
    auto c = small_config();
    c.trials = 1;
    return c;
  }());
  CHECK_THROWS_AS(export_report(r, ReportFormat::csv, "/proc/cwss_cannot_write_here"), IoError);
}

TEST_CASE("failed trials are recorded and excluded") {
  config::ExperimentConfig c = small_config();
  c.solver.max_iters = 1;
  c.min_converged_fraction = 0.9;
  const McReport r = run_monte_carlo(c);
  for (const auto& s : r.methods) CHECK(s.converged == 0);
  CHECK_FALSE(r.converged_fraction_ok());
  CHECK(r.methods[0].mean_energy.size() == 0);
}

TEST_CASE("summary text lists every method") {
  const McReport r = run_monte_carlo(small_config());
  const std::string text = format_summary({{"a", r}, {"b", r}});
  CHECK(text.find("lasso") != std::string::npos);
  CHECK(text.find("eer") != std::string::npos);
  CHECK(text.find("side by side") != std::string::npos);
}
