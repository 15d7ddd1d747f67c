// cwss: synthesize, sense, run Monte Carlo experiments and summarize reports.
#include "cwss/config.hpp"
#include "cwss/harness.hpp"
#include "cwss/io.hpp"
#include "cwss/measurement.hpp"
#include "cwss/signal.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace cwss;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> methods;
  std::optional<std::size_t> m;
  std::optional<double> delta;
  std::optional<double> mu_factor;
  std::optional<int> parallel;
  std::optional<std::size_t> grid;
  std::vector<std::string> overrides;
  std::string out = ".";
  bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c, bool experiment) {
  cmd->add_option("--config", c.config_path, "key = value config file");
  cmd->add_option("--seed", c.seed, "base random seed");
  cmd->add_option("--grid", c.grid, "frequency grid size N");
  cmd->add_option("--set", c.overrides, "override a config key (key=value, repeatable)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("-v,--verbose", c.verbose, "progress on stderr");
  if (!experiment) return;
  cmd->add_option("--methods", c.methods, "comma-separated subset of bp,lasso,asd");
  cmd->add_option("--m", c.m, "measurement count M");
  cmd->add_option("--delta", c.delta, "perturbation bound delta");
  cmd->add_option("--mu-factor", c.mu_factor, "LASSO mu = factor * ||y||_2");
  cmd->add_option("--trials", c.trials, "Monte Carlo trial count");
  cmd->add_option("--parallel", c.parallel, "worker threads for trials");
}

config::ExperimentConfig resolve(const Common& c) {
  config::ExperimentConfig cfg = c.config_path.empty() ? config::ExperimentConfig{} : config::load(c.config_path);
  config::apply_overrides(cfg, c.overrides);
  if (c.grid) cfg.profile.grid_size = *c.grid;
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (c.methods) cfg.methods = recovery::parse_methods(*c.methods);
  if (c.m) cfg.m = *c.m;
  if (c.delta) cfg.delta = *c.delta;
  if (c.mu_factor) cfg.mu_factor = *c.mu_factor;
  if (c.parallel) cfg.parallel = *c.parallel;
  cfg.validate();
  return cfg;
}

std::string out_path(const Common& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

int cmd_synth(const Common& c) {
  const config::ExperimentConfig cfg = resolve(c);
  const signal::FrequencySpectrum spectrum =
      signal::synthesize_spectrum(cfg.profile, mix_seed(cfg.seed, harness::Stream::spectrum));
  io::write_spectrum_csv(out_path(c, "spectrum.csv"), cfg.profile, spectrum);
  io::write_occupancy_csv(out_path(c, "occupancy.csv"), cfg.profile, spectrum.occupancy);
  if (c.verbose) std::cerr << "wrote " << out_path(c, "spectrum.csv") << " and occupancy.csv\n";
  return 0;
}

int cmd_sense(const Common& c) {
  const config::ExperimentConfig cfg = resolve(c);
  const harness::TrialResult trial = harness::run_trial(cfg, cfg.seed);
  std::vector<recovery::RecoveryResult> results;
  for (const auto& [method, oc] : trial.outcomes) {
    const std::string name = "recovered_" + std::string(recovery::to_string(method)) + ".csv";
    io::write_recovered_csv(out_path(c, name), oc.result.r_hat);
    results.push_back(oc.result);
    if (c.verbose) {
      std::cerr << recovery::to_string(method) << ": " << solver::to_string(oc.result.status) << " after "
                << oc.result.iterations << " iterations, objective " << oc.result.objective_value << '\n';
    }
  }
  io::write_text(out_path(c, "diagnostics.json"), io::diagnostics_json(results, config::render(cfg)));
  return 0;
}

int cmd_mc(const Common& c, const std::string& format) {
  const config::ExperimentConfig cfg = resolve(c);
  if (c.verbose) std::cerr << "running " << cfg.trials << " trials on " << cfg.parallel << " thread(s)\n";
  const harness::McReport report = harness::run_monte_carlo(cfg);
  std::vector<harness::ReportFormat> formats;
  if (format == "both") {
    formats = {harness::ReportFormat::csv, harness::ReportFormat::json};
  } else {
    formats = {harness::parse_report_format(format)};
  }
  for (auto f : formats) harness::export_report(report, f, c.out);
  io::write_plot_csv(out_path(c, "plot.csv"), cfg.profile, harness::run_trial(cfg, cfg.seed));
  std::cout << harness::format_summary({{"mc", report}});
  if (!report.converged_fraction_ok()) {
    std::cerr << "error: converged fraction below " << cfg.min_converged_fraction << '\n';
    return 2;
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& paths) {
  std::vector<std::pair<std::string, harness::McReport>> reports;
  for (const auto& p : paths) reports.emplace_back(p, harness::read_report_json(p));
  std::cout << harness::format_summary(reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressive wideband spectrum sensing under sampling distortion"};
  app.require_subcommand(1);

  Common synth_opts, sense_opts, mc_opts;
  std::string format = "both";
  std::vector<std::string> report_paths;

  auto* synth = app.add_subcommand("synth", "write a ground-truth spectrum and its occupancy");
  add_common(synth, synth_opts, false);
  auto* sense = app.add_subcommand("sense", "recover one capture with each method");
  add_common(sense, sense_opts, true);
  auto* mc = app.add_subcommand("mc", "run the Monte Carlo experiment");
  add_common(mc, mc_opts, true);
  mc->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  auto* report = app.add_subcommand("report", "summarize stored report JSON files");
  report->add_option("files", report_paths, "report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (sense->parsed()) return cmd_sense(sense_opts);
    if (mc->parsed()) return cmd_mc(mc_opts, format);
    if (report->parsed()) return cmd_report(report_paths);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
