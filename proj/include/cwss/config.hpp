#pragma once

#include "cwss/detection.hpp"
#include "cwss/measurement.hpp"
#include "cwss/recovery.hpp"
#include "cwss/signal.hpp"
#include "cwss/solver.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Experiment configuration and its plain-text form:
//
//   # comment
//   grid_size = 512
//   band = 30e6 70e6 100 140      (f_start f_stop psd_lo psd_hi; repeatable)
//   methods = lasso, asd
//
// Unknown keys are rejected. The first `band` line replaces the default band
// list; later ones append.
namespace cwss::config {

/// How the configured delta relates to the entries of the unitary ideal matrix.
enum class DeltaScale {
  entry,     // delta is relative to the entry modulus 1/sqrt(N): delta_elem = delta / sqrt(N)
  absolute,  // delta_elem = delta
};

/// Value handed to the ASD program.
enum class DeltaSolver {
  elem,   // the generator's delta_elem
  norm,   // the realized ||V||_inf of the trial
  value,  // a fixed number
};

struct ExperimentConfig {
  signal::SpectrumProfile profile = signal::default_profile();
  /// 0 selects N/2.
  std::size_t m = 0;
  double delta = 0.7;
  DeltaScale delta_scale = DeltaScale::entry;
  DeltaSolver delta_solver = DeltaSolver::elem;
  double delta_solver_value = 0.0;
  measurement::DistortionModel distortion = measurement::DistortionModel::uniform_modulus;
  double mu_factor = 0.1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<recovery::Method> methods = {recovery::Method::lasso, recovery::Method::asd};
  solver::SolverOptions solver;
  double threshold = 0.05;
  /// Subband boundaries in Hz; empty selects the default nine-subband layout.
  std::vector<double> subband_edges_hz;
  int parallel = 1;
  double min_converged_fraction = 0.9;

  [[nodiscard]] std::size_t measurements() const;
  [[nodiscard]] double delta_elem() const;
  [[nodiscard]] detection::Edges edges() const;
  /// Throws ConfigError or DimensionError.
  void validate() const;
};

/// Applies one `key = value` assignment. `bands_replaced` tracks whether the
/// default band list has already been cleared.
void apply(ExperimentConfig& cfg, std::string_view key, std::string_view value, bool& bands_replaced);

/// Parses config text; `origin` names the source in error messages.
ExperimentConfig parse(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig load(const std::string& path);

/// Applies "key=value" overrides on top of a config.
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides);

/// Canonical key = value listing of every effective setting; parse(render(c))
/// reproduces c. The execution-only `parallel` key is left out when
/// include_execution is false, so results stay comparable across worker counts.
std::string render(const ExperimentConfig& cfg, bool include_execution = true);

std::vector<std::string> known_keys();

}  // namespace cwss::config
