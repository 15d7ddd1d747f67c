#pragma once

#include "cwss/config.hpp"
#include "cwss/detection.hpp"
#include "cwss/recovery.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Seeded Monte Carlo runner. Trial i uses seed base_seed + i; within a trial
// each randomized stage draws from its own stream of that seed, so a single
// trial can be re-run in isolation.
namespace cwss::harness {

/// Per-trial random streams.
enum Stream : std::uint64_t { spectrum = 1, awgn = 2, selection = 3, distortion = 4 };

/// Carries the name of the pipeline stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// FNV-1a over the bytes of (B, y); equal across the methods of one trial.
std::uint64_t input_hash(const CMatrix& b, const CVector& y);

struct MethodOutcome {
  recovery::RecoveryResult result;
  /// mu for LASSO, delta for ASD, 0 for BP.
  double param = 0.0;
  std::uint64_t input_hash = 0;
  /// Normalized subband energies; empty when the run did not converge.
  RVector energies;
  std::vector<bool> decisions;
  bool exact_detection = false;
  /// ||r_hat - r||_2 / ||r||_2 against the noise-free ground truth.
  double relative_error = 0.0;
};

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  CVector truth;
  std::vector<bool> occupancy;
  std::vector<bool> active_mask;
  double delta_elem = 0.0;
  double delta_norm = 0.0;
  double delta_solver = 0.0;
  double mu = 0.0;
  double y_norm = 0.0;
  std::map<recovery::Method, MethodOutcome> outcomes;
  /// ASD over LASSO; empty unless both converged.
  RVector eer;
};

TrialResult run_trial(const config::ExperimentConfig& cfg, std::uint64_t seed);

struct MethodRecord {
  recovery::Method method = recovery::Method::bp;
  std::string status;
  int iterations = 0;
  double objective = 0.0;
  double epigraph_t = 0.0;  // NaN unless ASD
  std::string tight;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double relative_error = 0.0;
  std::uint64_t input_hash = 0;
  RVector energies;
  bool exact_detection = false;

  [[nodiscard]] bool converged() const { return status == "optimal"; }
};

struct TrialSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string error;  // empty on success
  double delta_norm = 0.0;
  double delta_solver = 0.0;
  double y_norm = 0.0;
  std::vector<MethodRecord> methods;
  RVector eer;

  [[nodiscard]] const MethodRecord* find(recovery::Method m) const;
};

TrialSummary summarize(const TrialResult& trial);

struct MethodSummary {
  recovery::Method method = recovery::Method::bp;
  std::size_t attempted = 0;
  std::size_t converged = 0;
  RVector mean_energy;
  RVector std_energy;
  double mean_objective = 0.0;
  double mean_iterations = 0.0;
  double mean_relative_error = 0.0;
  /// Converged trials whose own decisions equal the ground-truth active set.
  std::size_t exact_detections = 0;
  /// detect() applied to mean_energy.
  std::vector<bool> mean_decisions;

  [[nodiscard]] double converged_fraction() const;
  [[nodiscard]] double detection_rate() const;
};

/// Wall-clock figures; kept out of the reproducible part of the report.
struct Timing {
  std::map<recovery::Method, double> mean_wall_time_s;
  double total_wall_time_s = 0.0;
};

struct McReport {
  std::string config_echo;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  double threshold = 0.0;
  double min_converged_fraction = 0.0;
  detection::Edges edges;
  std::vector<bool> active_mask;
  std::vector<MethodSummary> methods;
  /// EER of the mean ASD energies over the mean LASSO energies.
  RVector eer_of_means;
  /// Mean of the per-trial EER vectors (NaN entries skipped per subband).
  RVector mean_trial_eer;
  std::size_t failed_trials = 0;
  std::vector<TrialSummary> trial_summaries;
  Timing timing;

  [[nodiscard]] const MethodSummary* find(recovery::Method m) const;
  /// Every method reached min_converged_fraction.
  [[nodiscard]] bool converged_fraction_ok() const;
};

/// Aggregates summaries in the given order.
McReport aggregate(const config::ExperimentConfig& cfg, std::vector<TrialSummary> trials);

/// Runs cfg.trials trials on cfg.parallel threads; the result does not depend
/// on the thread count. Trials that throw are recorded and excluded.
McReport run_monte_carlo(const config::ExperimentConfig& cfg);

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(std::string_view name);

/// csv: table.csv (one row per method, then the EER row). json: report.json
/// (config echo, summaries, per-trial records) and timing.json. Returns the
/// paths written.
std::vector<std::string> export_report(const McReport& report, ReportFormat format, const std::string& dir);

std::string report_to_json(const McReport& report);
McReport report_from_json(std::string_view text);
McReport read_report_json(const std::string& path);

/// Compares every reproducible field bit for bit (timing excluded).
bool identical(const McReport& a, const McReport& b);

/// Human-readable table of one or more reports side by side.
std::string format_summary(const std::vector<std::pair<std::string, McReport>>& reports);

}  // namespace cwss::harness
