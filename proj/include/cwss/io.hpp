#pragma once

#include "cwss/harness.hpp"
#include "cwss/measurement.hpp"
#include "cwss/recovery.hpp"
#include "cwss/signal.hpp"

#include <string>
#include <vector>

// File emission for spectra, matrices and recovery diagnostics. Every writer
// throws IoError naming the path on failure.
namespace cwss::io {

/// bin_index,freq_hz,re,im,magnitude,occupancy
void write_spectrum_csv(const std::string& path, const signal::SpectrumProfile& profile,
                        const signal::FrequencySpectrum& spectrum);
/// bin_index,freq_hz,occupancy
void write_occupancy_csv(const std::string& path, const signal::SpectrumProfile& profile,
                         const std::vector<bool>& occupancy);
/// bin,re,im,magnitude
void write_recovered_csv(const std::string& path, const CVector& r_hat);
/// row,col,re,im
void write_matrix_csv(const std::string& path, const CMatrix& m);
/// One index per line.
void write_selection(const std::string& path, const measurement::SelectionMatrix& sel);
/// method, objective, t, tight cone, residuals, iterations, wall time.
std::string diagnostics_json(const std::vector<recovery::RecoveryResult>& results, const std::string& config_echo);
/// bin,freq_hz,truth,<method>... magnitudes of one trial.
void write_plot_csv(const std::string& path, const signal::SpectrumProfile& profile, const harness::TrialResult& trial);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace cwss::io
