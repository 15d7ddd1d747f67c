#pragma once

#include "cwss/common.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace cwss::signal {

/// One active primary band: [f_start, f_stop) in Hz with a per-bin amplitude range.
struct BandSpec {
  double f_start = 0.0;
  double f_stop = 0.0;
  Interval psd_range;
};

enum class PhasePolicy {
  uniform,  // every bin gets an independent phase on [0, 2pi)
  zero,     // real, non-negative spectrum (handy for tests)
};

/// SNR value that disables additive noise.
inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Declarative description of the monitored band.
///
/// Bin k covers [lo + k*w, lo + (k+1)*w) with w = span/N; a band claims every
/// bin whose center lies in [f_start, f_stop).
struct SpectrumProfile {
  std::size_t grid_size = 512;
  Interval freq_span{0.0, 500e6};
  std::vector<BandSpec> bands;
  Interval noise_floor_range{0.0, 10.0};
  double snr_db = 13.0;
  PhasePolicy phase_policy = PhasePolicy::uniform;

  [[nodiscard]] double bin_width() const;
  [[nodiscard]] double bin_center(std::size_t k) const;
  /// Index of the first bin whose center is >= f, clamped to [0, N].
  [[nodiscard]] std::size_t first_bin_at_or_above(double f) const;
  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

struct FrequencySpectrum {
  CVector r;
  std::vector<bool> occupancy;
  double sample_rate = 0.0;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(r.size()); }
};

struct TimeSignal {
  CVector x;
  double sample_rate = 0.0;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(x.size()); }
};

/// 0-500 MHz, four active bands, noise floor [0, 10], 13 dB SNR, N = 512.
SpectrumProfile default_profile();

/// Ground-truth occupancy; depends only on band edges and the bin grid.
std::vector<bool> occupancy_mask(const SpectrumProfile& profile);

/// Band bins draw |r| uniformly from the band's range. Out-of-band bins draw
/// lo + |N(0, (hi-lo)/3)| clipped to hi from the noise floor range.
FrequencySpectrum synthesize_spectrum(const SpectrumProfile& profile, std::uint64_t seed);

/// x = F^{-1} r (unitary).
TimeSignal spectrum_to_time(const FrequencySpectrum& spectrum);
/// r = F x (unitary).
CVector time_to_spectrum(const TimeSignal& signal);

/// Adds circular complex white Gaussian noise whose expected energy is
/// ||x||^2 / 10^(snr_db/10). snr_db = +inf returns x unchanged.
TimeSignal add_awgn(const TimeSignal& signal, double snr_db, std::uint64_t seed);

}  // namespace cwss::signal
