#include "cwss/signal.hpp"

#include "cwss/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cwss::signal {

double SpectrumProfile::bin_width() const {
  return freq_span.width() / static_cast<double>(grid_size);
}

double SpectrumProfile::bin_center(std::size_t k) const {
  return freq_span.lo + (static_cast<double>(k) + 0.5) * bin_width();
}

std::size_t SpectrumProfile::first_bin_at_or_above(double f) const {
  const double pos = std::ceil((f - freq_span.lo) / bin_width() - 0.5);
  if (pos <= 0.0) return 0;
  return std::min(grid_size, static_cast<std::size_t>(pos));
}

void SpectrumProfile::validate() const {
  if (grid_size < 2 || (grid_size & (grid_size - 1)) != 0) {
    throw ConfigError("grid size must be a power of two >= 2, got " + std::to_string(grid_size));
  }
  if (!(freq_span.lo < freq_span.hi) || !std::isfinite(freq_span.lo) || !std::isfinite(freq_span.hi)) {
    throw ConfigError("frequency span must satisfy low < high");
  }
  if (!noise_floor_range.valid() || noise_floor_range.lo < 0.0) {
    throw ConfigError("noise floor range must be a non-negative interval with low <= high");
  }
  if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
  std::vector<BandSpec> sorted = bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const BandSpec& a, const BandSpec& b) { return a.f_start < b.f_start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const BandSpec& b = sorted[i];
    if (!(b.f_start < b.f_stop)) throw ConfigError("band must satisfy f_start < f_stop");
    if (b.f_start < freq_span.lo || b.f_stop > freq_span.hi) {
      throw ConfigError("band [" + std::to_string(b.f_start) + ", " + std::to_string(b.f_stop) +
                        ") lies outside the frequency span");
    }
    if (!b.psd_range.valid() || b.psd_range.lo < 0.0) {
      throw ConfigError("band PSD range must be a non-negative interval with low <= high");
    }
    if (i > 0 && sorted[i - 1].f_stop > b.f_start) throw ConfigError("bands overlap");
  }
}

SpectrumProfile default_profile() {
  SpectrumProfile p;
  p.grid_size = 512;
  p.freq_span = {0.0, 500e6};
  p.bands = {
      {30e6, 70e6, {100.0, 140.0}},
      {120e6, 180e6, {70.0, 110.0}},
      {300e6, 340e6, {130.0, 170.0}},
      {420e6, 460e6, {110.0, 150.0}},
  };
  p.noise_floor_range = {0.0, 10.0};
  p.snr_db = 13.0;
  p.phase_policy = PhasePolicy::uniform;
  return p;
}

std::vector<bool> occupancy_mask(const SpectrumProfile& profile) {
  std::vector<bool> mask(profile.grid_size, false);
  for (const BandSpec& band : profile.bands) {
    const std::size_t lo = profile.first_bin_at_or_above(band.f_start);
    const std::size_t hi = profile.first_bin_at_or_above(band.f_stop);
    for (std::size_t k = lo; k < hi; ++k) mask[k] = true;
  }
  return mask;
}

namespace {

const BandSpec* band_of_bin(const SpectrumProfile& profile, std::size_t k) {
  for (const BandSpec& band : profile.bands) {
    if (k >= profile.first_bin_at_or_above(band.f_start) && k < profile.first_bin_at_or_above(band.f_stop)) {
      return &band;
    }
  }
  return nullptr;
}

}  // namespace

FrequencySpectrum synthesize_spectrum(const SpectrumProfile& profile, std::uint64_t seed) {
  profile.validate();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FrequencySpectrum out;
  out.r.resize(static_cast<Eigen::Index>(profile.grid_size));
  out.occupancy = occupancy_mask(profile);
  out.sample_rate = profile.freq_span.width();

  const Interval& floor = profile.noise_floor_range;
  for (std::size_t k = 0; k < profile.grid_size; ++k) {
    double magnitude = 0.0;
    if (const BandSpec* band = band_of_bin(profile, k)) {
      magnitude = band->psd_range.lo + band->psd_range.width() * unit(rng);
    } else {
      const double sd = floor.width() / 3.0;
      magnitude = std::min(floor.hi, floor.lo + std::abs(sd * gauss(rng)));
    }
    // Drawn unconditionally so the magnitude sequence does not depend on the policy.
    const double phase = 2.0 * kPi * unit(rng);
    out.r[static_cast<Eigen::Index>(k)] =
        profile.phase_policy == PhasePolicy::uniform ? std::polar(magnitude, phase) : Complex(magnitude, 0.0);
  }
  return out;
}

TimeSignal spectrum_to_time(const FrequencySpectrum& spectrum) {
  return {fft::inverse(spectrum.r), spectrum.sample_rate};
}

CVector time_to_spectrum(const TimeSignal& signal) { return fft::forward(signal.x); }

TimeSignal add_awgn(const TimeSignal& signal, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return signal;
  if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
  const double energy = signal.x.squaredNorm();
  if (energy == 0.0) throw NumericalError("SNR is undefined for an all-zero signal");
  const auto n = static_cast<double>(signal.x.size());
  // Each complex sample carries variance 2 * sd^2; n samples sum to the target energy.
  const double noise_energy = energy / std::pow(10.0, snr_db / 10.0);
  const double sd = std::sqrt(noise_energy / (2.0 * n));
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, sd);
  TimeSignal out = signal;
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    out.x[i] += Complex(re, im);
  }
  return out;
}

}  // namespace cwss::signal
