#pragma once

#include "cwss/common.hpp"
#include "cwss/recovery.hpp"
#include "cwss/signal.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <vector>

namespace cwss::detection {

/// K+1 bin boundaries; subband k covers bins [edges[k], edges[k+1]).
using Edges = std::vector<std::size_t>;

/// Value reported where the EER reference energy is zero.
inline constexpr double kUndefinedRatio = std::numeric_limits<double>::quiet_NaN();

/// Throws ConfigError unless edges are strictly increasing from 0 to n.
void validate_edges(const Edges& edges, std::size_t n);

/// Maps frequency boundaries (Hz, first = span low, last = span high) to bins
/// with the same rule the signal module uses for band membership.
Edges partition_from_frequencies(const signal::SpectrumProfile& profile, const std::vector<double>& freqs);

/// Nine subbands alternating gap / band over the default 0-500 MHz layout.
/// Edges that collide on coarse grids are pushed apart so every subband keeps
/// at least one bin. Needs n >= 9.
Edges default_partition(std::size_t n);

/// Frequency boundaries behind default_partition.
std::vector<double> default_partition_frequencies();

/// A subband is active when any of its bins is occupied.
std::vector<bool> active_subbands(const Edges& edges, const std::vector<bool>& occupancy);

/// E_k = sum over subband k of |r_k|^2, normalized to unit sum.
RVector subband_energies(const CVector& r_hat, const Edges& edges);

/// Signed energy enhancement ratio of E_new over the reference E_std:
/// (E_new - E_std)/E_std on active subbands, (E_std - E_new)/E_std on inactive ones.
RVector eer(const RVector& e_new, const RVector& e_std, const std::vector<bool>& active);

/// decision_k = energies_k > threshold
std::vector<bool> detect(const RVector& energies, double threshold);

struct SubbandReport {
  Edges edges;
  std::vector<bool> active_mask;
  std::map<recovery::Method, RVector> energies;
  std::map<recovery::Method, std::vector<bool>> decisions;
  /// ASD against LASSO; empty unless both were evaluated.
  RVector eer;

  [[nodiscard]] std::size_t count() const { return edges.empty() ? 0 : edges.size() - 1; }
};

SubbandReport make_report(const Edges& edges, const std::vector<bool>& occupancy,
                          const std::map<recovery::Method, CVector>& spectra, double threshold);

}  // namespace cwss::detection
