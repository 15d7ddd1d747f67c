#include "cwss/detection.hpp"

#include <algorithm>
#include <string>

namespace cwss::detection {

using Index = Eigen::Index;

void validate_edges(const Edges& edges, std::size_t n) {
  if (edges.size() < 2) throw ConfigError("a partition needs at least two edges");
  if (edges.front() != 0 || edges.back() != n) {
    throw ConfigError("partition must span bins [0, " + std::to_string(n) + "]");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) throw ConfigError("partition edges must be strictly increasing");
  }
}

Edges partition_from_frequencies(const signal::SpectrumProfile& profile, const std::vector<double>& freqs) {
  if (freqs.size() < 2) throw ConfigError("subband edges need at least two frequencies");
  Edges edges;
  edges.reserve(freqs.size());
  for (double f : freqs) edges.push_back(profile.first_bin_at_or_above(f));
  validate_edges(edges, profile.grid_size);
  return edges;
}

std::vector<double> default_partition_frequencies() {
  return {0.0, 30e6, 70e6, 120e6, 180e6, 300e6, 340e6, 420e6, 460e6, 500e6};
}

Edges default_partition(std::size_t n) {
  const std::vector<double> freqs = default_partition_frequencies();
  if (n < freqs.size() - 1) throw ConfigError("default partition needs N >= 9");
  signal::SpectrumProfile grid = signal::default_profile();
  grid.grid_size = n;
  Edges edges;
  for (double f : freqs) edges.push_back(grid.first_bin_at_or_above(f));
  edges.front() = 0;
  edges.back() = n;
  for (std::size_t i = 1; i + 1 < edges.size(); ++i) edges[i] = std::max(edges[i], edges[i - 1] + 1);
  for (std::size_t i = edges.size() - 2; i > 0; --i) edges[i] = std::min(edges[i], edges[i + 1] - 1);
  return edges;
}

std::vector<bool> active_subbands(const Edges& edges, const std::vector<bool>& occupancy) {
  validate_edges(edges, occupancy.size());
  std::vector<bool> active(edges.size() - 1, false);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    for (std::size_t b = edges[k]; b < edges[k + 1]; ++b) {
      if (occupancy[b]) {
        active[k] = true;
        break;
      }
    }
  }
  return active;
}

RVector subband_energies(const CVector& r_hat, const Edges& edges) {
  validate_edges(edges, static_cast<std::size_t>(r_hat.size()));
  RVector e = RVector::Zero(static_cast<Index>(edges.size() - 1));
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double acc = 0.0;
    for (std::size_t b = edges[k]; b < edges[k + 1]; ++b) acc += std::norm(r_hat[static_cast<Index>(b)]);
    e[static_cast<Index>(k)] = acc;
  }
  const double total = e.sum();
  if (!(total > 0.0)) throw NumericalError("cannot normalize subband energies of an all-zero spectrum");
  return e / total;
}

RVector eer(const RVector& e_new, const RVector& e_std, const std::vector<bool>& active) {
  if (e_new.size() != e_std.size() || static_cast<std::size_t>(e_new.size()) != active.size()) {
    throw DimensionError("eer: energy vectors and mask differ in length");
  }
  RVector out(e_new.size());
  for (Index k = 0; k < e_new.size(); ++k) {
    const double ref = e_std[k];
    if (ref == 0.0) {
      out[k] = kUndefinedRatio;
      continue;
    }
    out[k] = active[static_cast<std::size_t>(k)] ? (e_new[k] - ref) / ref : (ref - e_new[k]) / ref;
  }
  return out;
}

std::vector<bool> detect(const RVector& energies, double threshold) {
  if (!(threshold >= 0.0)) throw ConfigError("detection threshold must be >= 0");
  std::vector<bool> out(static_cast<std::size_t>(energies.size()));
  for (Index k = 0; k < energies.size(); ++k) out[static_cast<std::size_t>(k)] = energies[k] > threshold;
  return out;
}

SubbandReport make_report(const Edges& edges, const std::vector<bool>& occupancy,
                          const std::map<recovery::Method, CVector>& spectra, double threshold) {
  SubbandReport rep;
  rep.edges = edges;
  rep.active_mask = active_subbands(edges, occupancy);
  for (const auto& [method, r_hat] : spectra) {
    rep.energies[method] = subband_energies(r_hat, edges);
    rep.decisions[method] = detect(rep.energies[method], threshold);
  }
  const auto lasso = rep.energies.find(recovery::Method::lasso);
  const auto asd = rep.energies.find(recovery::Method::asd);
  if (lasso != rep.energies.end() && asd != rep.energies.end()) {
    rep.eer = eer(asd->second, lasso->second, rep.active_mask);
  }
  return rep;
}

}  // namespace cwss::detection
