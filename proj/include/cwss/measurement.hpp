#pragma once

#include "cwss/common.hpp"
#include "cwss/signal.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace cwss::measurement {

/// M distinct rows of the N x N identity, in draw order.
struct SelectionMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> rows;

  [[nodiscard]] std::size_t m() const { return rows.size(); }
  /// Gathers the selected entries of a length-N vector.
  [[nodiscard]] CVector apply(const CVector& v) const;
};

enum class DenseKind { gaussian, bernoulli };
DenseKind parse_dense_kind(std::string_view name);

enum class DistortionModel {
  uniform_modulus,     // modulus ~ U[0, delta], phase ~ U[0, 2pi)
  truncated_gaussian,  // circular Gaussian (sigma = delta/2) rejected outside |v| <= delta
};
DistortionModel parse_distortion_model(std::string_view name);
std::string_view to_string(DistortionModel model);

/// Ideal matrix, its perturbation and the observed matrix B = A + V.
struct MeasurementSet {
  CMatrix ideal;
  CMatrix perturbation;
  CMatrix observed;
  double delta_elem = 0.0;
  /// Realized induced infinity norm of the perturbation (max row l1 norm).
  double delta_norm = 0.0;

  [[nodiscard]] std::size_t m() const { return static_cast<std::size_t>(ideal.rows()); }
  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(ideal.cols()); }
};

struct RipEstimate {
  std::size_t sparsity = 0;
  /// Largest max(1 - smin^2, smax^2 - 1) over the probed supports; a lower
  /// bound on the restricted isometry constant.
  double delta_lower = 0.0;
  std::size_t supports_probed = 0;
  bool exhaustive = false;
};

SelectionMatrix make_selection(std::size_t n, std::size_t m, std::uint64_t seed);

/// Gaussian entries are real N(0, 1/N); Bernoulli entries are +-1/sqrt(N).
CMatrix make_dense_matrix(DenseKind kind, std::size_t n, std::size_t m, std::uint64_t seed);

/// Rows of the unitary inverse DFT matrix picked by the selection.
CMatrix ideal_matrix(const SelectionMatrix& sel);
/// A r computed through the FFT: gather(F^{-1} r, rows).
CVector apply_ideal(const SelectionMatrix& sel, const CVector& r);

MeasurementSet perturb(const CMatrix& ideal, double delta_elem, std::uint64_t seed,
                       DistortionModel model = DistortionModel::uniform_modulus);

/// max_m sum_k |V[m,k]|
double matrix_linf_norm(const CMatrix& v);

/// y[i] = x[rows[i]]
CVector acquire(const signal::TimeSignal& x, const SelectionMatrix& sel);

/// Exhaustive over all supports when C(N,S) <= max_supports, otherwise
/// max_supports supports sampled uniformly.
RipEstimate rip_probe(const CMatrix& phi, std::size_t sparsity, std::size_t max_supports,
                      std::uint64_t seed);

}  // namespace cwss::measurement
