#include "cwss/measurement.hpp"

#include "cwss/fft.hpp"
#include "cwss/kernels.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cwss::measurement {

using Index = Eigen::Index;

CVector SelectionMatrix::apply(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw DimensionError("selection over N = " + std::to_string(n) + " applied to a vector of length " +
                         std::to_string(v.size()));
  }
  CVector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[static_cast<Index>(rows[i])];
  return out;
}

DenseKind parse_dense_kind(std::string_view name) {
  if (name == "gaussian") return DenseKind::gaussian;
  if (name == "bernoulli") return DenseKind::bernoulli;
  throw ConfigError("unknown dense matrix kind '" + std::string(name) + "'");
}

DistortionModel parse_distortion_model(std::string_view name) {
  if (name == "uniform_modulus") return DistortionModel::uniform_modulus;
  if (name == "truncated_gaussian") return DistortionModel::truncated_gaussian;
  throw ConfigError("unknown distortion model '" + std::string(name) + "'");
}

std::string_view to_string(DistortionModel model) {
  switch (model) {
    case DistortionModel::uniform_modulus: return "uniform_modulus";
    case DistortionModel::truncated_gaussian: return "truncated_gaussian";
  }
  return "?";
}

SelectionMatrix make_selection(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m > n) {
    throw DimensionError("selection needs 1 <= M <= N, got M = " + std::to_string(m) + ", N = " + std::to_string(n));
  }
  // Partial Fisher-Yates: the first m entries of a uniformly random permutation.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  perm.resize(m);
  return {n, std::move(perm)};
}

CMatrix make_dense_matrix(DenseKind kind, std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw DimensionError("dense matrix needs M, N >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Rng rng = make_rng(seed);
  CMatrix phi(static_cast<Index>(m), static_cast<Index>(n));
  std::normal_distribution<double> gauss(0.0, scale);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < phi.rows(); ++i) {
    for (Index j = 0; j < phi.cols(); ++j) {
      const double v = kind == DenseKind::gaussian ? gauss(rng) : (coin(rng) ? scale : -scale);
      phi(i, j) = Complex(v, 0.0);
    }
  }
  return phi;
}

CMatrix ideal_matrix(const SelectionMatrix& sel) {
  const auto n = static_cast<Index>(sel.n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix a(static_cast<Index>(sel.m()), n);
  for (std::size_t i = 0; i < sel.m(); ++i) {
    const auto row = static_cast<Index>(sel.rows[i]);
    for (Index k = 0; k < n; ++k) {
      const double phase = 2.0 * kPi * static_cast<double>((row * k) % n) / static_cast<double>(n);
      a(static_cast<Index>(i), k) = norm * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

CVector apply_ideal(const SelectionMatrix& sel, const CVector& r) {
  return sel.apply(fft::inverse(r));
}

MeasurementSet perturb(const CMatrix& ideal, double delta_elem, std::uint64_t seed, DistortionModel model) {
  if (!(delta_elem >= 0.0) || !std::isfinite(delta_elem)) {
    throw ConfigError("perturbation bound must be finite and non-negative");
  }
  MeasurementSet out;
  out.ideal = ideal;
  out.delta_elem = delta_elem;
  out.perturbation = CMatrix::Zero(ideal.rows(), ideal.cols());
  if (delta_elem > 0.0) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, delta_elem / (2.0 * std::sqrt(2.0)));
    for (Index j = 0; j < ideal.cols(); ++j) {
      for (Index i = 0; i < ideal.rows(); ++i) {
        Complex v;
        if (model == DistortionModel::uniform_modulus) {
          const double modulus = delta_elem * unit(rng);
          v = std::polar(modulus, 2.0 * kPi * unit(rng));
        } else {
          do {
            v = Complex(gauss(rng), gauss(rng));
          } while (std::abs(v) > delta_elem);
        }
        out.perturbation(i, j) = v;
      }
    }
  }
  out.observed = out.ideal + out.perturbation;
  out.delta_norm = matrix_linf_norm(out.perturbation);
  return out;
}

double matrix_linf_norm(const CMatrix& v) {
  if (v.rows() == 0) return 0.0;
  return kernels::omp::row_l1_norms(v).maxCoeff();
}

CVector acquire(const signal::TimeSignal& x, const SelectionMatrix& sel) {
  return sel.apply(x.x);
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

double isometry_defect(const CMatrix& phi, const std::vector<std::size_t>& support) {
  CMatrix sub(phi.rows(), static_cast<Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) sub.col(static_cast<Index>(c)) = phi.col(static_cast<Index>(support[c]));
  Eigen::JacobiSVD<CMatrix> svd(sub);
  const RVector& sv = svd.singularValues();
  // Fewer rows than columns leaves a zero singular value that the SVD omits.
  const double smin = sub.rows() < sub.cols() ? 0.0 : sv[sv.size() - 1];
  const double smax = sv[0];
  return std::max(1.0 - smin * smin, smax * smax - 1.0);
}

}  // namespace

RipEstimate rip_probe(const CMatrix& phi, std::size_t sparsity, std::size_t max_supports, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(phi.rows());
  const auto n = static_cast<std::size_t>(phi.cols());
  if (sparsity < 1 || sparsity > std::min(m, n)) {
    throw DimensionError("RIP probe needs 1 <= S <= min(M, N), got S = " + std::to_string(sparsity));
  }
  if (max_supports < 1) throw ConfigError("RIP probe needs max_supports >= 1");

  RipEstimate est;
  est.sparsity = sparsity;
  std::vector<std::vector<std::size_t>> supports;
  if (binomial(n, sparsity) <= static_cast<double>(max_supports)) {
    est.exhaustive = true;
    std::vector<std::size_t> t(sparsity);
    std::iota(t.begin(), t.end(), 0);
    while (true) {
      supports.push_back(t);
      std::size_t i = sparsity;
      while (i > 0 && t[i - 1] == n - sparsity + i - 1) --i;
      if (i == 0) break;
      ++t[i - 1];
      for (std::size_t j = i; j < sparsity; ++j) t[j] = t[j - 1] + 1;
    }
  } else {
    Rng rng = make_rng(seed);
    std::vector<std::size_t> perm(n);
    for (std::size_t s = 0; s < max_supports; ++s) {
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = 0; i < sparsity; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(perm[i], perm[pick(rng)]);
      }
      std::vector<std::size_t> t(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sparsity));
      std::sort(t.begin(), t.end());
      supports.push_back(std::move(t));
    }
  }

  double worst = 0.0;
  const auto count = static_cast<std::ptrdiff_t>(supports.size());
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    worst = std::max(worst, isometry_defect(phi, supports[static_cast<std::size_t>(s)]));
  }
  est.delta_lower = std::max(0.0, worst);
  est.supports_probed = supports.size();
  return est;
}

}  // namespace cwss::measurement
