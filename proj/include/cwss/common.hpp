#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace cwss {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A quantity that is mathematically undefined for the given input
/// (SNR of a zero signal, normalization of an all-zero spectrum, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] bool valid() const { return lo <= hi; }
};

/// splitmix64 finalizer over (seed, stream). Every randomized stage of the
/// pipeline draws from its own stream so stages stay independent of each
/// other's consumption.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace cwss
