#include "cwss/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace cwss::kernels {
namespace {

using Index = Eigen::Index;

Complex row_dot(const CMatrix& a, Index i, const CVector& x) {
  Complex acc(0.0, 0.0);
  for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
  return acc;
}

Complex column_adjoint_dot(const CMatrix& a, Index j, const CVector& y) {
  Complex acc(0.0, 0.0);
  for (Index i = 0; i < a.rows(); ++i) acc += std::conj(a(i, j)) * y[i];
  return acc;
}

double row_l1(const CMatrix& a, Index i) {
  double acc = 0.0;
  for (Index j = 0; j < a.cols(); ++j) acc += std::abs(a(i, j));
  return acc;
}

// Twiddle index reduced mod N keeps the phase argument exact.
Complex dft_bin(const CVector& x, Index k, int sign) {
  const Index n = x.size();
  Complex acc(0.0, 0.0);
  for (Index t = 0; t < n; ++t) {
    const double phase = sign * 2.0 * kPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
    acc += x[t] * Complex(std::cos(phase), std::sin(phase));
  }
  return acc / std::sqrt(static_cast<double>(n));
}

void check_sign(int sign) {
  if (sign != -1 && sign != 1) throw ConfigError("dft sign must be -1 or +1");
}

void check_cols(const CMatrix& a, const CVector& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: column count does not match vector length");
}

void check_rows(const CMatrix& a, const CVector& y) {
  if (a.rows() != y.size()) throw DimensionError("adjoint_matvec: row count does not match vector length");
}

int team(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

namespace serial {

CVector matvec(const CMatrix& a, const CVector& x) {
  check_cols(a, x);
  CVector y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) y[i] = row_dot(a, i, x);
  return y;
}

CVector adjoint_matvec(const CMatrix& a, const CVector& y) {
  check_rows(a, y);
  CVector x(a.cols());
  for (Index j = 0; j < a.cols(); ++j) x[j] = column_adjoint_dot(a, j, y);
  return x;
}

RVector row_l1_norms(const CMatrix& a) {
  RVector out(a.rows());
  for (Index i = 0; i < a.rows(); ++i) out[i] = row_l1(a, i);
  return out;
}

CVector dft(const CVector& x, int sign) {
  check_sign(sign);
  CVector out(x.size());
  for (Index k = 0; k < x.size(); ++k) out[k] = dft_bin(x, k, sign);
  return out;
}

}  // namespace serial

namespace omp {

CVector matvec(const CMatrix& a, const CVector& x, int threads) {
  check_cols(a, x);
  CVector y(a.rows());
  const Index rows = a.rows();
#pragma omp parallel for schedule(static) num_threads(team(threads))
  for (Index i = 0; i < rows; ++i) y[i] = row_dot(a, i, x);
  return y;
}

CVector adjoint_matvec(const CMatrix& a, const CVector& y, int threads) {
  check_rows(a, y);
  CVector x(a.cols());
  const Index cols = a.cols();
#pragma omp parallel for schedule(static) num_threads(team(threads))
  for (Index j = 0; j < cols; ++j) x[j] = column_adjoint_dot(a, j, y);
  return x;
}

RVector row_l1_norms(const CMatrix& a, int threads) {
  RVector out(a.rows());
  const Index rows = a.rows();
#pragma omp parallel for schedule(static) num_threads(team(threads))
  for (Index i = 0; i < rows; ++i) out[i] = row_l1(a, i);
  return out;
}

CVector dft(const CVector& x, int sign, int threads) {
  check_sign(sign);
  CVector out(x.size());
  const Index n = x.size();
#pragma omp parallel for schedule(static) num_threads(team(threads))
  for (Index k = 0; k < n; ++k) out[k] = dft_bin(x, k, sign);
  return out;
}

}  // namespace omp

}  // namespace cwss::kernels
