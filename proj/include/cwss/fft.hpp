#pragma once

#include "cwss/common.hpp"

// Unitary discrete Fourier transform (1/sqrt(N) in both directions).
//   forward: X[k] = N^{-1/2} sum_n x[n] exp(-2 pi i k n / N)
//   inverse: x[n] = N^{-1/2} sum_k X[k] exp(+2 pi i k n / N)
namespace cwss::fft {

CVector forward(const CVector& x);
CVector inverse(const CVector& spectrum);

}  // namespace cwss::fft
