#pragma once

#include "cwss/common.hpp"

// Data-parallel inner kernels. Every OpenMP kernel has a serial twin kept as
// the reference; both accumulate each output element in the same order, so
// their results agree bit for bit regardless of thread count.
namespace cwss::kernels {

namespace serial {

/// y = A x
CVector matvec(const CMatrix& a, const CVector& x);
/// x = A^H y
CVector adjoint_matvec(const CMatrix& a, const CVector& y);
/// Per-row sum of entry moduli.
RVector row_l1_norms(const CMatrix& a);
/// Unitary O(N^2) DFT; sign = -1 forward, +1 inverse.
CVector dft(const CVector& x, int sign);

}  // namespace serial

namespace omp {

// threads <= 0 uses the OpenMP default team size.
CVector matvec(const CMatrix& a, const CVector& x, int threads = 0);
CVector adjoint_matvec(const CMatrix& a, const CVector& y, int threads = 0);
RVector row_l1_norms(const CMatrix& a, int threads = 0);
CVector dft(const CVector& x, int sign, int threads = 0);

}  // namespace omp

}  // namespace cwss::kernels
