#include "cwss/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace cwss::fft {
namespace {

// fftw_execute_dft on a cached plan is thread-safe; planning is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Buffers {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  explicit Buffers(std::size_t n)
      : in(fftw_alloc_complex(n)), out(fftw_alloc_complex(n)) {}
  ~Buffers() {
    fftw_free(in);
    fftw_free(out);
  }
  Buffers(const Buffers&) = delete;
  Buffers& operator=(const Buffers&) = delete;
};

fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find({n, sign});
  if (it != cache.end()) return it->second;
  Buffers scratch(static_cast<std::size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, scratch.in, scratch.out, sign, FFTW_ESTIMATE);
  if (plan == nullptr) throw NumericalError("FFTW could not plan a transform of size " + std::to_string(n));
  cache.emplace(std::make_pair(n, sign), plan);
  return plan;
}

CVector transform(const CVector& x, int sign) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0) return x;
  fftw_plan plan = plan_for(static_cast<int>(n), sign);
  Buffers buf(n);
  std::memcpy(buf.in, x.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(plan, buf.in, buf.out);
  CVector y(x.size());
  std::memcpy(static_cast<void*>(y.data()), buf.out, n * sizeof(fftw_complex));
  return y / std::sqrt(static_cast<double>(n));
}

}  // namespace

CVector forward(const CVector& x) { return transform(x, FFTW_FORWARD); }

CVector inverse(const CVector& spectrum) { return transform(spectrum, FFTW_BACKWARD); }

}  // namespace cwss::fft
