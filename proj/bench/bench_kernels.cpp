// Serial reference kernels against their OpenMP versions.
//
//   bench_kernels [--n N] [--m M] [--reps R] [--threads T]

#include "cwss/kernels.hpp"
#include "cwss/measurement.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace cwss;

namespace {

double time_best(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-16s %12.6f %12.6f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP kernel timings"};
  std::size_t n = 1024, m = 512;
  int reps = 5, threads = 0;
  app.add_option("--n", n, "columns / transform length");
  app.add_option("--m", m, "rows");
  app.add_option("--reps", reps, "repetitions, best time kept");
  app.add_option("--threads", threads, "OpenMP threads (0 = default)");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = Complex(g(rng), g(rng));
  CVector x(a.cols()), y(a.rows());
  for (auto& v : x) v = Complex(g(rng), g(rng));
  for (auto& v : y) v = Complex(g(rng), g(rng));

  std::printf("N=%zu M=%zu threads=%d\n", n, m, threads > 0 ? threads : omp_get_max_threads());
  std::printf("%-16s %12s %12s %9s\n", "kernel", "serial s", "omp s", "speedup");

  CVector rs, rp;
  RVector ls, lp;
  double ts = time_best(reps, [&] { rs = kernels::serial::matvec(a, x); });
  double tp = time_best(reps, [&] { rp = kernels::omp::matvec(a, x, threads); });
  row("matvec", ts, tp, rs == rp);

  ts = time_best(reps, [&] { rs = kernels::serial::adjoint_matvec(a, y); });
  tp = time_best(reps, [&] { rp = kernels::omp::adjoint_matvec(a, y, threads); });
  row("adjoint_matvec", ts, tp, rs == rp);

  ts = time_best(reps, [&] { ls = kernels::serial::row_l1_norms(a); });
  tp = time_best(reps, [&] { lp = kernels::omp::row_l1_norms(a, threads); });
  row("row_l1_norms", ts, tp, ls == lp);

  ts = time_best(reps, [&] { rs = kernels::serial::dft(x, -1); });
  tp = time_best(reps, [&] { rp = kernels::omp::dft(x, -1, threads); });
  row("dft", ts, tp, rs == rp);

  const CMatrix phi = a.topLeftCorner(std::min<Eigen::Index>(a.rows(), 32), std::min<Eigen::Index>(a.cols(), 64));
  measurement::RipEstimate e1, et;
  ts = time_best(reps, [&] {
    omp_set_num_threads(1);
    e1 = measurement::rip_probe(phi, 3, 2000, 5);
  });
  tp = time_best(reps, [&] {
    omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
    et = measurement::rip_probe(phi, 3, 2000, 5);
  });
  row("rip_probe", ts, tp, e1.delta_lower == et.delta_lower);
  return 0;
}
