#include "doctest.h"

#include "cwss/measurement.hpp"
#include "cwss/recovery.hpp"
#include "oracles.hpp"

#include <limits>
#include <numeric>

using namespace cwss;
using namespace cwss::recovery;

namespace {

struct Instance {
  CMatrix b;
  CVector y;
  CVector r0;
};

// Partial-DFT instance with an S-sparse complex spectrum, optional noise and perturbation.
Instance make_instance(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t s, double noise = 0.0,
                       double delta = 0.0) {
  std::mt19937_64 rng(seed);
  const measurement::SelectionMatrix sel = measurement::make_selection(n, m, seed);
  const measurement::MeasurementSet ms = measurement::perturb(measurement::ideal_matrix(sel), delta, seed + 1);
  Instance in;
  in.b = ms.observed;
  in.r0 = CVector::Zero(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(1.0, 3.0), ph(0.0, 2 * M_PI);
  for (std::size_t k = 0; k < s; ++k) in.r0[static_cast<Eigen::Index>(idx[k])] = std::polar(mag(rng), ph(rng));
  in.y = in.b * in.r0;
  if (noise > 0.0) in.y += oracle::random_cvector(rng, static_cast<Eigen::Index>(m), noise);
  return in;
}

}  // namespace

TEST_CASE("BP with the identity returns y") {
  std::mt19937_64 rng(1);
  const CVector y = oracle::random_cvector(rng, 10);
  const RecoveryResult r = solve_bp(CMatrix::Identity(10, 10), y);
  REQUIRE(r.converged());
  CHECK((r.r_hat - y).norm() < 1e-5 * y.norm());
  CHECK(r.method == Method::bp);
  CHECK_FALSE(r.epigraph_t.has_value());
}

TEST_CASE("BP recovers a single spike exactly") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Instance in = make_instance(seed, 16, 8, 1);
    const oracle::L0Solution l0 = oracle::l0_exhaustive(in.b, in.y, 1);
    REQUIRE(l0.found);
    const RecoveryResult r = solve_bp(in.b, in.y);
    REQUIRE(r.converged());
    CHECK(oracle::support_of(r.r_hat) == l0.support);
    CHECK((r.r_hat - in.r0).norm() < 1e-4 * in.r0.norm());
  }
}

TEST_CASE("BP with y = 0 returns zero") {
  const Instance in = make_instance(2, 16, 8, 1);
  const RecoveryResult r = solve_bp(in.b, CVector::Zero(8));
  REQUIRE(r.converged());
  CHECK(r.r_hat.norm() < 1e-8);
}

TEST_CASE("LASSO with mu >= ||y|| returns zero") {
  const Instance in = make_instance(3, 16, 8, 2);
  const RecoveryResult r = solve_lasso(in.b, in.y, 1.01 * in.y.norm());
  REQUIRE(r.converged());
  CHECK(r.r_hat.norm() < 1e-5 * in.y.norm());
}

TEST_CASE("LASSO with mu = 0 equals BP") {
  const Instance in = make_instance(4, 32, 16, 3, 0.01);
  const RecoveryResult bp = solve_bp(in.b, in.y);
  const RecoveryResult la = solve_lasso(in.b, in.y, 0.0);
  REQUIRE(bp.converged());
  REQUIRE(la.converged());
  CHECK(la.objective_value == doctest::Approx(bp.objective_value).epsilon(1e-4));
}

TEST_CASE("LASSO objective never exceeds BP's") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance in = make_instance(seed, 16, 8, 1, 0.05);
    const RecoveryResult bp = solve_bp(in.b, in.y);
    const RecoveryResult la = solve_lasso(in.b, in.y, 0.1 * in.y.norm());
    REQUIRE(bp.converged());
    REQUIRE(la.converged());
    CHECK(la.objective_value <= bp.objective_value + 1e-5);
  }
}

TEST_CASE("ASD approaches BP as delta goes to zero") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance in = make_instance(seed, 16, 8, 2, 0.02);
    const RecoveryResult bp = solve_bp(in.b, in.y);
    const RecoveryResult asd = solve_asd(in.b, in.y, 1e-8);
    REQUIRE(bp.converged());
    REQUIRE(asd.converged());
    CHECK((asd.r_hat - bp.r_hat).norm() / bp.r_hat.norm() < 1e-3);
  }
}

TEST_CASE("ASD with y = 0 returns zero") {
  const Instance in = make_instance(5, 16, 8, 1);
  const RecoveryResult r = solve_asd(in.b, CVector::Zero(8), 0.3);
  REQUIRE(r.converged());
  CHECK(r.r_hat.norm() < 1e-8);
  CHECK(std::abs(*r.epigraph_t) < 1e-8);
}

TEST_CASE("ASD is positively homogeneous in y") {
  const Instance in = make_instance(6, 32, 16, 3, 0.05, 0.02);
  const RecoveryResult a = solve_asd(in.b, in.y, 0.05);
  const RecoveryResult b = solve_asd(in.b, 2.0 * in.y, 0.05);
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  CHECK((b.r_hat - 2.0 * a.r_hat).norm() <= 1e-4 * (2.0 * a.r_hat).norm());
  CHECK(*b.epigraph_t == doctest::Approx(2.0 * *a.epigraph_t).epsilon(1e-4));
}

TEST_CASE("ASD optimum has a tight cone") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance in = make_instance(seed, 32, 16, 3, 0.1, 0.03);
    const double delta = 0.02 + 0.02 * static_cast<double>(seed);
    const RecoveryResult r = solve_asd(in.b, in.y, delta);
    REQUIRE(r.converged());
    const double t = *r.epigraph_t;
    const double l1 = oracle::l1(r.r_hat);
    const double scaled = (in.y - in.b * r.r_hat).norm() / (std::sqrt(16.0) * delta);
    CHECK(t == doctest::Approx(std::max(l1, scaled)).epsilon(1e-4));
    CHECK(r.tight != TightCone::not_applicable);
  }
}

TEST_CASE("ASD objective is non-increasing in delta") {
  const Instance in = make_instance(7, 32, 16, 3, 0.1, 0.03);
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : {0.01, 0.05, 0.2}) {
    const RecoveryResult r = solve_asd(in.b, in.y, delta);
    REQUIRE(r.converged());
    CHECK(*r.epigraph_t <= previous * (1.0 + 1e-6));
    previous = *r.epigraph_t;
  }
}

TEST_CASE("ASD rejects non-positive delta") {
  const Instance in = make_instance(8, 16, 8, 1);
  CHECK_THROWS_AS(solve_asd(in.b, in.y, 0.0), ConfigError);
  CHECK_THROWS_AS(solve_asd(in.b, in.y, -1.0), ConfigError);
  CHECK_THROWS_AS(solve_lasso(in.b, in.y, -1.0), ConfigError);
  CHECK_THROWS_AS(solve_bp(in.b, CVector::Zero(3)), DimensionError);
}

TEST_CASE("BP objective is at most that of the sparse generator") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 16u << (seed % 3);  // 16, 32, 64
    const std::size_t s = 1 + seed % 3;
    const Instance in = make_instance(seed, n, 4 * s + 4, s);
    const RecoveryResult r = solve_bp(in.b, in.y);
    REQUIRE(r.converged());
    CHECK(r.objective_value <= oracle::l1(in.r0) * (1.0 + 1e-5) + 1e-6);
  }
}

TEST_CASE("BP support agrees with the l0 oracle on small instances") {
  int agree = 0, unique = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance in = make_instance(100 + seed, 16, 8, 1 + seed % 2);
    const oracle::L0Solution l0 = oracle::l0_exhaustive(in.b, in.y, 2);
    if (!l0.unique) continue;
    const RecoveryResult r = solve_bp(in.b, in.y);
    if (!r.converged()) continue;
    ++unique;
    if (oracle::support_of(r.r_hat) == l0.support) ++agree;
  }
  REQUIRE(unique > 20);
  CHECK(static_cast<double>(agree) >= 0.95 * unique);
}

TEST_CASE("certificates pass on solver output and flag corruption") {
  const Instance in = make_instance(9, 32, 16, 2, 0.05, 0.02);
  const double mu = 0.1 * in.y.norm();
  const RecoveryResult bp = solve_bp(in.b, in.y);
  const RecoveryResult la = solve_lasso(in.b, in.y, mu);
  const RecoveryResult asd = solve_asd(in.b, in.y, 0.05);
  REQUIRE(bp.converged());
  REQUIRE(la.converged());
  REQUIRE(asd.converged());

  const Certificate cb = certify(bp, in.b, in.y, {});
  CHECK(cb.ok());
  CHECK(cb.residual_slack <= 1e-5 * in.y.norm());
  const Certificate cl = certify(la, in.b, in.y, {mu, 0.0});
  CHECK(cl.ok());
  const Certificate ca = certify(asd, in.b, in.y, {0.0, 0.05});
  CHECK(ca.ok());
  CHECK(ca.residual_slack <= 1e-5 * (1 + in.y.norm()));
  CHECK(ca.epigraph_slack <= 1e-5 * (1 + in.y.norm()));

  RecoveryResult broken = bp;
  broken.r_hat[0] += 0.5;
  CHECK_FALSE(certify(broken, in.b, in.y, {}).ok());
  broken = asd;
  broken.r_hat *= 1.5;
  CHECK_FALSE(certify(broken, in.b, in.y, {0.0, 0.05}).ok());
  broken = la;
  broken.r_hat.setZero();
  CHECK_FALSE(certify(broken, in.b, in.y, {mu, 0.0}).ok());
}

TEST_CASE("method names") {
  CHECK(parse_method("ASD") == Method::asd);
  CHECK(parse_methods("lasso, asd") == std::vector<Method>{Method::lasso, Method::asd});
  CHECK_THROWS_AS(parse_method("omp"), ConfigError);
  CHECK_THROWS_AS(parse_methods("bp,bp"), ConfigError);
  CHECK_THROWS_AS(parse_methods(""), ConfigError);
}
