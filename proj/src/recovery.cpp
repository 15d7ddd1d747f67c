#include "cwss/recovery.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

namespace cwss::recovery {

using Index = Eigen::Index;
using solver::ConeKind;
using solver::ConicProblem;
using solver::ProblemBuilder;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::bp: return "bp";
    case Method::lasso: return "lasso";
    case Method::asd: return "asd";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "bp") return Method::bp;
  if (lower == "lasso") return Method::lasso;
  if (lower == "asd") return Method::asd;
  throw ConfigError("unknown recovery method '" + std::string(name) + "' (expected bp, lasso or asd)");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const Method m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) != out.end()) throw ConfigError("method listed twice: " + item);
    out.push_back(m);
  }
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

std::string_view to_string(TightCone tight) {
  switch (tight) {
    case TightCone::not_applicable: return "n/a";
    case TightCone::l1: return "l1";
    case TightCone::residual: return "residual";
    case TightCone::both: return "both";
  }
  return "?";
}

namespace {

void check_shapes(const CMatrix& b, const CVector& y) {
  if (b.rows() != y.size()) {
    throw DimensionError("B has " + std::to_string(b.rows()) + " rows but y has " + std::to_string(y.size()) +
                         " entries");
  }
  if (b.rows() == 0 || b.cols() == 0) throw DimensionError("empty measurement matrix");
}

// Rows [first, first + 2M) receive the real form of B r:
//   Re(Br) = Re(B) re - Im(B) im,   Im(Br) = Im(B) re + Re(B) im.
void add_real_form(ProblemBuilder& pb, std::size_t first, const CMatrix& b, const solver::ComplexLifting& lift) {
  const auto m = static_cast<std::size_t>(b.rows());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < lift.count; ++k) {
      const Complex v = b(static_cast<Index>(i), static_cast<Index>(k));
      if (v.real() != 0.0) {
        pb.add_coefficient(first + i, lift.re(k), v.real());
        pb.add_coefficient(first + m + i, lift.im(k), v.real());
      }
      if (v.imag() != 0.0) {
        pb.add_coefficient(first + i, lift.im(k), -v.imag());
        pb.add_coefficient(first + m + i, lift.re(k), v.imag());
      }
    }
  }
}

void set_measurements(ProblemBuilder& pb, std::size_t first, const CVector& y) {
  const auto m = static_cast<std::size_t>(y.size());
  for (std::size_t i = 0; i < m; ++i) {
    pb.set_rhs(first + i, y[static_cast<Index>(i)].real());
    pb.set_rhs(first + m + i, y[static_cast<Index>(i)].imag());
  }
}

double l1_norm(const CVector& r) {
  double acc = 0.0;
  for (Index k = 0; k < r.size(); ++k) acc += std::abs(r[k]);
  return acc;
}

RecoveryResult run(Method method, const ConicProblem& problem, const solver::SolverOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const solver::ConicSolution sol = solver::solve(problem, opts);
  const auto stop = std::chrono::steady_clock::now();

  RecoveryResult res;
  res.method = method;
  res.r_hat = problem.liftings.front().extract(sol.x);
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.primal_residual = sol.primal_residual;
  res.dual_residual = sol.dual_residual;
  res.gap = sol.gap;
  res.wall_time_s = std::chrono::duration<double>(stop - start).count();
  res.objective_value = l1_norm(res.r_hat);
  if (method == Method::asd) {
    const double t = sol.x[sol.x.size() - 1];
    res.epigraph_t = t;
    res.objective_value = t;
  }
  return res;
}

}  // namespace

ConicProblem compile_bp(const CMatrix& b, const CVector& y) {
  check_shapes(b, y);
  const auto m = static_cast<std::size_t>(b.rows());
  ProblemBuilder pb;
  const solver::ComplexLifting lift = pb.lift_complex(static_cast<std::size_t>(b.cols()));
  const std::size_t first = pb.add_cone(ConeKind::zero, 2 * m);
  add_real_form(pb, first, b, lift);
  set_measurements(pb, first, y);
  return pb.build();
}

ConicProblem compile_lasso(const CMatrix& b, const CVector& y, double mu) {
  check_shapes(b, y);
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("LASSO needs a finite mu >= 0");
  const auto m = static_cast<std::size_t>(b.rows());
  ProblemBuilder pb;
  const solver::ComplexLifting lift = pb.lift_complex(static_cast<std::size_t>(b.cols()));
  // (mu, y - B r) in SOC
  const std::size_t head = pb.add_cone(ConeKind::second_order, 2 * m + 1);
  pb.set_rhs(head, mu);
  add_real_form(pb, head + 1, b, lift);
  set_measurements(pb, head + 1, y);
  return pb.build();
}

ConicProblem compile_asd(const CMatrix& b, const CVector& y, double delta) {
  check_shapes(b, y);
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ConfigError("ASD needs a finite delta > 0 (use BP for the delta -> 0 limit)");
  }
  const auto m = static_cast<std::size_t>(b.rows());
  ProblemBuilder pb;
  const solver::ComplexLifting lift = pb.lift_complex(static_cast<std::size_t>(b.cols()), 0.0);
  const std::size_t t = pb.add_variables(1);
  pb.add_objective(t, 1.0);
  // (sqrt(M) delta t, y - B r) in SOC
  const std::size_t head = pb.add_cone(ConeKind::second_order, 2 * m + 1);
  pb.add_coefficient(head, t, -std::sqrt(static_cast<double>(m)) * delta);
  add_real_form(pb, head + 1, b, lift);
  set_measurements(pb, head + 1, y);
  // t - sum u >= 0
  const std::size_t row = pb.add_cone(ConeKind::nonnegative, 1);
  pb.add_coefficient(row, t, -1.0);
  for (std::size_t k = 0; k < lift.count; ++k) pb.add_coefficient(row, lift.modulus(k), 1.0);
  return pb.build();
}

RecoveryResult solve_bp(const CMatrix& b, const CVector& y, const solver::SolverOptions& opts) {
  return run(Method::bp, compile_bp(b, y), opts);
}

RecoveryResult solve_lasso(const CMatrix& b, const CVector& y, double mu, const solver::SolverOptions& opts) {
  return run(Method::lasso, compile_lasso(b, y, mu), opts);
}

RecoveryResult solve_asd(const CMatrix& b, const CVector& y, double delta, const solver::SolverOptions& opts) {
  RecoveryResult res = run(Method::asd, compile_asd(b, y, delta), opts);
  const double t = *res.epigraph_t;
  const double l1 = l1_norm(res.r_hat);
  const double scaled = (y - b * res.r_hat).norm() / (std::sqrt(static_cast<double>(b.rows())) * delta);
  const double tol = 1e-4 * std::max(std::abs(t), 1e-12);
  const bool l1_tight = std::abs(t - l1) <= tol;
  const bool res_tight = std::abs(t - scaled) <= tol;
  res.tight = l1_tight && res_tight ? TightCone::both
              : l1_tight            ? TightCone::l1
              : res_tight           ? TightCone::residual
                                    : TightCone::not_applicable;
  return res;
}

RecoveryResult solve(Method method, const CMatrix& b, const CVector& y, double param,
                     const solver::SolverOptions& opts) {
  switch (method) {
    case Method::bp: return solve_bp(b, y, opts);
    case Method::lasso: return solve_lasso(b, y, param, opts);
    case Method::asd: return solve_asd(b, y, param, opts);
  }
  throw ConfigError("unknown recovery method");
}

Certificate certify(const RecoveryResult& result, const CMatrix& b, const CVector& y, const CertifyParams& params) {
  check_shapes(b, y);
  if (result.r_hat.size() != b.cols()) throw DimensionError("certify: r_hat length does not match B");
  Certificate cert;

  double res_sq = 0.0;
  double y_sq = 0.0;
  for (Index i = 0; i < b.rows(); ++i) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < b.cols(); ++k) acc += b(i, k) * result.r_hat[k];
    res_sq += std::norm(acc - y[i]);
    y_sq += std::norm(y[i]);
  }
  cert.residual_norm = std::sqrt(res_sq);
  const double y_norm = std::sqrt(y_sq);
  for (Index k = 0; k < result.r_hat.size(); ++k) cert.l1_norm += std::abs(result.r_hat[k]);

  auto flag = [&](const std::string& what, double excess) {
    std::ostringstream msg;
    msg << to_string(result.method) << ": " << what << " exceeds tolerance " << cert.tolerance << " by "
        << excess - cert.tolerance;
    cert.violations.push_back(msg.str());
  };

  switch (result.method) {
    case Method::bp:
      cert.tolerance = std::max(params.rel_tol * y_norm, 1e-10);
      cert.residual_slack = cert.residual_norm;
      if (cert.residual_slack > cert.tolerance) flag("||B r - y||", cert.residual_slack);
      break;
    case Method::lasso:
      cert.tolerance = params.rel_tol * y_norm;
      cert.residual_slack = cert.residual_norm - params.mu;
      if (cert.residual_slack > cert.tolerance) flag("||B r - y|| - mu", cert.residual_slack);
      break;
    case Method::asd: {
      if (!result.epigraph_t) {
        cert.violations.push_back("asd: result carries no epigraph variable");
        break;
      }
      const double t = *result.epigraph_t;
      cert.tolerance = params.rel_tol * (1.0 + y_norm);
      cert.residual_slack = cert.residual_norm - std::sqrt(static_cast<double>(b.rows())) * params.delta * t;
      cert.epigraph_slack = cert.l1_norm - t;
      if (cert.residual_slack > cert.tolerance) flag("||y - B r|| - sqrt(M) delta t", cert.residual_slack);
      if (cert.epigraph_slack > cert.tolerance) flag("||r||_1 - t", cert.epigraph_slack);
      break;
    }
  }
  return cert;
}

}  // namespace cwss::recovery
