#pragma once

#include "cwss/common.hpp"
#include "cwss/solver.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Spectrum recovery from y = B r + noise with a complex M x N matrix B:
//
//   BP     minimize ||r||_1  subject to  B r = y
//   LASSO  minimize ||r||_1  subject to  ||B r - y||_2 <= mu
//   ASD    minimize t        subject to  ||y - B r||_2 <= sqrt(M) delta t,  ||r||_1 <= t
//
// ||r||_1 is the sum of complex moduli. The ASD program equals
// min_r max(||r||_1, ||y - B r||_2 / (sqrt(M) delta)).
namespace cwss::recovery {

enum class Method { bp, lasso, asd };
std::string_view to_string(Method method);
/// Accepts "bp", "lasso", "asd" (case-insensitive).
Method parse_method(std::string_view name);
std::vector<Method> parse_methods(std::string_view list);

/// Which ASD constraint is active at the returned point.
enum class TightCone { not_applicable, l1, residual, both };
std::string_view to_string(TightCone tight);

struct RecoveryResult {
  CVector r_hat;
  Method method = Method::bp;
  /// ||r_hat||_1 for BP and LASSO, t for ASD.
  double objective_value = 0.0;
  std::optional<double> epigraph_t;
  TightCone tight = TightCone::not_applicable;
  solver::SolveStatus status = solver::SolveStatus::max_iters;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double wall_time_s = 0.0;

  [[nodiscard]] bool converged() const { return status == solver::SolveStatus::optimal; }
};

solver::ConicProblem compile_bp(const CMatrix& b, const CVector& y);
solver::ConicProblem compile_lasso(const CMatrix& b, const CVector& y, double mu);
solver::ConicProblem compile_asd(const CMatrix& b, const CVector& y, double delta);

RecoveryResult solve_bp(const CMatrix& b, const CVector& y, const solver::SolverOptions& opts = {});
RecoveryResult solve_lasso(const CMatrix& b, const CVector& y, double mu, const solver::SolverOptions& opts = {});
RecoveryResult solve_asd(const CMatrix& b, const CVector& y, double delta, const solver::SolverOptions& opts = {});

/// Compiles and solves the requested program; param is mu for LASSO and delta
/// for ASD and ignored for BP.
RecoveryResult solve(Method method, const CMatrix& b, const CVector& y, double param,
                     const solver::SolverOptions& opts = {});

struct CertifyParams {
  double mu = 0.0;     // LASSO
  double delta = 0.0;  // ASD
  /// Tolerances scale with ||y||_2: BP uses rel_tol ||y||, LASSO mu + rel_tol ||y||,
  /// ASD rel_tol (1 + ||y||).
  double rel_tol = 1e-5;
};

struct Certificate {
  double residual_norm = 0.0;  // ||B r_hat - y||_2
  double l1_norm = 0.0;        // sum |r_hat_k|
  /// Residual excess over its bound: ||Br - y|| for BP, ||Br - y|| - mu for
  /// LASSO, ||y - Br|| - sqrt(M) delta t for ASD.
  double residual_slack = 0.0;
  /// ||r_hat||_1 - t (ASD only).
  double epigraph_slack = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Recomputes the constraint values of a result with plain loops, independent
/// of the conic formulation.
Certificate certify(const RecoveryResult& result, const CMatrix& b, const CVector& y, const CertifyParams& params);

}  // namespace cwss::recovery
