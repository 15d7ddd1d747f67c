#pragma once

#include "cwss/common.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

// First-order operator-splitting solver for linear cone programs
//
//     minimize    c'x
//     subject to  A x + s = b,   s in K = K_1 x ... x K_p,
//
// where each K_i is the zero cone, the nonnegative orthant or a second-order
// cone {(t, z) : ||z||_2 <= t}. The dual is
//
//     maximize    -b'y
//     subject to  A'y + c = 0,   y in K*.
//
// The iteration is ADMM on the splitting (x~, s~) = (x, s): an equality-
// constrained quadratic step solved with a cached factorization, followed by
// a Euclidean projection onto K. Complex unknowns are handled by the caller
// through ComplexLifting.
namespace cwss::solver {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class ConeKind { zero, nonnegative, second_order };
std::string_view to_string(ConeKind kind);

/// A block of consecutive constraint rows. For second_order the first row
/// is the bound t and the remaining dim-1 rows are z.
struct Cone {
  ConeKind kind = ConeKind::zero;
  std::size_t dim = 0;
};

/// n complex unknowns z_k stored as three real blocks: Re z, Im z and the
/// modulus bounds u_k with ||(Re z_k, Im z_k)||_2 <= u_k. Summing u gives the
/// complex l1 norm at the optimum.
struct ComplexLifting {
  std::size_t count = 0;
  std::size_t re_offset = 0;
  std::size_t im_offset = 0;
  std::size_t modulus_offset = 0;

  [[nodiscard]] std::size_t re(std::size_t k) const { return re_offset + k; }
  [[nodiscard]] std::size_t im(std::size_t k) const { return im_offset + k; }
  [[nodiscard]] std::size_t modulus(std::size_t k) const { return modulus_offset + k; }
  [[nodiscard]] CVector extract(const RVector& x) const;
  [[nodiscard]] RVector modulus_bounds(const RVector& x) const;
};

struct ConicProblem {
  SparseMatrix a;
  RVector b;
  RVector c;
  std::vector<Cone> cones;
  std::vector<ComplexLifting> liftings;

  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(a.cols()); }
  [[nodiscard]] std::size_t m() const { return static_cast<std::size_t>(a.rows()); }
  /// Throws DimensionError if the cone blocks do not tile the rows or the
  /// vectors disagree with A.
  void validate() const;
};

/// Incremental assembly of a ConicProblem. Rows are created by add_cone in
/// the order the blocks will appear in K.
class ProblemBuilder {
 public:
  std::size_t add_variables(std::size_t count);
  /// Allocates 3n variables (Re, Im, modulus bound), appends n 3-dimensional
  /// second-order cones and adds l1_weight * sum(u) to the objective.
  ComplexLifting lift_complex(std::size_t n_complex, double l1_weight = 1.0);
  /// Appends a cone block and returns the index of its first row.
  std::size_t add_cone(ConeKind kind, std::size_t dim);
  /// Coefficients accumulate when the same entry is set twice.
  void add_coefficient(std::size_t row, std::size_t col, double value);
  void set_rhs(std::size_t row, double value);
  void add_objective(std::size_t col, double value);

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t m() const { return m_; }
  [[nodiscard]] ConicProblem build() const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Eigen::Triplet<double>> entries_;
  std::vector<std::pair<std::size_t, double>> rhs_;
  std::vector<std::pair<std::size_t, double>> objective_;
  std::vector<Cone> cones_;
  std::vector<ComplexLifting> liftings_;
};

/// Lifting layout for n complex unknowns placed at the start of the variable
/// vector, without emitting any constraint.
ComplexLifting lift_complex(std::size_t n_complex);

enum class SolveStatus { optimal, max_iters, infeasible };
std::string_view to_string(SolveStatus status);

enum class KktBackend {
  automatic,
  dense,     // Cholesky of sigma*I + A'RA
  low_rank,  // sparse Cholesky of the sparse-row part plus a Woodbury update for dense rows
};

struct IterationRecord {
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double rho = 0.0;
};

struct SolverOptions {
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  double tol_gap = 1e-6;
  int max_iters = 50000;
  /// Residuals are evaluated (and the log callback fired) every check_interval iterations.
  int check_interval = 10;
  double rho = 0.1;
  double sigma = 1e-6;
  double relaxation = 1.6;
  bool adaptive_rho = true;
  int equilibration_passes = 15;
  KktBackend backend = KktBackend::automatic;
  std::function<void(const IterationRecord&)> on_check;
};

struct ConicSolution {
  RVector x;
  RVector s;
  RVector y;
  SolveStatus status = SolveStatus::max_iters;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double objective = 0.0;
  int iterations = 0;
  int factorizations = 0;
};

/// Residual definitions shared by the solver's stopping test and kkt_check:
///   primal = ||Ax + s - b|| / (1 + max(||Ax||, ||s||, ||b||))
///   dual   = ||A'y + c||    / (1 + max(||A'y||, ||c||))
///   gap    = |c'x + b'y|    / (1 + |c'x| + |b'y|)
/// with Euclidean norms throughout.
struct KktReport {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  /// Euclidean distance of s from K plus that of y from K*.
  double cone_violation = 0.0;

  [[nodiscard]] bool within(double tol_primal, double tol_dual, double tol_gap,
                            double tol_cone = 1e-9) const;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

/// Recomputes every residual from the original problem data with explicit
/// loops, independent of the solver's linear algebra.
KktReport kkt_check(const ConicProblem& problem, const ConicSolution& solution);

/// Returns an on_check callback that streams "iteration,primal_res,dual_res,gap,rho" rows.
std::function<void(const IterationRecord&)> csv_iteration_log(std::ostream& out);

/// Euclidean projection onto a single cone, in place.
void project_onto_cone(ConeKind kind, Eigen::Ref<RVector> v);

}  // namespace cwss::solver
