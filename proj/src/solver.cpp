#include "cwss/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

namespace cwss::solver {

std::string_view to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::zero: return "zero";
    case ConeKind::nonnegative: return "nonnegative";
    case ConeKind::second_order: return "second_order";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

CVector ComplexLifting::extract(const RVector& x) const {
  CVector z(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    z[static_cast<Eigen::Index>(k)] = Complex(x[static_cast<Eigen::Index>(re(k))],
                                              x[static_cast<Eigen::Index>(im(k))]);
  }
  return z;
}

RVector ComplexLifting::modulus_bounds(const RVector& x) const {
  return x.segment(static_cast<Eigen::Index>(modulus_offset), static_cast<Eigen::Index>(count));
}

void ConicProblem::validate() const {
  if (static_cast<std::size_t>(b.size()) != m()) {
    throw DimensionError("conic problem: b has " + std::to_string(b.size()) + " entries, A has " +
                         std::to_string(m()) + " rows");
  }
  if (static_cast<std::size_t>(c.size()) != n()) {
    throw DimensionError("conic problem: c has " + std::to_string(c.size()) + " entries, A has " +
                         std::to_string(n()) + " columns");
  }
  std::size_t rows = 0;
  for (const Cone& cone : cones) {
    if (cone.dim == 0) throw DimensionError("conic problem: empty cone block");
    rows += cone.dim;
  }
  if (rows != m()) {
    throw DimensionError("conic problem: cone blocks cover " + std::to_string(rows) + " rows, A has " +
                         std::to_string(m()));
  }
  for (const ComplexLifting& lift : liftings) {
    const std::size_t end = std::max({lift.re_offset, lift.im_offset, lift.modulus_offset}) + lift.count;
    if (end > n()) throw DimensionError("conic problem: complex lifting exceeds the variable count");
  }
}

std::size_t ProblemBuilder::add_variables(std::size_t count) {
  const std::size_t first = n_;
  n_ += count;
  return first;
}

ComplexLifting ProblemBuilder::lift_complex(std::size_t n_complex, double l1_weight) {
  const std::size_t first = add_variables(3 * n_complex);
  const ComplexLifting lift{n_complex, first, first + n_complex, first + 2 * n_complex};
  for (std::size_t k = 0; k < n_complex; ++k) {
    // s = b - Ax = (u_k, re_k, im_k) must lie in SOC(3)
    const std::size_t row = add_cone(ConeKind::second_order, 3);
    add_coefficient(row, lift.modulus(k), -1.0);
    add_coefficient(row + 1, lift.re(k), -1.0);
    add_coefficient(row + 2, lift.im(k), -1.0);
    if (l1_weight != 0.0) add_objective(lift.modulus(k), l1_weight);
  }
  liftings_.push_back(lift);
  return lift;
}

std::size_t ProblemBuilder::add_cone(ConeKind kind, std::size_t dim) {
  if (dim == 0) throw DimensionError("cone block of dimension 0");
  const std::size_t first = m_;
  cones_.push_back({kind, dim});
  m_ += dim;
  return first;
}

void ProblemBuilder::add_coefficient(std::size_t row, std::size_t col, double value) {
  if (row >= m_ || col >= n_) throw DimensionError("coefficient outside the allocated problem");
  entries_.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
}

void ProblemBuilder::set_rhs(std::size_t row, double value) {
  if (row >= m_) throw DimensionError("rhs row outside the allocated problem");
  rhs_.emplace_back(row, value);
}

void ProblemBuilder::add_objective(std::size_t col, double value) {
  if (col >= n_) throw DimensionError("objective column outside the allocated problem");
  objective_.emplace_back(col, value);
}

ConicProblem ProblemBuilder::build() const {
  ConicProblem p;
  p.a.resize(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
  p.a.setFromTriplets(entries_.begin(), entries_.end());
  p.a.makeCompressed();
  p.b = RVector::Zero(static_cast<Eigen::Index>(m_));
  for (const auto& [row, value] : rhs_) p.b[static_cast<Eigen::Index>(row)] = value;
  p.c = RVector::Zero(static_cast<Eigen::Index>(n_));
  for (const auto& [col, value] : objective_) p.c[static_cast<Eigen::Index>(col)] += value;
  p.cones = cones_;
  p.liftings = liftings_;
  return p;
}

ComplexLifting lift_complex(std::size_t n_complex) {
  return {n_complex, 0, n_complex, 2 * n_complex};
}

void project_onto_cone(ConeKind kind, Eigen::Ref<RVector> v) {
  switch (kind) {
    case ConeKind::zero:
      v.setZero();
      return;
    case ConeKind::nonnegative:
      v = v.cwiseMax(0.0);
      return;
    case ConeKind::second_order: {
      const Eigen::Index dim = v.size();
      if (dim == 0) return;
      const double t = v[0];
      if (dim == 1) {
        v[0] = std::max(t, 0.0);
        return;
      }
      const double nz = v.tail(dim - 1).norm();
      if (nz <= t) return;
      if (nz <= -t) {
        v.setZero();
        return;
      }
      const double a = 0.5 * (t + nz);
      v[0] = a;
      v.tail(dim - 1) *= a / nz;
      return;
    }
  }
}

bool KktReport::within(double tol_primal, double tol_dual, double tol_gap, double tol_cone) const {
  return primal_residual <= tol_primal && dual_residual <= tol_dual && gap <= tol_gap &&
         cone_violation <= tol_cone;
}

std::function<void(const IterationRecord&)> csv_iteration_log(std::ostream& out) {
  out << "iteration,primal_res,dual_res,gap,rho\n";
  return [&out](const IterationRecord& r) {
    out << r.iteration << ',' << r.primal_residual << ',' << r.dual_residual << ',' << r.gap << ','
        << r.rho << '\n';
  };
}

namespace {

using Index = Eigen::Index;
using ColSparse = Eigen::SparseMatrix<double>;

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

Residuals evaluate(const ConicProblem& p, const RVector& x, const RVector& s, const RVector& y) {
  const RVector ax = p.a * x;
  const RVector aty = p.a.transpose() * y;
  const double cx = p.c.dot(x);
  const double by = p.b.dot(y);
  Residuals r;
  r.primal = (ax + s - p.b).norm() / (1.0 + std::max({ax.norm(), s.norm(), p.b.norm()}));
  r.dual = (aty + p.c).norm() / (1.0 + std::max(aty.norm(), p.c.norm()));
  r.gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
  return r;
}

// Rows of A with no coefficients pin s_i = b_i; reject blocks where that
// value cannot lie in the cone.
bool structurally_infeasible(const ConicProblem& p) {
  const double tol = 1e-12 * (1.0 + p.b.lpNorm<Eigen::Infinity>());
  Index row = 0;
  for (const Cone& cone : p.cones) {
    const Index dim = static_cast<Index>(cone.dim);
    bool all_empty = true;
    for (Index i = row; i < row + dim; ++i) {
      const bool empty = p.a.outerIndexPtr()[i + 1] == p.a.outerIndexPtr()[i];
      all_empty = all_empty && empty;
      if (!empty) continue;
      if (cone.kind == ConeKind::zero && std::abs(p.b[i]) > tol) return true;
      if (cone.kind == ConeKind::nonnegative && p.b[i] < -tol) return true;
    }
    if (cone.kind == ConeKind::second_order && all_empty) {
      RVector v = p.b.segment(row, dim);
      const RVector orig = v;
      project_onto_cone(cone.kind, v);
      if ((v - orig).norm() > tol) return true;
    }
    row += dim;
  }
  return false;
}

struct Equilibration {
  SparseMatrix a;
  RVector col;  // D
  RVector row;  // E
  double cost = 1.0;
  double rhs = 1.0;
};

// Ruiz equilibration. Rows of one second-order cone share a single factor so
// the scaled cone is the same cone.
Equilibration equilibrate(const ConicProblem& p, int passes) {
  Equilibration eq;
  eq.a = p.a;
  const Index n = eq.a.cols();
  const Index m = eq.a.rows();
  eq.col = RVector::Ones(n);
  eq.row = RVector::Ones(m);
  for (int pass = 0; pass < passes; ++pass) {
    RVector cn = RVector::Zero(n);
    RVector rn = RVector::Zero(m);
    for (Index i = 0; i < m; ++i) {
      for (SparseMatrix::InnerIterator it(eq.a, i); it; ++it) {
        const double v = std::abs(it.value());
        rn[i] = std::max(rn[i], v);
        cn[it.col()] = std::max(cn[it.col()], v);
      }
    }
    Index offset = 0;
    for (const Cone& cone : p.cones) {
      const Index dim = static_cast<Index>(cone.dim);
      if (cone.kind == ConeKind::second_order) {
        rn.segment(offset, dim).setConstant(rn.segment(offset, dim).maxCoeff());
      }
      offset += dim;
    }
    auto factor = [](double norm) {
      if (norm <= 0.0) return 1.0;
      return std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
    };
    const RVector dc = cn.unaryExpr(factor);
    const RVector er = rn.unaryExpr(factor);
    for (Index i = 0; i < m; ++i) {
      for (SparseMatrix::InnerIterator it(eq.a, i); it; ++it) it.valueRef() *= er[i] * dc[it.col()];
    }
    eq.col = eq.col.cwiseProduct(dc);
    eq.row = eq.row.cwiseProduct(er);
  }
  const double c_norm = eq.col.cwiseProduct(p.c).lpNorm<Eigen::Infinity>();
  eq.cost = c_norm > 0.0 ? std::clamp(1.0 / c_norm, 1e-6, 1e6) : 1.0;
  const double b_norm = eq.row.cwiseProduct(p.b).lpNorm<Eigen::Infinity>();
  eq.rhs = b_norm > 0.0 ? std::clamp(b_norm, 1e-6, 1e6) : 1.0;
  return eq;
}

// Solves (sigma I + A' R A) x = rhs. Rows with many coefficients are kept as
// a dense block D; the remaining rows form a sparse matrix whose Gram part
// S = sigma I + A_s' R_s A_s is factored sparsely. With the low-rank backend
// the dense rows enter through the Woodbury identity
//   K^{-1} = S^{-1} - S^{-1} D' (R_d^{-1} + D S^{-1} D')^{-1} D S^{-1}.
class KktSystem {
 public:
  KktSystem(const SparseMatrix& a, const std::vector<Cone>& cones, double sigma, KktBackend requested)
      : n_(a.cols()), m_(a.rows()), sigma_(sigma) {
    (void)cones;
    const Index threshold = std::max<Index>(16, n_ / 10);
    for (Index i = 0; i < m_; ++i) {
      const Index nnz = a.outerIndexPtr()[i + 1] - a.outerIndexPtr()[i];
      (nnz > threshold ? dense_rows_ : sparse_rows_).push_back(i);
    }
    dense_ = RMatrix::Zero(static_cast<Index>(dense_rows_.size()), n_);
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      for (SparseMatrix::InnerIterator it(a, dense_rows_[k]); it; ++it) {
        dense_(static_cast<Index>(k), it.col()) = it.value();
      }
    }
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t k = 0; k < sparse_rows_.size(); ++k) {
      for (SparseMatrix::InnerIterator it(a, sparse_rows_[k]); it; ++it) {
        trips.emplace_back(static_cast<int>(k), static_cast<int>(it.col()), it.value());
      }
    }
    sparse_.resize(static_cast<Index>(sparse_rows_.size()), n_);
    sparse_.setFromTriplets(trips.begin(), trips.end());
    sparse_.makeCompressed();
    sparse_t_ = ColSparse(sparse_.transpose());
    requested_ = requested;
    dense_buf_.resize(dense_.rows());
    sparse_buf_.resize(sparse_.rows());
  }

  void factor(const RVector& rho) {
    RVector rho_d(dense_.rows());
    RVector rho_s(sparse_.rows());
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) rho_d[static_cast<Index>(k)] = rho[dense_rows_[k]];
    for (std::size_t k = 0; k < sparse_rows_.size(); ++k) rho_s[static_cast<Index>(k)] = rho[sparse_rows_[k]];

    ColSparse gram = sparse_t_ * rho_s.asDiagonal() * ColSparse(sparse_);
    ColSparse identity(n_, n_);
    identity.setIdentity();
    gram += sigma_ * identity;
    gram.makeCompressed();

    if (backend_ == KktBackend::automatic) backend_ = choose_backend(gram);

    if (backend_ == KktBackend::dense) {
      RMatrix k = RMatrix(gram);
      if (dense_.rows() > 0) {
        const RMatrix weighted = rho_d.cwiseSqrt().asDiagonal() * dense_;
        k.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
      }
      dense_llt_.compute(k);
      if (dense_llt_.info() != Eigen::Success) throw NumericalError("KKT factorization failed");
      return;
    }

    sparse_llt_.compute(gram);
    if (sparse_llt_.info() != Eigen::Success) throw NumericalError("sparse KKT factorization failed");
    if (dense_.rows() > 0) {
      woodbury_ = sparse_llt_.solve(RMatrix(dense_.transpose()));
      RMatrix cap = dense_ * woodbury_;
      cap.diagonal() += rho_d.cwiseInverse();
      capacitance_.compute(cap);
      if (capacitance_.info() != Eigen::Success) throw NumericalError("capacitance factorization failed");
    }
  }

  void solve(const RVector& rhs, RVector& out) const {
    if (backend_ == KktBackend::dense) {
      out = dense_llt_.solve(rhs);
      return;
    }
    out = sparse_llt_.solve(rhs);
    if (dense_.rows() > 0) {
      const RVector w = capacitance_.solve(dense_ * out);
      out.noalias() -= woodbury_ * w;
    }
  }

  void multiply(const RVector& x, RVector& out) {
    out.resize(m_);
    if (dense_.rows() > 0) {
      dense_buf_.noalias() = dense_ * x;
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) out[dense_rows_[k]] = dense_buf_[static_cast<Index>(k)];
    }
    if (sparse_.rows() > 0) {
      sparse_buf_.noalias() = sparse_ * x;
      for (std::size_t k = 0; k < sparse_rows_.size(); ++k) out[sparse_rows_[k]] = sparse_buf_[static_cast<Index>(k)];
    }
  }

  void multiply_transpose(const RVector& v, RVector& out) {
    out = RVector::Zero(n_);
    if (dense_.rows() > 0) {
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) dense_buf_[static_cast<Index>(k)] = v[dense_rows_[k]];
      out.noalias() += dense_.transpose() * dense_buf_;
    }
    if (sparse_.rows() > 0) {
      for (std::size_t k = 0; k < sparse_rows_.size(); ++k) sparse_buf_[static_cast<Index>(k)] = v[sparse_rows_[k]];
      out.noalias() += sparse_t_ * sparse_buf_;
    }
  }

  [[nodiscard]] KktBackend backend() const { return backend_; }

 private:
  KktBackend choose_backend(const ColSparse& gram) const {
    if (requested_ != KktBackend::automatic) return requested_;
    if (dense_.rows() == 0) return KktBackend::low_rank;
    if (2 * dense_.rows() > n_) return KktBackend::dense;
    const RVector diag = gram.diagonal();
    // Columns touched only by dense rows leave S nearly singular and the
    // Woodbury correction would cancel catastrophically.
    if (diag.minCoeff() < 1e-4 * diag.maxCoeff()) return KktBackend::dense;
    return KktBackend::low_rank;
  }

  Index n_;
  Index m_;
  double sigma_;
  KktBackend requested_ = KktBackend::automatic;
  KktBackend backend_ = KktBackend::automatic;
  std::vector<Index> dense_rows_;
  std::vector<Index> sparse_rows_;
  RMatrix dense_;
  SparseMatrix sparse_;
  ColSparse sparse_t_;
  RVector dense_buf_;
  RVector sparse_buf_;
  Eigen::LLT<RMatrix, Eigen::Lower> dense_llt_;
  Eigen::SimplicialLLT<ColSparse> sparse_llt_;
  RMatrix woodbury_;
  Eigen::LLT<RMatrix> capacitance_;
};

RVector row_penalties(const std::vector<Cone>& cones, Index m, double rho) {
  RVector r(m);
  Index offset = 0;
  for (const Cone& cone : cones) {
    const Index dim = static_cast<Index>(cone.dim);
    r.segment(offset, dim).setConstant(cone.kind == ConeKind::zero ? 1e3 * rho : rho);
    offset += dim;
  }
  return r;
}

void project(const std::vector<Cone>& cones, RVector& v) {
  Index offset = 0;
  for (const Cone& cone : cones) {
    const Index dim = static_cast<Index>(cone.dim);
    project_onto_cone(cone.kind, v.segment(offset, dim));
    offset += dim;
  }
}

// Distance of v from the dual cone K* (zero-cone rows are unconstrained).
double dual_cone_distance(const std::vector<Cone>& cones, const RVector& v) {
  double sq = 0.0;
  Index offset = 0;
  for (const Cone& cone : cones) {
    const Index dim = static_cast<Index>(cone.dim);
    if (cone.kind != ConeKind::zero) {
      RVector block = v.segment(offset, dim);
      const RVector orig = block;
      project_onto_cone(cone.kind, block);
      sq += (block - orig).squaredNorm();
    }
    offset += dim;
  }
  return std::sqrt(sq);
}

// Farkas certificate: A'dy = 0, dy in K*, b'dy < 0.
bool certifies_infeasibility(const ConicProblem& p, const RVector& dy) {
  const double scale = dy.lpNorm<Eigen::Infinity>();
  if (!(scale > 1e-12)) return false;
  const RVector v = dy / scale;
  constexpr double eps = 1e-6;
  const double a_norm = p.a.nonZeros() > 0 ? std::max(1.0, p.a.coeffs().abs().maxCoeff()) : 1.0;
  if (p.b.dot(v) >= -eps * std::max(1.0, p.b.lpNorm<Eigen::Infinity>())) return false;
  if ((p.a.transpose() * v).lpNorm<Eigen::Infinity>() > eps * a_norm) return false;
  return dual_cone_distance(p.cones, v) <= eps;
}

struct Iterate {
  RVector x;
  RVector s;
  RVector y;
  Residuals res;
  int iteration = 0;
};

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  const Index n = static_cast<Index>(problem.n());
  const Index m = static_cast<Index>(problem.m());
  const int check = std::max(1, options.check_interval);

  ConicSolution out;
  out.x = RVector::Zero(n);
  out.s = RVector::Zero(m);
  out.y = RVector::Zero(m);

  auto finish = [&](const RVector& x, const RVector& s, const RVector& y, const Residuals& r, int iters,
                    SolveStatus status) {
    out.x = x;
    out.s = s;
    out.y = y;
    out.primal_residual = r.primal;
    out.dual_residual = r.dual;
    out.gap = r.gap;
    out.iterations = iters;
    out.status = status;
    out.objective = problem.c.dot(x);
    return out;
  };

  if (structurally_infeasible(problem)) {
    return finish(out.x, out.s, out.y, evaluate(problem, out.x, out.s, out.y), 0, SolveStatus::infeasible);
  }

  Equilibration eq = equilibrate(problem, options.equilibration_passes);
  const RVector b_hat = eq.row.cwiseProduct(problem.b) / eq.rhs;
  const RVector c_hat = eq.cost * eq.col.cwiseProduct(problem.c);

  double rho = options.rho;
  RVector penalty = row_penalties(problem.cones, m, rho);
  KktSystem kkt(eq.a, problem.cones, options.sigma, options.backend);
  kkt.factor(penalty);
  out.factorizations = 1;

  const double alpha = options.relaxation;
  const double sigma = options.sigma;
  RVector x = RVector::Zero(n);
  RVector s = RVector::Zero(m);
  RVector lambda = RVector::Zero(m);
  RVector lambda_prev = lambda;
  RVector ax = RVector::Zero(m);
  RVector x_tilde(n);
  RVector ax_tilde(m);
  RVector rhs(n);
  RVector work_m(m);
  RVector v(m);

  auto unscale = [&](Iterate& it) {
    it.x = eq.rhs * eq.col.cwiseProduct(x);
    it.s = eq.rhs * s.cwiseQuotient(eq.row);
    it.y = -eq.row.cwiseProduct(lambda) / eq.cost;
  };

  std::optional<Iterate> best;
  auto score = [](const Residuals& r) { return std::max({r.primal, r.dual, r.gap}); };

  for (int k = 1; k <= options.max_iters; ++k) {
    const bool checking = (k % check == 0) || k == options.max_iters;
    if (checking) lambda_prev = lambda;

    work_m = penalty.cwiseProduct(b_hat - s) + lambda;
    kkt.multiply_transpose(work_m, rhs);
    rhs += sigma * x - c_hat;
    kkt.solve(rhs, x_tilde);
    kkt.multiply(x_tilde, ax_tilde);

    // s~ = b - A x~
    x = alpha * x_tilde + (1.0 - alpha) * x;
    v = alpha * (b_hat - ax_tilde) + (1.0 - alpha) * s + lambda.cwiseQuotient(penalty);
    ax = alpha * ax_tilde + (1.0 - alpha) * ax;
    s = v;
    project(problem.cones, s);
    lambda = penalty.cwiseProduct(v - s);

    if (!checking) continue;

    Iterate it;
    unscale(it);
    it.res = evaluate(problem, it.x, it.s, it.y);
    it.iteration = k;
    if (options.on_check) options.on_check({k, it.res.primal, it.res.dual, it.res.gap, rho});

    if (it.res.primal <= options.tol_primal && it.res.dual <= options.tol_dual && it.res.gap <= options.tol_gap) {
      return finish(it.x, it.s, it.y, it.res, k, SolveStatus::optimal);
    }
    const RVector dy = -eq.row.cwiseProduct(lambda - lambda_prev) / eq.cost;
    if (certifies_infeasibility(problem, dy)) {
      return finish(it.x, it.s, it.y, it.res, k, SolveStatus::infeasible);
    }
    if (!best || score(it.res) < score(best->res)) best = std::move(it);

    if (options.adaptive_rho && k % (5 * check) == 0) {
      RVector aty(n);
      kkt.multiply_transpose(lambda, aty);
      const double p_norm = (ax + s - b_hat).lpNorm<Eigen::Infinity>() /
                            std::max({ax.lpNorm<Eigen::Infinity>(), s.lpNorm<Eigen::Infinity>(), 1e-12});
      const double d_norm = (c_hat - aty).lpNorm<Eigen::Infinity>() /
                            std::max({aty.lpNorm<Eigen::Infinity>(), c_hat.lpNorm<Eigen::Infinity>(), 1e-12});
      if (p_norm > 0.0 && d_norm > 0.0) {
        const double proposed = std::clamp(rho * std::sqrt(p_norm / d_norm), 1e-6, 1e6);
        if (proposed > 5.0 * rho || proposed < 0.2 * rho) {
          rho = proposed;
          penalty = row_penalties(problem.cones, m, rho);
          kkt.factor(penalty);
          ++out.factorizations;
        }
      }
    }
  }

  if (best) return finish(best->x, best->s, best->y, best->res, options.max_iters, SolveStatus::max_iters);
  return finish(out.x, out.s, out.y, evaluate(problem, out.x, out.s, out.y), options.max_iters,
                SolveStatus::max_iters);
}

KktReport kkt_check(const ConicProblem& problem, const ConicSolution& solution) {
  const std::size_t n = problem.n();
  const std::size_t m = problem.m();
  if (static_cast<std::size_t>(solution.x.size()) != n || static_cast<std::size_t>(solution.s.size()) != m ||
      static_cast<std::size_t>(solution.y.size()) != m) {
    throw DimensionError("kkt_check: solution dimensions do not match the problem");
  }
  const int* outer = problem.a.outerIndexPtr();
  const int* inner = problem.a.innerIndexPtr();
  const double* values = problem.a.valuePtr();

  std::vector<double> ax(m, 0.0);
  std::vector<double> aty(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (int p = outer[i]; p < outer[i + 1]; ++p) {
      ax[i] += values[p] * solution.x[inner[p]];
      aty[static_cast<std::size_t>(inner[p])] += values[p] * solution.y[static_cast<Index>(i)];
    }
  }

  double rp = 0.0, ax_sq = 0.0, s_sq = 0.0, b_sq = 0.0, by = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Index>(i);
    const double r = ax[i] + solution.s[ii] - problem.b[ii];
    rp += r * r;
    ax_sq += ax[i] * ax[i];
    s_sq += solution.s[ii] * solution.s[ii];
    b_sq += problem.b[ii] * problem.b[ii];
    by += problem.b[ii] * solution.y[ii];
  }
  double rd = 0.0, aty_sq = 0.0, c_sq = 0.0, cx = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Index>(j);
    const double r = aty[j] + problem.c[jj];
    rd += r * r;
    aty_sq += aty[j] * aty[j];
    c_sq += problem.c[jj] * problem.c[jj];
    cx += problem.c[jj] * solution.x[jj];
  }

  KktReport rep;
  rep.primal_residual = std::sqrt(rp) / (1.0 + std::sqrt(std::max({ax_sq, s_sq, b_sq})));
  rep.dual_residual = std::sqrt(rd) / (1.0 + std::sqrt(std::max(aty_sq, c_sq)));
  rep.gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));

  // Distances computed in closed form per cone.
  auto soc_distance = [](const double* v, std::size_t dim) {
    const double t = v[0];
    double zz = 0.0;
    for (std::size_t i = 1; i < dim; ++i) zz += v[i] * v[i];
    const double nz = std::sqrt(zz);
    if (nz <= t) return 0.0;
    if (nz <= -t) return std::sqrt(t * t + zz);
    return (nz - t) / std::sqrt(2.0);
  };
  double violation = 0.0;
  std::size_t row = 0;
  for (const Cone& cone : problem.cones) {
    const double* s = solution.s.data() + row;
    const double* y = solution.y.data() + row;
    double s_dist = 0.0, y_dist = 0.0;
    switch (cone.kind) {
      case ConeKind::zero:
        for (std::size_t i = 0; i < cone.dim; ++i) s_dist += s[i] * s[i];
        s_dist = std::sqrt(s_dist);
        break;
      case ConeKind::nonnegative:
        for (std::size_t i = 0; i < cone.dim; ++i) {
          s_dist += std::min(s[i], 0.0) * std::min(s[i], 0.0);
          y_dist += std::min(y[i], 0.0) * std::min(y[i], 0.0);
        }
        s_dist = std::sqrt(s_dist);
        y_dist = std::sqrt(y_dist);
        break;
      case ConeKind::second_order:
        s_dist = soc_distance(s, cone.dim);
        y_dist = soc_distance(y, cone.dim);
        break;
    }
    violation += s_dist + y_dist;
    row += cone.dim;
  }
  rep.cone_violation = violation;
  return rep;
}

}  // namespace cwss::solver
