#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flexq {

enum class SolveStatus {
  converged,
  iteration_cap,
  stalled,  // line search could not make progress before the gradient test passed
  unbounded,
  infeasible,
  degenerate_multiple,  // optimal, but another vertex attains the same objective
};

std::string_view to_string(SolveStatus s);

/// True for statuses that carry a usable optimal solution.
inline bool is_optimal(SolveStatus s) {
  return s == SolveStatus::converged || s == SolveStatus::degenerate_multiple;
}

struct SolveReport {
  Eigen::VectorXd solution;
  double objective = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::iteration_cap;
  /// Final infinity-norm of the gradient (quasi-Newton only).
  double grad_norm = 0.0;
  std::string message;

  friend bool operator==(const SolveReport& a, const SolveReport& b) {
    return a.solution.size() == b.solution.size() && a.solution == b.solution &&
           a.objective == b.objective && a.iterations == b.iterations &&
           a.status == b.status && a.grad_norm == b.grad_norm && a.message == b.message;
  }
};

/// Raised when an objective returns a non-finite value mid-search.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QNConfig {
  double grad_tol = 1e-8;
  int max_iter = 500;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;

  void validate() const;
};

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// BFGS on the inverse Hessian with Armijo backtracking. Updates are skipped
/// whenever s'y <= 1e-12. Converged means
/// ||grad||_inf <= grad_tol * max(1, ||x||_inf).
SolveReport minimize_qn(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                        const QNConfig& config = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Golden-section search on a convex function over [lo, hi]. Stops when the
/// interval width is <= 1e-9 * max(1, |lo|, |hi|). If the minimum is flat, the
/// point of smallest magnitude inside the flat region is returned.
double minimize_scalar_convex(const std::function<double(double)>& f, Interval bracket);

/// min c'x  s.t.  A x = b, x >= 0.
struct LPProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;

  void validate() const;
};

/// Two-phase dense tableau simplex using Bland's rule for both the entering
/// and the leaving variable. `solution` is left empty when infeasible or
/// unbounded.
SolveReport solve_lp_simplex(const LPProblem& problem);

}  // namespace flexq
