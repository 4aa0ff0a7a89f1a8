#include "flexquant/optim.hpp"

#include <cmath>
#include <vector>

namespace flexq {

void LPProblem::validate() const {
  if (constraints.rows() != rhs.size()) {
    throw std::invalid_argument("LPProblem: constraint rows != rhs length");
  }
  if (constraints.cols() != objective.size()) {
    throw std::invalid_argument("LPProblem: constraint cols != objective length");
  }
  if (!constraints.allFinite() || !rhs.allFinite() || !objective.allFinite()) {
    throw std::invalid_argument("LPProblem: non-finite entry");
  }
}

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Rows 0..m-1 hold B^-1 [A | b]; row m holds the reduced costs and -z.
class SimplexTableau {
 public:
  SimplexTableau(const LPProblem& lp) : m_(lp.rhs.size()), n_(lp.objective.size()) {
    // Find a starting identity column per row (after making b >= 0).
    Eigen::MatrixXd a = lp.constraints;
    Eigen::VectorXd b = lp.rhs;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (b(i) < 0.0) {
        a.row(i) *= -1.0;
        b(i) = -b(i);
      }
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      Eigen::Index row = -1;
      bool unit = true;
      for (Eigen::Index i = 0; i < m_ && unit; ++i) {
        const double v = a(i, j);
        if (v == 0.0) continue;
        if (v == 1.0 && row < 0) {
          row = i;
        } else {
          unit = false;
        }
      }
      if (unit && row >= 0 && basis_[static_cast<std::size_t>(row)] < 0) {
        basis_[static_cast<std::size_t>(row)] = j;
      }
    }
    n_art_ = 0;
    for (long bv : basis_) n_art_ += (bv < 0);

    const Eigen::Index width = n_ + n_art_ + 1;
    t_ = Tableau::Zero(m_ + 1, width);
    t_.topLeftCorner(m_, n_) = a;
    t_.block(0, width - 1, m_, 1) = b;
    Eigen::Index next_art = n_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < 0) {
        t_(i, next_art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = next_art++;
      }
    }
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index vars() const { return n_; }
  Eigen::Index artificials() const { return n_art_; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  const std::vector<long>& basis() const { return basis_; }
  double value() const { return -t_(m_, rhs_col()); }
  double reduced_cost(Eigen::Index j) const { return t_(m_, j); }

  /// Loads reduced costs for the given cost vector (length n_ + n_art_).
  void price(const Eigen::VectorXd& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  // Pivot rows are typically sparse, so only their nonzero columns are
  // eliminated; skipped entries would subtract exact zeros.
  void pivot(Eigen::Index r, Eigen::Index q) {
    t_.row(r) /= t_(r, q);
    nonzero_.clear();
    const double* prow = t_.row(r).data();
    for (Eigen::Index j = 0; j < t_.cols(); ++j) {
      if (prow[j] != 0.0) nonzero_.push_back(j);
    }
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double factor = t_(i, q);
      if (factor == 0.0) continue;
      double* row = t_.row(i).data();
      for (Eigen::Index j : nonzero_) row[j] -= factor * prow[j];
    }
    basis_[static_cast<std::size_t>(r)] = q;
  }

  /// Bland's rule: lowest-index improving column, then the lowest-index basic
  /// variable among tied ratios.
  enum class Step { optimal, pivoted, unbounded };
  Step step(Eigen::Index allowed_cols) {
    Eigen::Index q = -1;
    for (Eigen::Index j = 0; j < allowed_cols; ++j) {
      if (t_(m_, j) < -kCostTol) {
        q = j;
        break;
      }
    }
    if (q < 0) return Step::optimal;
    Eigen::Index r = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double aiq = t_(i, q);
      if (aiq <= kPivotTol) continue;
      const double ratio = t_(i, rhs_col()) / aiq;
      if (r < 0) {
        r = i;
        best = ratio;
        continue;
      }
      const double tie = 1e-12 * (1.0 + std::fabs(best));
      if (ratio < best - tie ||
          (ratio <= best + tie && basis_[static_cast<std::size_t>(i)] <
                                      basis_[static_cast<std::size_t>(r)])) {
        r = i;
        best = std::min(best, ratio);
      }
    }
    if (r < 0) return Step::unbounded;
    pivot(r, q);
    return Step::pivoted;
  }

  /// Pivots zero-valued artificials out of the basis where possible.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::fabs(t_(i, j)) > kPivotTol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const long bv = basis_[static_cast<std::size_t>(i)];
      if (bv < n_) x(bv) = t_(i, rhs_col());
    }
    return x;
  }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index n_art_ = 0;
  std::vector<long> basis_;
  std::vector<Eigen::Index> nonzero_;
  Tableau t_;
};

// A zero reduced cost on the negation of a basic column (the split halves of
// a free variable) does not signal an alternative optimum.
bool mirrors_basic_column(const LPProblem& lp, Eigen::Index j, const std::vector<long>& basis) {
  for (long k : basis) {
    if (k >= lp.constraints.cols()) continue;
    if ((lp.constraints.col(j) + lp.constraints.col(k)).cwiseAbs().maxCoeff() == 0.0) {
      return true;
    }
  }
  return false;
}

}  // namespace

SolveReport solve_lp_simplex(const LPProblem& problem) {
  problem.validate();
  SimplexTableau tab(problem);
  const Eigen::Index n = tab.vars();
  const Eigen::Index total = n + tab.artificials();
  const long max_pivots = 50L * (tab.rows() + total) + 1000L;

  SolveReport report;
  long pivots = 0;

  auto run = [&](Eigen::Index allowed) -> SimplexTableau::Step {
    for (;;) {
      if (pivots >= max_pivots) return SimplexTableau::Step::pivoted;
      const auto s = tab.step(allowed);
      if (s != SimplexTableau::Step::pivoted) return s;
      ++pivots;
    }
  };

  if (tab.artificials() > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    phase1.tail(tab.artificials()).setOnes();
    tab.price(phase1);
    const auto s = run(total);
    if (s == SimplexTableau::Step::pivoted) {
      report.status = SolveStatus::iteration_cap;
      report.iterations = static_cast<int>(pivots);
      report.message = "phase 1 pivot cap reached";
      return report;
    }
    const double scale = 1.0 + problem.rhs.lpNorm<Eigen::Infinity>();
    if (tab.value() > 1e-9 * scale) {
      report.status = SolveStatus::infeasible;
      report.iterations = static_cast<int>(pivots);
      report.message = "phase 1 optimum is positive";
      return report;
    }
    tab.expel_artificials();
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  cost.head(n) = problem.objective;
  tab.price(cost);
  const auto s = run(n);
  report.iterations = static_cast<int>(pivots);
  if (s == SimplexTableau::Step::unbounded) {
    report.status = SolveStatus::unbounded;
    report.message = "objective unbounded below";
    return report;
  }
  if (s == SimplexTableau::Step::pivoted) {
    report.status = SolveStatus::iteration_cap;
    report.message = "phase 2 pivot cap reached";
    report.solution = tab.primal();
    report.objective = problem.objective.dot(report.solution);
    return report;
  }

  report.solution = tab.primal();
  report.objective = problem.objective.dot(report.solution);
  report.status = SolveStatus::converged;

  std::vector<bool> in_basis(static_cast<std::size_t>(total), false);
  for (long bv : tab.basis()) in_basis[static_cast<std::size_t>(bv)] = true;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (in_basis[static_cast<std::size_t>(j)]) continue;
    if (std::fabs(tab.reduced_cost(j)) > kCostTol) continue;
    if (mirrors_basic_column(problem, j, tab.basis())) continue;
    report.status = SolveStatus::degenerate_multiple;
    report.message = "non-basic column " + std::to_string(j) + " has zero reduced cost";
    break;
  }
  return report;
}

}  // namespace flexq
