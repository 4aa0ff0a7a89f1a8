#include "flexquant/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flexq {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "iteration-cap";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::degenerate_multiple: return "degenerate-multiple";
  }
  return "unknown";
}

void QNConfig::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("QNConfig: grad_tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("QNConfig: max_iter must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("QNConfig: armijo_c must be in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("QNConfig: backtrack_factor must be in (0, 1)");
  }
}

namespace {

constexpr int kMaxBacktracks = 60;
constexpr double kCurvatureGuard = 1e-12;

double evaluate(const ObjectiveFn& f, const Eigen::VectorXd& x, Eigen::VectorXd& g,
                int iter) {
  const double fx = f(x, g);
  if (!std::isfinite(fx) || !g.allFinite()) {
    std::ostringstream os;
    os << "minimize_qn: non-finite objective or gradient at iteration " << iter
       << " (f=" << fx << ", ||x||_inf=" << x.lpNorm<Eigen::Infinity>() << ")";
    throw SolverError(os.str());
  }
  return fx;
}

bool gradient_converged(const Eigen::VectorXd& g, const Eigen::VectorXd& x, double tol) {
  return g.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, x.lpNorm<Eigen::Infinity>());
}

}  // namespace

SolveReport minimize_qn(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                        const QNConfig& config) {
  config.validate();
  const Eigen::Index n = x0.size();
  const double eps = std::numeric_limits<double>::epsilon();

  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(n);
  double fx = evaluate(f, x, g, 0);

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  Eigen::VectorXd x_new(n), g_new(n);
  SolveReport report;
  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    if (gradient_converged(g, x, config.grad_tol)) {
      report.status = SolveStatus::converged;
      break;
    }

    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }

    // Before the first curvature pair exists, keep the first trial step at
    // unit length in the infinity norm.
    double t = scaled ? 1.0 : std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>());
    bool accepted = false;
    double f_new = fx;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      x_new = x + t * dir;
      f_new = evaluate(f, x_new, g_new, iter);
      if (f_new <= fx + config.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the decrease can fall below the resolution of f.
      // Accept a noise-level change when the directional derivative shrinks.
      if (f_new <= fx + 8.0 * eps * std::max(1.0, std::fabs(fx)) &&
          std::fabs(g_new.dot(dir)) < std::fabs(slope)) {
        accepted = true;
        break;
      }
      t *= config.backtrack_factor;
    }
    if (!accepted) {
      if (!hinv.isIdentity()) {
        hinv.setIdentity();
        scaled = false;
        continue;
      }
      report.status = SolveStatus::stalled;
      report.message = "line search failed to make progress";
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > kCurvatureGuard) {
      if (!scaled) {
        hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * y;
      // H+ = (I - rho s y') H (I - rho y s') + rho s s'
      hinv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
    x = x_new;
    g = g_new;
    fx = f_new;
  }
  if (iter == config.max_iter) {
    report.status = gradient_converged(g, x, config.grad_tol) ? SolveStatus::converged
                                                              : SolveStatus::iteration_cap;
  }

  report.solution = x;
  report.objective = fx;
  report.iterations = iter;
  report.grad_norm = g.lpNorm<Eigen::Infinity>();
  return report;
}

}  // namespace flexq
