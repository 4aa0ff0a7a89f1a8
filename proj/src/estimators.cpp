#include "flexquant/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace flexq {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rq: return "rq";
    case Method::rrq: return "rrq";
    case Method::srq: return "srq";
    case Method::smrq: return "smrq";
    case Method::flex: return "flex";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "rq") return Method::rq;
  if (name == "rrq") return Method::rrq;
  if (name == "srq") return Method::srq;
  if (name == "smrq") return Method::smrq;
  if (name == "flex") return Method::flex;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

FlexCheckParams params_for(Method m, const FlexCheckParams& flex) {
  switch (m) {
    case Method::srq: return FlexCheckParams::srq();
    case Method::smrq: return FlexCheckParams::smrq();
    case Method::flex: return flex;
    default: throw std::invalid_argument("method has no smooth loss: " + std::string(to_string(m)));
  }
}

namespace {

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

QuantileFit minimize_smooth(const Dataset& data, Tau tau, const FlexCheckParams& params,
                            const Eigen::VectorXd& init, const QNConfig& config) {
  params.validate();
  check_beta_length(data, init);
  const auto objective = [&](const Eigen::VectorXd& beta, Eigen::VectorXd& grad) {
    grad = grad_total(data, beta, tau, params);
    return loss_total(data, beta, tau, params);
  };
  QuantileFit fit;
  fit.tau = tau;
  fit.report = minimize_qn(objective, init, config);
  fit.beta = fit.report.solution;
  return fit;
}

Eigen::VectorXd zero_init(const Dataset& data) {
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.cols()));
}

std::string describe_failure(const QuantileFit& fit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "tau=%g: solver %s after %d iterations, ||grad||_inf=%.3g",
                fit.tau, std::string(to_string(fit.report.status)).c_str(),
                fit.report.iterations, fit.report.grad_norm);
  std::string msg = buf;
  if (!fit.report.message.empty()) msg += " (" + fit.report.message + ")";
  return msg;
}

}  // namespace

QuantileFit fit_smooth(const Dataset& data, Tau tau, const FlexCheckParams& params,
                       const std::optional<Eigen::VectorXd>& init, const QNConfig& config) {
  QuantileFit fit = minimize_smooth(data, tau, params, init.value_or(zero_init(data)), config);
  fit.method = params == FlexCheckParams::srq()    ? Method::srq
               : params == FlexCheckParams::smrq() ? Method::smrq
                                                   : Method::flex;
  if (fit.report.status != SolveStatus::converged) throw FitError(describe_failure(fit));
  return fit;
}

LPProblem quantile_lp(const Dataset& data, Tau tau) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto p = static_cast<Eigen::Index>(data.cols());
  LPProblem lp;
  lp.constraints.resize(n, 2 * p + 2 * n);
  lp.constraints.leftCols(p) = data.design();
  lp.constraints.middleCols(p, p) = -data.design();
  lp.constraints.middleCols(2 * p, n).setIdentity();
  lp.constraints.rightCols(n) = -Eigen::MatrixXd::Identity(n, n);
  lp.rhs = data.response();
  lp.objective = Eigen::VectorXd::Zero(2 * p + 2 * n);
  lp.objective.segment(2 * p, n).setConstant(tau.value());
  lp.objective.tail(n).setConstant(1.0 - tau.value());
  return lp;
}

QuantileFit fit_rq_lp(const Dataset& data, Tau tau) {
  const auto p = static_cast<Eigen::Index>(data.cols());
  QuantileFit fit;
  fit.tau = tau;
  fit.method = Method::rq;
  fit.report = solve_lp_simplex(quantile_lp(data, tau));
  if (!is_optimal(fit.report.status)) {
    throw FitError("rq: tau=" + format_tau(tau) + ": simplex " +
                   std::string(to_string(fit.report.status)) +
                   (fit.report.message.empty() ? "" : " (" + fit.report.message + ")"));
  }
  fit.beta = fit.report.solution.head(p) - fit.report.solution.segment(p, p);
  return fit;
}

double rrq_scale_objective(const Eigen::VectorXd& residuals, const Eigen::VectorXd& scales,
                           double c, Tau tau) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    sum += check_classic(residuals(i) - c * scales(i), tau);
  }
  return sum;
}

namespace {

// Minimizer of the piecewise-linear step-3 objective over its breakpoints
// r_i / s_i (and 0), preferring the smallest |c| among tied minima.
double rrq_exact_scale(const Eigen::VectorXd& r, const Eigen::VectorXd& s, Tau tau) {
  std::vector<double> candidates;
  candidates.reserve(static_cast<std::size_t>(r.size()) + 1);
  candidates.push_back(0.0);
  for (Eigen::Index i = 0; i < r.size(); ++i) candidates.push_back(r(i) / s(i));

  std::vector<double> values(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    values[k] = rrq_scale_objective(r, s, candidates[k], tau);
    best = std::min(best, values[k]);
  }
  const double level = best + 1e-12 * std::max(1.0, std::fabs(best));
  double pick = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (values[k] <= level && std::fabs(candidates[k]) < std::fabs(pick)) pick = candidates[k];
  }
  return pick;
}

}  // namespace

RRQModel fit_rrq(const Dataset& data, const TauGrid& grid) {
  RRQModel model;
  model.grid = grid;
  const QuantileFit median = fit_rq_lp(data, Tau(0.5));
  model.beta_med = median.beta;
  model.residuals = data.residuals(median.beta);

  const Dataset abs_data(data.design().leftCols(static_cast<Eigen::Index>(data.cols()) - 1),
                         model.residuals.cwiseAbs(),
                         std::vector<std::string>(data.column_names().begin(),
                                                  data.column_names().end() - 1),
                         "|r|");
  model.gamma = fit_rq_lp(abs_data, Tau(0.5)).beta;
  model.scales = data.design() * model.gamma;

  const double max_r = model.residuals.lpNorm<Eigen::Infinity>();
  const double max_s = model.scales.lpNorm<Eigen::Infinity>();
  const double max_y = data.response().lpNorm<Eigen::Infinity>();
  model.degenerate_scale = max_s <= 1e-10 * (1.0 + max_y);
  model.negative_scale = (model.scales.array() < 0.0).any();

  const double min_abs_s = model.scales.cwiseAbs().minCoeff();
  const bool exact = !model.degenerate_scale && min_abs_s > 1e-12 * max_s;
  const double bound = 10.0 * max_r / std::max(max_s, 1e-12);

  model.c.reserve(grid.size());
  for (double t : grid) {
    const Tau tau(t);
    if (model.degenerate_scale) {
      model.c.push_back(0.0);
    } else if (exact) {
      model.c.push_back(rrq_exact_scale(model.residuals, model.scales, tau));
    } else {
      model.c.push_back(minimize_scalar_convex(
          [&](double c) { return rrq_scale_objective(model.residuals, model.scales, c, tau); },
          {-bound, bound}));
    }
  }
  return model;
}

GridResult fit_grid(const Dataset& data, const TauGrid& grid, Method method,
                    const GridOptions& options) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  const auto p = static_cast<Eigen::Index>(data.cols());
  GridResult result;
  result.method = std::string(to_string(method));
  result.grid = grid;
  result.coefficients = Eigen::MatrixXd::Zero(m, p);
  result.statuses.assign(grid.size(), SolveStatus::converged);
  result.failures.assign(grid.size(), std::string());

  switch (method) {
    case Method::rq:
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
          const QuantileFit fit = fit_rq_lp(data, Tau(grid[idx]));
          result.coefficients.row(k) = fit.beta.transpose();
          result.statuses[idx] = fit.report.status;
        } catch (const FitError& e) {
          result.statuses[idx] = SolveStatus::iteration_cap;
          result.failures[idx] = e.what();
        }
      }
      break;
    case Method::rrq: {
      const RRQModel model = fit_rrq(data, grid);
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        result.coefficients.row(k) = model.plane(idx).transpose();
        if (model.degenerate_scale) result.failures[idx] = "rrq: all fitted scales are zero; c set to 0";
      }
      break;
    }
    case Method::srq:
    case Method::smrq:
    case Method::flex: {
      const FlexCheckParams params = params_for(method, options.params);
      Eigen::VectorXd init = zero_init(data);
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        QuantileFit fit;
        try {
          fit = minimize_smooth(data, Tau(grid[idx]), params,
                                options.warm_start ? init : zero_init(data), options.qn);
        } catch (const SolverError& e) {
          result.statuses[idx] = SolveStatus::stalled;
          result.failures[idx] = e.what();
          continue;
        }
        result.coefficients.row(k) = fit.beta.transpose();
        result.statuses[idx] = fit.report.status;
        if (fit.report.status != SolveStatus::converged) result.failures[idx] = describe_failure(fit);
        init = fit.beta;
      }
      break;
    }
  }

  result.curve = count_curve(data, result);
  if (result.curve.counts.size() >= 3) result.events = detect_events(result.curve);
  return result;
}

}  // namespace flexq
