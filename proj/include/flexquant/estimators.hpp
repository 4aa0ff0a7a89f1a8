#pragma once

#include "flexquant/dataset.hpp"
#include "flexquant/diagnostics.hpp"
#include "flexquant/losses.hpp"
#include "flexquant/optim.hpp"
#include "flexquant/tau_grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flexq {

enum class Method { rq, rrq, srq, smrq, flex };

std::string_view to_string(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);

struct QuantileFit {
  double tau = 0.5;
  Eigen::VectorXd beta;
  Method method = Method::srq;
  SolveReport report;
};

/// Raised when a solver fails to produce a usable fit.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimizes Q_S from `init` (zero vector when absent). Throws FitError when
/// the quasi-Newton solver does not converge.
QuantileFit fit_smooth(const Dataset& data, Tau tau, const FlexCheckParams& params,
                       const std::optional<Eigen::VectorXd>& init = std::nullopt,
                       const QNConfig& config = {});

/// Quantile LP: X(b+ - b-) + u - v = y, min tau sum(u) + (1 - tau) sum(v).
LPProblem quantile_lp(const Dataset& data, Tau tau);

/// Exact minimizer of Q_C via the simplex. The report status is
/// degenerate_multiple when another vertex attains the same objective.
QuantileFit fit_rq_lp(const Dataset& data, Tau tau);

/// Restricted regression quantiles: median fit, median regression of |r| on x,
/// then one scalar c per tau; planes are beta_med + c * gamma.
struct RRQModel {
  Eigen::VectorXd beta_med;
  Eigen::VectorXd gamma;
  Eigen::VectorXd residuals;
  Eigen::VectorXd scales;  // s_i = x_i' gamma
  TauGrid grid;
  std::vector<double> c;
  /// Every |s_i| is numerically zero; all c are 0.
  bool degenerate_scale = false;
  /// Some s_i < 0.
  bool negative_scale = false;

  Eigen::VectorXd plane(std::size_t k) const { return beta_med + c[k] * gamma; }
};

RRQModel fit_rrq(const Dataset& data, const TauGrid& grid);

/// Step-3 objective sum_i rho_tau(r_i - c s_i).
double rrq_scale_objective(const Eigen::VectorXd& residuals, const Eigen::VectorXd& scales,
                           double c, Tau tau);

struct GridOptions {
  FlexCheckParams params = FlexCheckParams::srq();  // only read for Method::flex
  bool warm_start = false;
  QNConfig qn;
};

/// Fits every tau of the grid and records the count curve and event report.
/// Per-tau failures are recorded in `failures` and do not stop the grid.
GridResult fit_grid(const Dataset& data, const TauGrid& grid, Method method,
                    const GridOptions& options = {});

/// The loss parameters a smooth method uses.
FlexCheckParams params_for(Method m, const FlexCheckParams& flex);

}  // namespace flexq
