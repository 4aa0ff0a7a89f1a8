#include "flexquant/losses.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace flexq {

namespace {

void require_finite(double r) {
  if (!std::isfinite(r)) throw std::domain_error("residual is not finite");
}

}  // namespace

Tau::Tau(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::domain_error("tau must lie in (0, 1), got " + std::to_string(value));
  }
}

void FlexCheckParams::validate() const {
  if (!std::isfinite(c) || !std::isfinite(h) || !std::isfinite(s) || !std::isfinite(v)) {
    throw std::invalid_argument("flex params must be finite");
  }
  if (!(c > 0.0)) throw std::invalid_argument("flex param c must be > 0");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("flex param s must be in [0, 1]");
}

std::string FlexCheckParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "c=" << c << ",h=" << h << ",s=" << s << ",v=" << v;
  return os.str();
}

double log_cosh(double z) {
  const double a = std::fabs(z);
  if (a > 30.0) return a - std::numbers::ln2 + std::log1p(std::exp(-2.0 * a));
  return std::log(std::cosh(z));
}

double check_classic(double r, Tau tau) {
  require_finite(r);
  return r < 0.0 ? -(1.0 - tau.value()) * r : tau.value() * r;
}

double check_smooth(double r, Tau tau, const FlexCheckParams& p) {
  require_finite(r);
  return log_cosh(p.c * (r - p.h)) / (2.0 * p.c) + (tau.value() - p.s) * r + p.v;
}

double check_smooth_deriv(double r, Tau tau, const FlexCheckParams& p) {
  require_finite(r);
  return 0.5 * std::tanh(p.c * (r - p.h)) + (tau.value() - p.s);
}

double loss_total(const Dataset& data, const Eigen::VectorXd& beta, Tau tau,
                  const FlexCheckParams& p) {
  const Eigen::VectorXd r = data.residuals(beta);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) sum += check_smooth(r(i), tau, p);
  return sum;
}

Eigen::VectorXd grad_total(const Dataset& data, const Eigen::VectorXd& beta,
                           Tau tau, const FlexCheckParams& p) {
  const Eigen::VectorXd r = data.residuals(beta);
  Eigen::VectorXd d(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) d(i) = check_smooth_deriv(r(i), tau, p);
  return -(data.design().transpose() * d);
}

double classic_total(const Dataset& data, const Eigen::VectorXd& beta, Tau tau) {
  const Eigen::VectorXd r = data.residuals(beta);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) sum += check_classic(r(i), tau);
  return sum;
}

}  // namespace flexq
