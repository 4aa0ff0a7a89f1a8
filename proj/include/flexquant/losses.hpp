#pragma once

#include "flexquant/dataset.hpp"

#include <Eigen/Dense>

#include <string>

namespace flexq {

/// Quantile level, strictly inside (0, 1).
class Tau {
 public:
  explicit Tau(double value);
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

/// Parameters of the flexible smooth check function
///
///   F(r) = log(cosh(c (r - h))) / (2c) + (tau - s) r + v
///
/// c sets the curvature of the rounded kink, h shifts it horizontally,
/// s sets the slope offset and v shifts loss values (never the minimizer).
struct FlexCheckParams {
  double c = 10.0;
  double h = 0.0;
  double s = 0.5;
  double v = 0.0;

  /// c = 10, h = 0, s = 0.5, v = 0.
  static FlexCheckParams srq() { return {10.0, 0.0, 0.5, 0.0}; }
  /// c = 0.7, h = 0, s = 0.5, v = 0.4.
  static FlexCheckParams smrq() { return {0.7, 0.0, 0.5, 0.4}; }

  /// Throws std::invalid_argument unless c > 0, s in [0, 1] and all finite.
  void validate() const;
  std::string describe() const;

  friend bool operator==(const FlexCheckParams&, const FlexCheckParams&) = default;
};

/// log(cosh(z)) without overflow: direct for |z| <= 30, otherwise
/// |z| - log 2 + log1p(exp(-2|z|)).
double log_cosh(double z);

/// Piecewise-linear check function: -(1 - tau) r for r < 0, tau r otherwise.
double check_classic(double r, Tau tau);

double check_smooth(double r, Tau tau, const FlexCheckParams& p);

/// d/dr of check_smooth: tanh(c (r - h)) / 2 + (tau - s).
double check_smooth_deriv(double r, Tau tau, const FlexCheckParams& p);

/// Q_S: sum of check_smooth over the residuals of `beta`.
double loss_total(const Dataset& data, const Eigen::VectorXd& beta, Tau tau,
                  const FlexCheckParams& p);

/// Gradient of loss_total with respect to beta: -sum_i x_i * F'(r_i).
Eigen::VectorXd grad_total(const Dataset& data, const Eigen::VectorXd& beta,
                           Tau tau, const FlexCheckParams& p);

/// Q_C: sum of check_classic over the residuals of `beta`.
double classic_total(const Dataset& data, const Eigen::VectorXd& beta, Tau tau);

}  // namespace flexq
