#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace flexq {

/// Design matrix plus response. The intercept is stored as an all-ones column
/// appended after the predictors, so it is always the last coefficient.
class Dataset {
 public:
  /// Builds a dataset from predictor columns (n x k) and appends the intercept
  /// column. Throws std::invalid_argument on shape or finiteness violations.
  Dataset(const Eigen::MatrixXd& predictors, Eigen::VectorXd response,
          std::vector<std::string> predictor_names = {},
          std::string response_name = "y");

  /// Intercept-only dataset (p = 1).
  static Dataset intercept_only(const std::vector<double>& response);

  const Eigen::MatrixXd& design() const { return x_; }
  const Eigen::VectorXd& response() const { return y_; }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::string& response_name() const { return response_name_; }

  std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t intercept_column() const { return cols() - 1; }

  /// y - X * beta. Throws std::invalid_argument on length mismatch.
  Eigen::VectorXd residuals(const Eigen::VectorXd& beta) const;

  /// Row-count, column-count and FNV-1a hash over the raw doubles.
  std::string fingerprint() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<std::string> names_;
  std::string response_name_;
};

void check_beta_length(const Dataset& data, const Eigen::VectorXd& beta);

}  // namespace flexq
