#include "flexquant/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace flexq {

Dataset::Dataset(const Eigen::MatrixXd& predictors, Eigen::VectorXd response,
                 std::vector<std::string> predictor_names,
                 std::string response_name)
    : y_(std::move(response)), response_name_(std::move(response_name)) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index k = predictors.cols();
  if (n != y_.size()) {
    throw std::invalid_argument("dataset: predictor rows (" + std::to_string(n) +
                                ") != response length (" +
                                std::to_string(y_.size()) + ")");
  }
  if (n < k + 1) {
    throw std::invalid_argument("dataset: need n >= p (n=" + std::to_string(n) +
                                ", p=" + std::to_string(k + 1) + ")");
  }
  if (!predictors.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("dataset: non-finite entry");
  }
  x_.resize(n, k + 1);
  x_.leftCols(k) = predictors;
  x_.col(k).setOnes();

  if (predictor_names.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) predictor_names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(predictor_names.size()) != k) {
    throw std::invalid_argument("dataset: predictor name count mismatch");
  }
  names_ = std::move(predictor_names);
  names_.push_back("(Intercept)");
}

Dataset Dataset::intercept_only(const std::vector<double>& response) {
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
      response.data(), static_cast<Eigen::Index>(response.size()));
  const Eigen::Index n = y.size();
  return Dataset(Eigen::MatrixXd(n, 0), std::move(y));
}

void check_beta_length(const Dataset& data, const Eigen::VectorXd& beta) {
  if (static_cast<std::size_t>(beta.size()) != data.cols()) {
    throw std::invalid_argument("coefficient length " + std::to_string(beta.size()) +
                                " does not match p=" + std::to_string(data.cols()));
  }
}

Eigen::VectorXd Dataset::residuals(const Eigen::VectorXd& beta) const {
  check_beta_length(*this, beta);
  return y_ - x_ * beta;
}

std::string Dataset::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double d) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &d, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    for (Eigen::Index j = 0; j < x_.cols(); ++j) mix(x_(i, j));
    mix(y_(i));
  }
  std::ostringstream os;
  os << rows() << "x" << cols() << ":fnv1a64=" << std::hex << h;
  return os.str();
}

}  // namespace flexq
