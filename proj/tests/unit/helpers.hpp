#pragma once

#include "flexquant/dataset.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <random>
#include <string>

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(FLEXQUANT_DATA_DIR) / name;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("flexquant_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline flexq::Dataset random_dataset(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double lin = 1.0;
    for (int j = 0; j < k; ++j) {
      x(i, j) = 2.0 * z(rng);
      lin += 0.5 * (j + 1) * x(i, j);
    }
    y(i) = lin + z(rng);
  }
  return flexq::Dataset(x, y);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index p, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Eigen::VectorXd v(p);
  for (Eigen::Index j = 0; j < p; ++j) v(j) = z(rng);
  return v;
}

}  // namespace testing
