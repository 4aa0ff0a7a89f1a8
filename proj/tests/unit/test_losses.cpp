#include "flexquant/losses.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace flexq;
using doctest::Approx;

namespace {

const FlexCheckParams kSrq = FlexCheckParams::srq();
const FlexCheckParams kSmrq = FlexCheckParams::smrq();

// Reference values from a 50-digit evaluation.
constexpr double kSrqAt1Tau075 = 0.71534264107506;
constexpr double kSmrqAt2Tau05 = 0.94706117552002;
constexpr double kHalfTanh1 = 0.38079707797788;
constexpr double kSrqAt1Tau05 = 0.46534264107506;
constexpr double kSumY124 = 1.43068528204706;

}  // namespace

TEST_CASE("tau must be inside the open unit interval") {
  CHECK_THROWS_AS(Tau(0.0), std::domain_error);
  CHECK_THROWS_AS(Tau(1.0), std::domain_error);
  CHECK_THROWS_AS(Tau(-0.1), std::domain_error);
  CHECK_THROWS_AS(Tau(std::nan("")), std::domain_error);
  CHECK(Tau(0.3).value() == 0.3);
}

TEST_CASE("presets and parameter validation") {
  CHECK(kSrq == FlexCheckParams{10.0, 0.0, 0.5, 0.0});
  CHECK(kSmrq == FlexCheckParams{0.7, 0.0, 0.5, 0.4});
  CHECK_THROWS_AS((FlexCheckParams{0.0, 0.0, 0.5, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((FlexCheckParams{-1.0, 0.0, 0.5, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((FlexCheckParams{1.0, 0.0, 1.5, 0.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW(kSmrq.validate());
}

TEST_CASE("classic check function") {
  CHECK(check_classic(1.0, Tau(0.75)) == Approx(0.75));
  CHECK(check_classic(0.0, Tau(0.3)) == 0.0);
  CHECK(check_classic(-2.0, Tau(0.75)) == Approx(0.5));
  CHECK_THROWS_AS(check_classic(std::numeric_limits<double>::infinity(), Tau(0.5)),
                  std::domain_error);
}

TEST_CASE("smooth check function values") {
  CHECK(check_smooth(0.0, Tau(0.5), kSrq) == 0.0);
  CHECK(check_smooth(1.0, Tau(0.75), kSrq) == Approx(kSrqAt1Tau075).epsilon(1e-12));
  CHECK(check_smooth(0.0, Tau(0.5), kSmrq) == Approx(0.4).epsilon(1e-15));
  CHECK(check_smooth(2.0, Tau(0.5), kSmrq) == Approx(kSmrqAt2Tau05).epsilon(1e-12));
  CHECK_THROWS_AS(check_smooth(std::nan(""), Tau(0.5), kSrq), std::domain_error);
}

TEST_CASE("smooth derivative values") {
  CHECK(check_smooth_deriv(0.0, Tau(0.5), kSrq) == 0.0);
  CHECK(check_smooth_deriv(0.0, Tau(0.7), kSrq) == Approx(0.2).epsilon(1e-14));
  CHECK(check_smooth_deriv(0.1, Tau(0.5), kSrq) == Approx(kHalfTanh1).epsilon(1e-12));
}

TEST_CASE("log_cosh is stable for large arguments") {
  CHECK(log_cosh(0.0) == 0.0);
  CHECK(log_cosh(800.0) == Approx(800.0 - std::numbers::ln2).epsilon(1e-15));
  CHECK(log_cosh(-800.0) == log_cosh(800.0));
  // Both branches agree at the switch point.
  CHECK(log_cosh(30.0) == Approx(log_cosh(std::nextafter(30.0, 31.0))).epsilon(1e-14));
  const double big = check_smooth(1e6, Tau(0.5), kSrq);
  CHECK(std::isfinite(big));
  CHECK(std::fabs(big - (0.5e6 - std::numbers::ln2 / 20.0)) <= 1e-9);
}

TEST_CASE("loss_total") {
  const auto zero = Dataset::intercept_only({0.0});
  CHECK(loss_total(zero, Eigen::VectorXd::Zero(1), Tau(0.5), kSrq) == 0.0);

  const auto pm = Dataset::intercept_only({1.0, -1.0});
  CHECK(loss_total(pm, Eigen::VectorXd::Zero(1), Tau(0.5), kSrq) ==
        Approx(2.0 * kSrqAt1Tau05).epsilon(1e-12));

  const auto d = Dataset::intercept_only({1.0, 2.0, 4.0});
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 2.0);
  const double componentwise = check_smooth(-1.0, Tau(0.5), kSrq) +
                               check_smooth(0.0, Tau(0.5), kSrq) +
                               check_smooth(2.0, Tau(0.5), kSrq);
  CHECK(loss_total(d, b, Tau(0.5), kSrq) == Approx(componentwise).epsilon(1e-15));
  CHECK(loss_total(d, b, Tau(0.5), kSrq) == Approx(kSumY124).epsilon(1e-12));

  CHECK_THROWS_AS(loss_total(d, Eigen::VectorXd::Zero(2), Tau(0.5), kSrq), std::invalid_argument);
}

TEST_CASE("grad_total at zero residual") {
  const auto zero = Dataset::intercept_only({0.0});
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(1);
  CHECK(grad_total(zero, b, Tau(0.5), kSrq)(0) == 0.0);
  CHECK(grad_total(zero, b, Tau(0.75), kSrq)(0) == Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("property: smooth and classic losses differ by at most ln2/(2c)") {
  const double bound = std::numbers::ln2 / 20.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(-50.0, 50.0), t(0.01, 0.99);
  for (int k = 0; k < 5000; ++k) {
    const double rv = r(rng);
    const Tau tau(t(rng));
    CHECK(std::fabs(check_smooth(rv, tau, kSrq) - check_classic(rv, tau)) <= bound + 1e-12);
  }
  CHECK(std::fabs(check_smooth(40.0, Tau(0.3), kSrq) - check_classic(40.0, Tau(0.3))) ==
        Approx(bound).epsilon(1e-12));
}

TEST_CASE("property: derivative matches a numerical derivative") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(-5.0, 5.0), t(0.01, 0.99), c(0.2, 20.0),
      h(-1.0, 1.0), s(0.0, 1.0), v(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const FlexCheckParams p{c(rng), h(rng), s(rng), v(rng)};
    const double rv = r(rng);
    const Tau tau(t(rng));
    // Richardson-extrapolated central difference.
    const auto cd = [&](double e) {
      return (check_smooth(rv + e, tau, p) - check_smooth(rv - e, tau, p)) / (2.0 * e);
    };
    const double e = 1e-3;
    const double numeric = (4.0 * cd(e / 2.0) - cd(e)) / 3.0;
    CHECK(std::fabs(numeric - check_smooth_deriv(rv, tau, p)) <= 1e-8);
  }
}

TEST_CASE("property: second derivative is positive and slopes tend to tau and tau - 1") {
  const Tau tau(0.3);
  for (double rv = -3.0; rv <= 3.0; rv += 0.25) {
    CHECK(check_smooth_deriv(rv + 1e-3, tau, kSmrq) > check_smooth_deriv(rv, tau, kSmrq));
  }
  CHECK(check_smooth_deriv(100.0, tau, kSrq) == Approx(0.3).epsilon(1e-14));
  CHECK(check_smooth_deriv(-100.0, tau, kSrq) == Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("property: v shifts values but not derivatives") {
  const FlexCheckParams a{2.0, 0.1, 0.5, 0.0}, b{2.0, 0.1, 0.5, 0.9};
  for (double rv = -2.0; rv <= 2.0; rv += 0.5) {
    CHECK(check_smooth(rv, Tau(0.4), b) - check_smooth(rv, Tau(0.4), a) == Approx(0.9));
    CHECK(check_smooth_deriv(rv, Tau(0.4), b) == check_smooth_deriv(rv, Tau(0.4), a));
  }
}

TEST_CASE("property: grad_total matches central finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> nd(8, 50), kd(0, 5);
  std::uniform_real_distribution<double> t(0.05, 0.95), c(0.5, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = kd(rng);
    const auto data = testing::random_dataset(rng, std::max(nd(rng), k + 2), k);
    const Eigen::VectorXd beta = testing::random_vector(rng, k + 1);
    const Tau tau(t(rng));
    const FlexCheckParams p{c(rng), 0.0, 0.5, 0.1};
    const Eigen::VectorXd g = grad_total(data, beta, tau, p);
    for (Eigen::Index j = 0; j <= k; ++j) {
      Eigen::VectorXd hi = beta, lo = beta;
      hi(j) += 1e-6;
      lo(j) -= 1e-6;
      const double fd = (loss_total(data, hi, tau, p) - loss_total(data, lo, tau, p)) / 2e-6;
      CHECK(std::fabs(fd - g(j)) <= 1e-6 * std::max(1.0, std::fabs(g(j))) + 1e-6);
    }
  }
}
