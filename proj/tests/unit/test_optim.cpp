#include "flexquant/estimators.hpp"
#include "flexquant/optim.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace flexq;

namespace {

ObjectiveFn scalar_fn(std::function<double(double)> f, std::function<double(double)> df) {
  return [f, df](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g(0) = df(x(0));
    return f(x(0));
  };
}

}  // namespace

TEST_CASE("minimize_qn on a 1-D quadratic") {
  const auto f = scalar_fn([](double x) { return (x - 3) * (x - 3); },
                           [](double x) { return 2 * (x - 3); });
  const SolveReport r = minimize_qn(f, Eigen::VectorXd::Zero(1));
  CHECK(r.status == SolveStatus::converged);
  CHECK(std::fabs(r.solution(0) - 3.0) <= 1e-8);
}

TEST_CASE("minimize_qn on a log-cosh bowl") {
  const auto f = scalar_fn([](double x) { return log_cosh(10 * (x - 2)) / 20; },
                           [](double x) { return 0.5 * std::tanh(10 * (x - 2)); });
  const SolveReport r = minimize_qn(f, Eigen::VectorXd::Zero(1));
  CHECK(r.status == SolveStatus::converged);
  CHECK(std::fabs(r.solution(0) - 2.0) <= 1e-6);
}

TEST_CASE("minimize_qn on a separable quadratic") {
  const ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g << 2 * (x(0) - 1), 20 * (x(1) + 2);
    return (x(0) - 1) * (x(0) - 1) + 10 * (x(1) + 2) * (x(1) + 2);
  };
  const SolveReport r = minimize_qn(f, Eigen::VectorXd::Zero(2));
  CHECK(r.status == SolveStatus::converged);
  CHECK(std::fabs(r.solution(0) - 1.0) <= 1e-7);
  CHECK(std::fabs(r.solution(1) + 2.0) <= 1e-7);
}

TEST_CASE("minimize_qn errors and caps") {
  const ObjectiveFn nan_fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Ones(x.size());
    return std::nan("");
  };
  CHECK_THROWS_AS(minimize_qn(nan_fn, Eigen::VectorXd::Zero(1)), SolverError);

  QNConfig bad;
  bad.grad_tol = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  const ObjectiveFn rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g << -400 * x(0) * (x(1) - x(0) * x(0)) - 2 * (1 - x(0)), 200 * (x(1) - x(0) * x(0));
    return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
  };
  QNConfig capped;
  capped.max_iter = 3;
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  CHECK(minimize_qn(rosen, x0, capped).status == SolveStatus::iteration_cap);
  const SolveReport full = minimize_qn(rosen, x0);
  CHECK(full.status == SolveStatus::converged);
  CHECK(std::fabs(full.solution(0) - 1.0) <= 1e-6);
}

TEST_CASE("minimize_scalar_convex examples") {
  CHECK(std::fabs(minimize_scalar_convex([](double c) { return std::fabs(c - 1); }, {-10, 10}) -
                  1.0) <= 1e-8);
  const auto median_obj = [](double c) {
    double s = 0;
    for (double r : {-1.0, 0.0, 1.0}) s += check_classic(r - c, Tau(0.5));
    return s;
  };
  CHECK(std::fabs(minimize_scalar_convex(median_obj, {-10, 10})) <= 1e-8);
  CHECK(std::fabs(minimize_scalar_convex([](double c) { return (c + 4) * (c + 4); }, {-10, 10}) +
                  4.0) <= 1e-8);
}

TEST_CASE("minimize_scalar_convex returns the flat point nearest zero") {
  // Flat on [1, 3].
  const auto f = [](double c) { return std::max({0.0, 1.0 - c, c - 3.0}); };
  CHECK(std::fabs(minimize_scalar_convex(f, {-10, 10}) - 1.0) <= 1e-8);
  // Flat region containing zero.
  const auto g = [](double c) { return std::max({0.0, -2.0 - c, c - 2.0}); };
  CHECK(minimize_scalar_convex(g, {-10, 10}) == 0.0);
  CHECK_THROWS_AS(minimize_scalar_convex(f, {-INFINITY, 1}), std::invalid_argument);
}

TEST_CASE("simplex: small LP") {
  LPProblem lp;
  lp.objective = Eigen::Vector2d(-1, 0);
  lp.constraints = Eigen::MatrixXd::Ones(1, 2);
  lp.rhs = Eigen::VectorXd::Ones(1);
  const SolveReport r = solve_lp_simplex(lp);
  CHECK(is_optimal(r.status));
  CHECK(r.solution(0) == doctest::Approx(1.0));
  CHECK(r.solution(1) == doctest::Approx(0.0));
  CHECK(r.objective == doctest::Approx(-1.0));
}

TEST_CASE("simplex: infeasible, unbounded and malformed problems") {
  LPProblem infeasible;
  infeasible.objective = Eigen::Vector2d(1, 1);
  infeasible.constraints.resize(2, 2);
  infeasible.constraints << 1, 1, 1, 1;
  infeasible.rhs = Eigen::Vector2d(1, 2);
  CHECK(solve_lp_simplex(infeasible).status == SolveStatus::infeasible);

  LPProblem unbounded;
  unbounded.objective = Eigen::Vector2d(-1, 0);
  unbounded.constraints.resize(1, 2);
  unbounded.constraints << 1, -1;
  unbounded.rhs = Eigen::VectorXd::Ones(1);
  CHECK(solve_lp_simplex(unbounded).status == SolveStatus::unbounded);

  LPProblem bad = unbounded;
  bad.rhs = Eigen::Vector2d(1, 1);
  CHECK_THROWS_AS(solve_lp_simplex(bad), std::invalid_argument);
}

TEST_CASE("simplex: tied optimum is flagged") {
  LPProblem lp;
  lp.objective = Eigen::Vector2d(1, 1);
  lp.constraints = Eigen::MatrixXd::Ones(1, 2);
  lp.rhs = Eigen::VectorXd::Ones(1);
  CHECK(solve_lp_simplex(lp).status == SolveStatus::degenerate_multiple);
}

TEST_CASE("quantile LP on intercept-only data") {
  const auto d = Dataset::intercept_only({1.0, 2.0, 4.0});
  CHECK(fit_rq_lp(d, Tau(0.5)).beta(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_rq_lp(d, Tau(0.75)).beta(0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("property: solver output is deterministic") {
  std::mt19937_64 rng(5);
  const auto data = testing::random_dataset(rng, 40, 3);
  const ObjectiveFn f = [&](const Eigen::VectorXd& b, Eigen::VectorXd& g) {
    g = grad_total(data, b, Tau(0.3), FlexCheckParams::srq());
    return loss_total(data, b, Tau(0.3), FlexCheckParams::srq());
  };
  CHECK(minimize_qn(f, Eigen::VectorXd::Zero(4)) == minimize_qn(f, Eigen::VectorXd::Zero(4)));
  const LPProblem lp = quantile_lp(data, Tau(0.3));
  CHECK(solve_lp_simplex(lp) == solve_lp_simplex(lp));
}

TEST_CASE("property: quasi-Newton reaches a small gradient on loss_total") {
  std::mt19937_64 rng(17);
  for (const auto [n, k] : {std::pair{30, 1}, {120, 4}, {500, 15}}) {
    const auto data = testing::random_dataset(rng, n, k);
    for (double t : {0.1, 0.5, 0.9}) {
      const QuantileFit fit = fit_smooth(data, Tau(t), FlexCheckParams::srq());
      CHECK(fit.report.status == SolveStatus::converged);
      CHECK(grad_total(data, fit.beta, Tau(t), FlexCheckParams::srq()).lpNorm<Eigen::Infinity>() <=
            1e-6);
    }
  }
}

TEST_CASE("property: scalar minimizer agrees with quasi-Newton in 1-D") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> loc(-5, 5), curv(0.3, 8);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = loc(rng), c = curv(rng), lin = loc(rng) / 20;
    const auto f = [=](double x) { return log_cosh(c * (x - a)) / c + lin * x + 0.1 * x * x; };
    const auto df = [=](double x) { return std::tanh(c * (x - a)) + lin + 0.2 * x; };
    const double xs = minimize_scalar_convex(f, {-20, 20});
    const SolveReport qn = minimize_qn(scalar_fn(f, df), Eigen::VectorXd::Zero(1));
    CHECK(std::fabs(xs - qn.solution(0)) <= 1e-6);
  }
}
