#include "flexquant/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexq {

namespace {

constexpr double kInvPhi = 0.61803398874989484820;  // (sqrt(5) - 1) / 2

}  // namespace

double minimize_scalar_convex(const std::function<double(double)>& f, Interval bracket) {
  if (!std::isfinite(bracket.lo) || !std::isfinite(bracket.hi)) {
    throw std::invalid_argument("minimize_scalar_convex: bracket endpoints must be finite");
  }
  double a = std::min(bracket.lo, bracket.hi);
  double b = std::max(bracket.lo, bracket.hi);
  const double tol = 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});

  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = f(mid);

  // Flat minimum: walk toward zero while f stays at the minimum level.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(fmid);
  const double level = fmid + slack;
  const double target = std::clamp(0.0, std::min(bracket.lo, bracket.hi),
                                   std::max(bracket.lo, bracket.hi));
  if (target == mid) return mid;
  if (f(target) <= level) return target;
  double inside = mid;
  double outside = target;
  while (std::fabs(outside - inside) > tol) {
    const double m = 0.5 * (inside + outside);
    if (f(m) <= level) {
      inside = m;
    } else {
      outside = m;
    }
  }
  return inside;
}

}  // namespace flexq
