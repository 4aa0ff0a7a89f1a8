#include "flexquant/diagnostics.hpp"

#include <algorithm>
#include <limits>

namespace flexq {

std::size_t EventReport::wide_coverage() const {
  std::size_t total = 0;
  for (const auto& w : wide_events) total += w.width;
  return total;
}

std::string EventReport::summary() const {
  return std::to_string(spike_count()) + "/" + std::to_string(pulse_count());
}

int count_below(const Dataset& data, const Eigen::VectorXd& beta) {
  check_beta_length(data, beta);
  const Eigen::VectorXd fitted = data.design() * beta;
  int count = 0;
  for (Eigen::Index i = 0; i < fitted.size(); ++i) count += data.response()(i) < fitted(i);
  return count;
}

CountCurve count_curve(const Dataset& data, const GridResult& result) {
  CountCurve curve;
  curve.taus = result.grid.values();
  curve.n = static_cast<int>(data.rows());
  curve.counts.reserve(result.grid.size());
  for (Eigen::Index k = 0; k < result.coefficients.rows(); ++k) {
    curve.counts.push_back(count_below(data, result.coefficients.row(k).transpose()));
  }
  return curve;
}

namespace {

// Membership mask of the lowest-valued longest nondecreasing subsequence.
std::vector<bool> monotone_core(const std::vector<int>& v) {
  const std::size_t len = v.size();
  std::vector<std::size_t> tail_len(len, 1);  // longest run starting at i
  for (std::size_t i = len; i-- > 0;) {
    for (std::size_t j = i + 1; j < len; ++j) {
      if (v[j] >= v[i]) tail_len[i] = std::max(tail_len[i], tail_len[j] + 1);
    }
  }
  std::size_t remaining = *std::max_element(tail_len.begin(), tail_len.end());
  std::vector<bool> keep(len, false);
  std::size_t from = 0;
  int floor = std::numeric_limits<int>::min();
  while (remaining > 0) {
    std::size_t pick = len;
    for (std::size_t j = from; j < len; ++j) {
      if (v[j] < floor || tail_len[j] < remaining) continue;
      if (pick == len || v[j] < v[pick]) pick = j;
    }
    keep[pick] = true;
    floor = v[pick];
    from = pick + 1;
    --remaining;
  }
  return keep;
}

}  // namespace

EventReport detect_events(const std::vector<int>& v) {
  if (v.size() < 3) throw std::invalid_argument("detect_events: curve needs at least 3 points");
  const std::vector<bool> keep = monotone_core(v);
  const std::size_t len = v.size();

  EventReport report;
  std::size_t i = 0;
  while (i < len) {
    if (keep[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < len && !keep[j]) ++j;
    const std::size_t width = j - i;
    // Kept neighbours bounding the run (at least one exists).
    const bool has_left = i > 0;
    const bool has_right = j < len;
    const int left = has_left ? v[i - 1] : v[j];
    const int right = has_right ? v[j] : v[i - 1];
    if (width == 1) {
      const bool positive = has_right ? v[i] > right : v[i] > left;
      report.spikes.push_back({i, positive ? Polarity::positive : Polarity::negative});
    } else if (width == 2) {
      const bool positive = v[i] + v[i + 1] >= left + right;
      report.pulses.push_back({i, positive ? Polarity::positive : Polarity::negative});
    } else {
      report.wide_events.push_back({i, width});
    }
    i = j;
  }
  return report;
}

namespace {

int local_violations(int count, std::optional<int> left, std::optional<int> right) {
  return (left && count < *left) + (right && count > *right);
}

void suppress_spike(const Dataset& data, GridResult& g, std::size_t j) {
  const std::size_t len = g.grid.size();
  const auto& counts = g.curve.counts;
  std::optional<int> left, right;
  if (j > 0) left = counts[j - 1];
  if (j + 1 < len) right = counts[j + 1];

  std::vector<Eigen::VectorXd> candidates;
  if (left && right) {
    candidates.push_back(0.5 * (g.coefficients.row(j - 1) + g.coefficients.row(j + 1)).transpose());
  }
  if (left) candidates.push_back(g.coefficients.row(j - 1).transpose());
  if (right) candidates.push_back(g.coefficients.row(j + 1).transpose());

  int best = std::numeric_limits<int>::max();
  std::size_t pick = 0;
  int pick_count = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const int c = count_below(data, candidates[k]);
    const int viol = local_violations(c, left, right);
    if (viol < best) {
      best = viol;
      pick = k;
      pick_count = c;
    }
  }
  g.coefficients.row(j) = candidates[pick].transpose();
  g.curve.counts[j] = pick_count;
}

int distance_to_band(int value, int lo, int hi) {
  return std::max({0, value - hi, lo - value});
}

// Copies an outside neighbour over the worse index of the pulse, which leaves
// the other index as a spike; returns that index.
std::size_t convert_pulse(const Dataset& data, GridResult& g, std::size_t j) {
  const std::size_t len = g.grid.size();
  const auto& v = g.curve.counts;
  const bool has_left = j > 0;
  const bool has_right = j + 2 < len;
  const int a = has_left ? v[j - 1] : v[j + 2];
  const int b = has_right ? v[j + 2] : v[j - 1];
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  const bool first_worse = distance_to_band(v[j], lo, hi) >= distance_to_band(v[j + 1], lo, hi);
  std::size_t target, source;
  if (first_worse) {
    target = j;
    source = has_left ? j - 1 : j + 2;
  } else {
    target = j + 1;
    source = has_right ? j + 2 : j - 1;
  }
  g.coefficients.row(target) = g.coefficients.row(source);
  g.curve.counts[target] = count_below(data, g.coefficients.row(target).transpose());
  return first_worse ? j + 1 : j;
}

constexpr int kMaxSuppressionPasses = 3;

}  // namespace

GridResult suppress_events(const Dataset& data, const GridResult& result,
                           const EventReport& report) {
  GridResult out = result;
  if (!out.method.ends_with("-s")) out.method += "-s";
  out.suppressed = true;
  if (report.spikes.empty() && report.pulses.empty()) {
    out.events = report;
    out.suppression_converged = true;
    return out;
  }

  EventReport current = report;
  for (int pass = 0; pass < kMaxSuppressionPasses; ++pass) {
    if (current.spikes.empty() && current.pulses.empty()) break;
    for (const auto& pulse : current.pulses) {
      suppress_spike(data, out, convert_pulse(data, out, pulse.start));
    }
    for (const auto& spike : current.spikes) suppress_spike(data, out, spike.index);
    out.curve = count_curve(data, out);
    current = detect_events(out.curve);
  }
  out.events = current;
  out.suppression_converged = current.spikes.empty() && current.pulses.empty();
  return out;
}

std::vector<Crossing> detect_crossings_1d(const GridResult& result, Interval x_range) {
  if (result.coefficients.cols() != 2) {
    throw UnsupportedDimension("detect_crossings_1d: requires p = 2 (slope + intercept), got p=" +
                               std::to_string(result.coefficients.cols()));
  }
  const double lo = std::min(x_range.lo, x_range.hi);
  const double hi = std::max(x_range.lo, x_range.hi);
  std::vector<Crossing> out;
  for (Eigen::Index k = 0; k + 1 < result.coefficients.rows(); ++k) {
    const double a1 = result.coefficients(k, 0), b1 = result.coefficients(k, 1);
    const double a2 = result.coefficients(k + 1, 0), b2 = result.coefficients(k + 1, 1);
    if (a1 == a2) continue;
    const double x = (b2 - b1) / (a1 - a2);
    if (x >= lo && x <= hi) {
      const auto idx = static_cast<std::size_t>(k);
      out.push_back({idx, result.grid[idx], result.grid[idx + 1], x});
    }
  }
  return out;
}

std::vector<double> ideal_counts(const CountCurve& curve) {
  std::vector<double> out(curve.taus.size(), 0.0);
  if (curve.taus.size() < 2) return out;
  const double t0 = curve.taus.front();
  const double span = curve.taus.back() - t0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = curve.n * (curve.taus[i] - t0) / span;
  return out;
}

}  // namespace flexq
