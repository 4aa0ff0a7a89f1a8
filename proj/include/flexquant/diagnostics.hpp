#pragma once

#include "flexquant/dataset.hpp"
#include "flexquant/optim.hpp"
#include "flexquant/tau_grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexq {

/// Number of observations strictly below the fitted plane at each tau.
struct CountCurve {
  std::vector<double> taus;
  std::vector<int> counts;
  int n = 0;
};

enum class Polarity { positive, negative };

struct Spike {
  std::size_t index;
  Polarity polarity;
  friend bool operator==(const Spike&, const Spike&) = default;
};

struct Pulse {
  std::size_t start;  // covers start and start + 1
  Polarity polarity;
  friend bool operator==(const Pulse&, const Pulse&) = default;
};

struct WideEvent {
  std::size_t start;
  std::size_t width;  // >= 3
  friend bool operator==(const WideEvent&, const WideEvent&) = default;
};

struct EventReport {
  std::vector<Spike> spikes;
  std::vector<Pulse> pulses;
  std::vector<WideEvent> wide_events;

  std::size_t spike_count() const { return spikes.size(); }
  std::size_t pulse_count() const { return pulses.size(); }
  std::size_t wide_count() const { return wide_events.size(); }
  std::size_t wide_coverage() const;
  bool empty() const { return spikes.empty() && pulses.empty() && wide_events.empty(); }
  /// "spikes/pulses".
  std::string summary() const;
};

/// A fitted tau grid: one coefficient row per tau, plus its count curve.
struct GridResult {
  std::string method;
  TauGrid grid;
  Eigen::MatrixXd coefficients;  // grid.size() x p
  std::vector<SolveStatus> statuses;
  std::vector<std::string> failures;  // per-tau diagnostic, empty on success
  CountCurve curve;
  std::optional<EventReport> events;
  bool suppressed = false;
  /// False when suppression left spikes or pulses after its final pass.
  bool suppression_converged = true;
};

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |{i : y_i < x_i' beta}|.
int count_below(const Dataset& data, const Eigen::VectorXd& beta);

CountCurve count_curve(const Dataset& data, const GridResult& result);

/// Splits the curve into a longest nondecreasing subsequence and maximal runs
/// of the remaining indices; runs of width 1, 2 and >= 3 are spikes, pulses and
/// wide events. Among equally long subsequences the one with the lowest values
/// (earliest index on ties) is kept, so isolated highs are classified as
/// positive spikes. Throws std::invalid_argument if the curve has < 3 points.
EventReport detect_events(const std::vector<int>& counts);
inline EventReport detect_events(const CountCurve& curve) { return detect_events(curve.counts); }

/// Replaces the planes of spikes (and of pulses, after converting them to
/// spikes) with neighbour-derived planes, recounts, and repeats for at most
/// three passes. Wide events are left in place.
GridResult suppress_events(const Dataset& data, const GridResult& result,
                           const EventReport& report);

struct Crossing {
  std::size_t lower_index;  // crossing between taus[lower_index] and the next tau
  double tau_lo;
  double tau_hi;
  double x;
};

/// Intersections of adjacent fitted lines that fall inside `x_range`.
/// Requires p == 2 (slope, intercept).
std::vector<Crossing> detect_crossings_1d(const GridResult& result, Interval x_range);

/// Straight line from (tau_min, 0) to (tau_max, n) evaluated on the grid.
std::vector<double> ideal_counts(const CountCurve& curve);

}  // namespace flexq
