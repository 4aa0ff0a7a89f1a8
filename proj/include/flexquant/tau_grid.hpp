#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace flexq {

/// Strictly increasing quantile levels inside (0, 1).
class TauGrid {
 public:
  TauGrid() = default;
  explicit TauGrid(std::vector<double> taus);

  /// start, start + step, ... up to end inclusive; values outside (0, 1) are
  /// dropped, so (0, 1, 0.01) yields 0.01 .. 0.99.
  static TauGrid from_step(double start, double end, double step);
  /// tau_i = i / (m + 1), i = 1 .. m.
  static TauGrid from_count(std::size_t m);
  /// Parses "start,end,step" or a bare count.
  static TauGrid parse(const std::string& text);

  const std::vector<double>& values() const { return taus_; }
  std::size_t size() const { return taus_.size(); }
  double operator[](std::size_t i) const { return taus_[i]; }
  auto begin() const { return taus_.begin(); }
  auto end() const { return taus_.end(); }

 private:
  std::vector<double> taus_;
};

}  // namespace flexq
