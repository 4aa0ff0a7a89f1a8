#include "flexquant/tau_grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flexq {

TauGrid::TauGrid(std::vector<double> taus) : taus_(std::move(taus)) {
  for (std::size_t i = 0; i < taus_.size(); ++i) {
    const double t = taus_[i];
    if (!(t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("tau grid value outside (0, 1): " + std::to_string(t));
    }
    if (i > 0 && !(t > taus_[i - 1])) {
      throw std::invalid_argument("tau grid must be strictly increasing");
    }
  }
}

TauGrid TauGrid::from_step(double start, double end, double step) {
  if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(step) || !(step > 0.0)) {
    throw std::invalid_argument("tau grid: need finite start/end and step > 0");
  }
  if (end < start) throw std::invalid_argument("tau grid: end < start");
  const auto last = static_cast<long>(std::floor((end - start) / step + 1e-9));
  std::vector<double> taus;
  for (long k = 0; k <= last; ++k) {
    // Snap to 12 decimals so 0.01 * 7 prints as 0.07.
    const double t = std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12;
    if (t > 0.0 && t < 1.0) taus.push_back(t);
  }
  if (taus.empty()) throw std::invalid_argument("tau grid: no values inside (0, 1)");
  return TauGrid(std::move(taus));
}

TauGrid TauGrid::from_count(std::size_t m) {
  if (m == 0) throw std::invalid_argument("tau grid: count must be >= 1");
  std::vector<double> taus(m);
  for (std::size_t i = 1; i <= m; ++i) {
    taus[i - 1] = static_cast<double>(i) / static_cast<double>(m + 1);
  }
  return TauGrid(std::move(taus));
}

TauGrid TauGrid::parse(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("tau grid: cannot parse '" + text + "'");
    }
    if (used != item.size()) throw std::invalid_argument("tau grid: cannot parse '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() == 3) return from_step(parts[0], parts[1], parts[2]);
  if (parts.size() == 1 && parts[0] >= 1.0 && parts[0] == std::floor(parts[0])) {
    return from_count(static_cast<std::size_t>(parts[0]));
  }
  throw std::invalid_argument("tau grid: expected 'start,end,step' or a count, got '" + text + "'");
}

}  // namespace flexq
