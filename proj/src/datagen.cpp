#include "flexquant/datagen.hpp"

#include <cmath>
#include <numbers>

namespace flexq {

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

std::string_view to_string(NoiseKind k) {
  return k == NoiseKind::pareto ? "pareto" : "normal";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "normal" || name == "hetero-normal") return NoiseKind::hetero_normal;
  if (name == "pareto") return NoiseKind::pareto;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

void SynthConfig::validate() const {
  if (n < 3) throw std::invalid_argument("SynthConfig: n must be >= 3");
  if (!(x_range.hi > x_range.lo)) throw std::invalid_argument("SynthConfig: empty x_range");
  if (kind == NoiseKind::hetero_normal) {
    if (sigma0 < 0.0 || sigma1 < 0.0) throw std::invalid_argument("SynthConfig: sigma must be >= 0");
    if (sigma0 == 0.0 && sigma1 == 0.0) {
      throw std::invalid_argument("SynthConfig: sigma0 and sigma1 cannot both be 0");
    }
  } else {
    if (!(pareto_alpha > 1.0)) throw std::invalid_argument("SynthConfig: pareto_alpha must be > 1");
    if (!(pareto_scale > 0.0)) throw std::invalid_argument("SynthConfig: pareto_scale must be > 0");
  }
}

namespace {

template <typename Noise>
Dataset build(const SynthConfig& cfg, Noise noise) {
  cfg.validate();
  const CounterRng rng(cfg.seed);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto base = static_cast<std::uint64_t>(3 * i);
    const double xi = cfg.x_range.lo + (cfg.x_range.hi - cfg.x_range.lo) * rng.uniform(base);
    x(i, 0) = xi;
    y(i) = cfg.beta0 + cfg.beta1 * xi + noise(rng, base, xi);
  }
  return Dataset(x, std::move(y), {"x"}, "y");
}

}  // namespace

Dataset gen_hetero_normal(const SynthConfig& config) {
  if (config.kind != NoiseKind::hetero_normal) {
    throw std::invalid_argument("gen_hetero_normal: config kind is not hetero-normal");
  }
  return build(config, [&](const CounterRng& rng, std::uint64_t base, double xi) {
    const double u1 = rng.uniform(base + 1);
    const double u2 = rng.uniform(base + 2);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return (config.sigma0 + config.sigma1 * xi) * z;
  });
}

Dataset gen_pareto(const SynthConfig& config) {
  if (config.kind != NoiseKind::pareto) {
    throw std::invalid_argument("gen_pareto: config kind is not pareto");
  }
  return build(config, [&](const CounterRng& rng, std::uint64_t base, double) {
    return config.pareto_scale * std::pow(rng.uniform(base + 1), -1.0 / config.pareto_alpha);
  });
}

Dataset generate(const SynthConfig& config) {
  return config.kind == NoiseKind::pareto ? gen_pareto(config) : gen_hetero_normal(config);
}

}  // namespace flexq
