#pragma once

#include "flexquant/dataset.hpp"
#include "flexquant/optim.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexq {

/// Counter-based generator: draw k of stream `seed` is the SplitMix64
/// finalizer applied to seed + (k + 1) * 0x9E3779B97F4A7C15. Any draw can be
/// recomputed from (seed, k) alone.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1): ((bits >> 11) + 0.5) * 2^-53.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

enum class NoiseKind { hetero_normal, pareto };

std::string_view to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view name);  // "normal"/"hetero-normal" or "pareto"

struct SynthConfig {
  std::size_t n = 100;
  std::uint64_t seed = 1;
  NoiseKind kind = NoiseKind::hetero_normal;
  Interval x_range{0.0, 10.0};
  double beta0 = 1.0;
  double beta1 = 2.0;
  double sigma0 = 0.5;
  double sigma1 = 0.3;
  double pareto_alpha = 2.5;
  double pareto_scale = 1.0;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Observation i uses draws 3i (x), 3i + 1 and 3i + 2 (noise).
/// x_i = lo + (hi - lo) U; noise is (sigma0 + sigma1 x_i) z_i with z_i from the
/// cosine branch of Box-Muller on the two noise draws.
Dataset gen_hetero_normal(const SynthConfig& config);

/// Same x draws; noise e_i = scale * U^(-1/alpha) from draw 3i + 1, so every
/// e_i >= scale.
Dataset gen_pareto(const SynthConfig& config);

/// Dispatches on config.kind.
Dataset generate(const SynthConfig& config);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvSchema {
  std::string response;
  /// Predictor columns to use; empty means every non-response column.
  std::vector<std::string> predictors;
  char delimiter = ',';
};

/// Reads a header row plus numeric rows; blank lines are skipped. Row numbers
/// in error messages count data rows from 1.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes predictors then the response, 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace flexq
