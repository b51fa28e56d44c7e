#pragma once
// Discrete-generation Wright-Fisher sampler: binomial (K = 1) or
// multinomial (K >= 2) resampling of 2N gene copies each generation.

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "wfmgf/multi_index.hpp"

namespace wfmgf::montecarlo {

/// Each replicate runs on its own mt19937_64 seeded with
/// splitmix64(seed + replicate), so output does not depend on threads.
inline constexpr std::string_view kRngName = "mt19937_64/splitmix64-substreams";
inline constexpr int kMaxOrder = 6;

struct McConfig {
  int two_n = 200;
  /// Initial counts of alleles 1..K; the last allele takes the remainder.
  std::vector<int> initial_counts{100};
  int generations = 200;
  int replicates = 10000;
  std::uint64_t seed = 1;
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 0;

  int dimension() const noexcept { return static_cast<int>(initial_counts.size()); }
  void validate() const;
};

/// Counts of every replicate at each requested generation.
struct SampledPaths {
  McConfig config;
  std::vector<int> generations;
  /// counts[g][r * K + u]
  std::vector<std::vector<int>> counts;

  double frequency(std::size_t g, int replicate, int u) const;
};

/// Sample generations must be non-negative; they need not be sorted.
SampledPaths simulate(const McConfig& cfg, const std::vector<int>& sample_generations);

struct MomentRow {
  int generation;
  double time;  ///< diffusion time g / 2N
  MultiIndex order;
  double mean;
  double std_error;
};

std::vector<MomentRow> empirical_moments(const SampledPaths& paths,
                                         const std::vector<MultiIndex>& orders);

struct FixationRow {
  int generation;
  double time;
  double fixed_fraction;  ///< allele 1 at count 2N
  double lost_fraction;   ///< allele 1 at count 0
  double fixed_std_error;
  double lost_std_error;
};

std::vector<FixationRow> empirical_fixation(const SampledPaths& paths);

struct HeterozygosityRow {
  int generation;
  double time;
  double mean;  ///< 1 - sum over all K+1 alleles of x_u^2
  double std_error;
};

std::vector<HeterozygosityRow> empirical_heterozygosity(const SampledPaths& paths);

std::vector<MomentRow> simulate_empirical_moments(const McConfig& cfg,
                                                  const std::vector<MultiIndex>& orders,
                                                  const std::vector<int>& sample_generations);
std::vector<FixationRow> empirical_fixation(const McConfig& cfg,
                                            const std::vector<int>& sample_generations);

}  // namespace wfmgf::montecarlo
