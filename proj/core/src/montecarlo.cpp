#include "wfmgf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <thread>

#include "wfmgf/error.hpp"

namespace wfmgf::montecarlo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One generation of multinomial resampling, done as a chain of conditional
// binomials over alleles 1..K (the remainder is allele K+1).
void resample(std::mt19937_64& rng, int two_n, std::span<int> counts) {
  int remaining = two_n;
  int mass = two_n;  // copies not yet assigned in the parent generation
  for (int& c : counts) {
    if (remaining == 0 || mass == 0) {
      c = 0;
      continue;
    }
    const int parent = c;
    if (parent == 0) continue;
    if (parent == mass) {
      c = remaining;
      remaining = 0;
      mass = 0;
      continue;
    }
    std::binomial_distribution<int> draw(remaining, static_cast<double>(parent) / mass);
    c = draw(rng);
    remaining -= c;
    mass -= parent;
  }
}

struct Welford {
  double mean = 0;
  double m2 = 0;
  long n = 0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  double std_error() const {
    if (n < 2) return 0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

}  // namespace

void McConfig::validate() const {
  if (two_n < 1) throw InvalidArgument("2N must be >= 1");
  if (initial_counts.empty()) throw InvalidArgument("initial counts must be non-empty");
  long total = 0;
  for (int c : initial_counts) {
    if (c < 0) throw InvalidArgument("initial counts must be >= 0");
    total += c;
  }
  if (total > two_n) throw InvalidArgument("initial counts sum past 2N");
  if (generations < 0) throw InvalidArgument("generations must be >= 0");
  if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

double SampledPaths::frequency(std::size_t g, int replicate, int u) const {
  const int k = config.dimension();
  return static_cast<double>(counts[g][static_cast<std::size_t>(replicate) * k + u]) /
         config.two_n;
}

SampledPaths simulate(const McConfig& cfg, const std::vector<int>& sample_generations) {
  cfg.validate();
  for (int g : sample_generations) {
    if (g < 0) throw InvalidArgument("sample generations must be >= 0");
  }
  const int k = cfg.dimension();
  SampledPaths out;
  out.config = cfg;
  out.generations = sample_generations;
  out.counts.assign(sample_generations.size(),
                    std::vector<int>(static_cast<std::size_t>(cfg.replicates) * k));
  const int horizon = sample_generations.empty()
                          ? 0
                          : *std::max_element(sample_generations.begin(), sample_generations.end());

  // Sorted sample slots so each path is walked once.
  std::vector<std::size_t> slots(sample_generations.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  std::stable_sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
    return sample_generations[a] < sample_generations[b];
  });

  auto run_replicate = [&](int r) {
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(r)));
    std::vector<int> state = cfg.initial_counts;
    std::size_t next = 0;
    for (int g = 0;; ++g) {
      while (next < slots.size() && sample_generations[slots[next]] == g) {
        std::copy(state.begin(), state.end(),
                  out.counts[slots[next]].begin() + static_cast<std::ptrdiff_t>(r) * k);
        ++next;
      }
      if (g >= horizon) break;
      resample(rng, cfg.two_n, state);
    }
  };

  int threads = cfg.threads;
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.replicates);
  if (threads <= 1) {
    for (int r = 0; r < cfg.replicates; ++r) run_replicate(r);
    return out;
  }
  {
    // Each worker writes only its own replicate columns.
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < cfg.replicates; r += threads) run_replicate(r);
      });
    }
  }
  return out;
}

std::vector<MomentRow> empirical_moments(const SampledPaths& paths,
                                         const std::vector<MultiIndex>& orders) {
  const int k = paths.config.dimension();
  for (const auto& alpha : orders) {
    if (alpha.size() != static_cast<std::size_t>(k)) {
      throw InvalidArgument("moment order " + alpha.to_string() + " has the wrong dimension");
    }
    if (degree(alpha) > kMaxOrder) throw InvalidArgument("moment orders are limited to 6");
  }
  std::vector<MomentRow> rows;
  std::vector<double> x(static_cast<std::size_t>(k));
  for (std::size_t g = 0; g < paths.generations.size(); ++g) {
    for (const auto& alpha : orders) {
      Welford acc;
      for (int r = 0; r < paths.config.replicates; ++r) {
        for (int u = 0; u < k; ++u) x[u] = paths.frequency(g, r, u);
        acc.add(power(x, alpha));
      }
      rows.push_back({paths.generations[g],
                      static_cast<double>(paths.generations[g]) / paths.config.two_n, alpha,
                      acc.mean, acc.std_error()});
    }
  }
  return rows;
}

std::vector<FixationRow> empirical_fixation(const SampledPaths& paths) {
  const int k = paths.config.dimension();
  std::vector<FixationRow> rows;
  for (std::size_t g = 0; g < paths.generations.size(); ++g) {
    Welford fixed;
    Welford lost;
    for (int r = 0; r < paths.config.replicates; ++r) {
      const int c = paths.counts[g][static_cast<std::size_t>(r) * k];
      fixed.add(c == paths.config.two_n ? 1.0 : 0.0);
      lost.add(c == 0 ? 1.0 : 0.0);
    }
    rows.push_back({paths.generations[g],
                    static_cast<double>(paths.generations[g]) / paths.config.two_n, fixed.mean,
                    lost.mean, fixed.std_error(), lost.std_error()});
  }
  return rows;
}

std::vector<HeterozygosityRow> empirical_heterozygosity(const SampledPaths& paths) {
  const int k = paths.config.dimension();
  std::vector<HeterozygosityRow> rows;
  for (std::size_t g = 0; g < paths.generations.size(); ++g) {
    Welford acc;
    for (int r = 0; r < paths.config.replicates; ++r) {
      double rest = 1;
      double squares = 0;
      for (int u = 0; u < k; ++u) {
        const double x = paths.frequency(g, r, u);
        squares += x * x;
        rest -= x;
      }
      squares += rest * rest;
      acc.add(1 - squares);
    }
    rows.push_back({paths.generations[g],
                    static_cast<double>(paths.generations[g]) / paths.config.two_n, acc.mean,
                    acc.std_error()});
  }
  return rows;
}

std::vector<MomentRow> simulate_empirical_moments(const McConfig& cfg,
                                                  const std::vector<MultiIndex>& orders,
                                                  const std::vector<int>& sample_generations) {
  return empirical_moments(simulate(cfg, sample_generations), orders);
}

std::vector<FixationRow> empirical_fixation(const McConfig& cfg,
                                            const std::vector<int>& sample_generations) {
  return empirical_fixation(simulate(cfg, sample_generations));
}

}  // namespace wfmgf::montecarlo
