#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "regionharvest/classifier.hpp"
#include "regionharvest/features.hpp"
#include "regionharvest/harmony.hpp"
#include "regionharvest/region_subset.hpp"
#include "regionharvest/rng.hpp"

namespace rh {

// Precomputed per-sample region features for the fitness splits.
struct FitnessData {
  std::vector<SampleFeatures> train;
  std::vector<int> train_labels;
  std::vector<SampleFeatures> validation;
  std::vector<int> validation_labels;
};

// Wrapper fitness f(C u G): train the configured classifier on the training
// vectors assembled from the subset plus the global regions and return the
// validation accuracy. Values are memoised per subset; the cache allows
// concurrent readers and exclusive inserts.
class FitnessContext {
 public:
  FitnessContext(FitnessData data, ClassifierConfig classifier, std::uint64_t seed);

  double fitness(const RegionSubset& subset);

  const FitnessData& data() const noexcept { return data_; }
  const ClassifierConfig& classifier() const noexcept { return classifier_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Distinct classifier trainings so far.
  std::size_t evaluations() const noexcept { return evaluations_.load(); }
  std::size_t cache_hits() const noexcept { return cache_hits_.load(); }
  std::size_t requests() const noexcept { return evaluations() + cache_hits(); }

 private:
  double compute(const RegionSubset& subset) const;

  FitnessData data_;
  ClassifierConfig classifier_;
  std::uint64_t seed_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint16_t, double> cache_;
  std::atomic<std::size_t> evaluations_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

inline double region_fitness(const RegionSubset& subset, FitnessContext& context) { return context.fitness(subset); }

// ---------------------------------------------------------------------------
// Roulette wheel over the 16 local regions
// ---------------------------------------------------------------------------

struct RouletteWheel {
  std::array<double, kLocalRegionCount> weights{};
  std::array<double, kLocalRegionCount> cumulative{};
  // Set when every supplied weight was zero and uniform sectors were used.
  bool uniform_fallback = false;
};

// Throws on a negative or non-finite weight.
RouletteWheel make_wheel(const std::array<double, kLocalRegionCount>& weights);

// Sector i weighted by the fitness of the singleton subset {i}.
RouletteWheel build_roulette(FitnessContext& context);

// One uniform draw against the cumulative sums.
int spin(const RouletteWheel& wheel, Rng& rng);
// Spin restricted to the regions in `allowed`; uniform over `allowed` when
// all of their weights are zero. `allowed` must be non-empty.
int spin(const RouletteWheel& wheel, Rng& rng, const RegionSubset& allowed);

// ---------------------------------------------------------------------------
// Searches
// ---------------------------------------------------------------------------

enum class SearchVariant { Enhanced, Basic };
std::string to_string(SearchVariant variant);

struct RegionSearchParams {
  HSParams hs{16, 0.85, 0.45, 1.0, 25, 0};
  // Subset sizes visited by the enhanced search.
  int size_min = 1;
  int size_max = kLocalRegionCount - 1;
  // Redraws of a slot that produced a duplicate before falling back.
  int max_retries = 32;

  bool operator==(const RegionSearchParams&) const = default;
};

// Throws unless the HS parameters are valid, bw is a positive integer and
// 1 <= size_min <= size_max <= 15.
void validate(const RegionSearchParams& params);

struct SlotTrace {
  int drawn = 0;     // index before pitch adjustment
  int chosen = 0;    // index placed in the subset
  bool fallback = false;
};

// Builds a subset of exactly k distinct regions. Per slot: with probability
// hmcr spin the wheel restricted to regions present in memory, and then with
// probability par shift the index by +/-delta, delta ~ U{1..bw}, clamped to
// [0,15]; otherwise draw a region uniformly. A duplicate redraws the slot up
// to max_retries times, then takes the first unused region in descending
// wheel-weight order.
RegionSubset improvise_subset(std::span<const RegionSubset> memory, const RouletteWheel& wheel,
                              const RegionSearchParams& params, Rng& rng, int k,
                              std::vector<SlotTrace>* trace = nullptr);

// Basic-variant improvisation over 16-bit inclusion vectors. Per bit: with
// probability hmcr copy it from a uniformly chosen member and then flip it
// with probability par; otherwise draw it uniformly.
RegionSubset improvise_inclusion(std::span<const RegionSubset> memory, const HSParams& params, Rng& rng);

struct SizeBest {
  int size = 0;
  RegionSubset subset;
  double fitness = 0.0;
  // Best fitness in memory after initialisation, then after each generation.
  std::vector<double> trajectory;
};

struct SelectionResult {
  SearchVariant variant = SearchVariant::Enhanced;
  RegionSubset best_subset;
  double best_fitness = 0.0;
  // Enhanced only: one entry per visited size.
  std::vector<SizeBest> per_size;
  // Basic only: best-so-far fitness after initialisation, then after each improvisation.
  std::vector<double> trajectory;
  RouletteWheel wheel;
  std::size_t evaluations = 0;
  std::size_t cache_hits = 0;
  std::size_t requests = 0;
  RegionSearchParams params;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
};

struct ScoredSubset {
  RegionSubset subset;
  double fitness = 0.0;
};

// Highest fitness; ties go to canonical_less. Independent of input order.
ScoredSubset select_best(std::span<const ScoredSubset> candidates);

// Per-cardinality harmony search with a roulette-weighted memory
// consideration. Each size k in [size_min, size_max] gets a memory of hms
// subsets (the singletons for k = 1) and ni generations of improvise, score
// and strictly-better worst replacement.
SelectionResult enhanced_search(FitnessContext& context, const RegionSearchParams& params);

// Fitness requests the enhanced search issues for `params`.
std::size_t enhanced_request_budget(const RegionSearchParams& params);

// Plain harmony search over 16-bit inclusion vectors. With
// improvisations < 0 the count is chosen so that total fitness requests
// equal enhanced_request_budget(params).
SelectionResult basic_search(FitnessContext& context, const RegionSearchParams& params, int improvisations = -1);

}  // namespace rh
