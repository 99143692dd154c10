#include "regionharvest/region_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>

#include "regionharvest/error.hpp"

namespace rh {

FitnessContext::FitnessContext(FitnessData data, ClassifierConfig classifier, std::uint64_t seed)
    : data_(std::move(data)), classifier_(classifier), seed_(seed) {
  if (data_.train.empty() || data_.validation.empty())
    fail(ErrorCode::InvalidArgument, "fitness needs non-empty train and validation sets");
  if (data_.train.size() != data_.train_labels.size() || data_.validation.size() != data_.validation_labels.size())
    fail(ErrorCode::InvalidArgument, "feature and label counts differ");
}

double FitnessContext::fitness(const RegionSubset& subset) {
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(subset.mask()); it != cache_.end()) {
      ++cache_hits_;
      return it->second;
    }
  }
  const double value = compute(subset);
  std::unique_lock lock(mutex_);
  if (const auto [it, inserted] = cache_.try_emplace(subset.mask(), value); !inserted) {
    ++cache_hits_;
    return it->second;
  }
  ++evaluations_;
  return value;
}

double FitnessContext::compute(const RegionSubset& subset) const {
  const auto build = [&](const std::vector<SampleFeatures>& samples) {
    std::vector<FeatureVector> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(assemble(s, subset));
    return out;
  };
  const auto train_vectors = build(data_.train);
  const auto model = train(train_vectors, data_.train_labels, classifier_, seed_);
  const auto val_vectors = build(data_.validation);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < val_vectors.size(); ++i)
    if (predict(model, val_vectors[i]) == data_.validation_labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(val_vectors.size());
}

RouletteWheel make_wheel(const std::array<double, kLocalRegionCount>& weights) {
  RouletteWheel wheel;
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "roulette weights must be finite and >= 0");
    total += w;
  }
  wheel.weights = weights;
  if (total == 0.0) {
    wheel.weights.fill(1.0);
    wheel.uniform_fallback = true;
  }
  std::partial_sum(wheel.weights.begin(), wheel.weights.end(), wheel.cumulative.begin());
  return wheel;
}

RouletteWheel build_roulette(FitnessContext& context) {
  std::array<double, kLocalRegionCount> weights{};
  for (int i = 0; i < kLocalRegionCount; ++i)
    weights[static_cast<std::size_t>(i)] = context.fitness(RegionSubset::single(i));
  return make_wheel(weights);
}

int spin(const RouletteWheel& wheel, Rng& rng) {
  const double u = rng.uniform() * wheel.cumulative.back();
  const auto it = std::upper_bound(wheel.cumulative.begin(), wheel.cumulative.end(), u);
  // u < total, so a sector always exists; guard against rounding at the edge.
  return it == wheel.cumulative.end() ? kLocalRegionCount - 1 : static_cast<int>(it - wheel.cumulative.begin());
}

int spin(const RouletteWheel& wheel, Rng& rng, const RegionSubset& allowed) {
  if (allowed.empty()) fail(ErrorCode::InvalidArgument, "spin restricted to an empty set");
  if (allowed == RegionSubset::all()) return spin(wheel, rng);
  std::array<double, kLocalRegionCount> cumulative{};
  double total = 0.0;
  for (int i = 0; i < kLocalRegionCount; ++i) {
    if (allowed.contains(i)) total += wheel.weights[static_cast<std::size_t>(i)];
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  if (total == 0.0) {
    const auto members = allowed.indices();
    return members[static_cast<std::size_t>(rng.below(static_cast<int>(members.size())))];
  }
  const double u = rng.uniform() * total;
  for (int i = 0; i < kLocalRegionCount; ++i)
    if (allowed.contains(i) && u < cumulative[static_cast<std::size_t>(i)]) return i;
  // Rounding at the top edge: last allowed region with positive weight.
  for (int i = kLocalRegionCount - 1; i >= 0; --i)
    if (allowed.contains(i) && wheel.weights[static_cast<std::size_t>(i)] > 0.0) return i;
  return allowed.indices().back();
}

std::string to_string(SearchVariant variant) { return variant == SearchVariant::Enhanced ? "enhanced" : "basic"; }

void validate(const RegionSearchParams& params) {
  validate(params.hs);
  if (params.hs.bw < 1.0 || params.hs.bw != std::floor(params.hs.bw))
    fail(ErrorCode::InvalidArgument, "discrete bw must be a positive integer");
  if (params.size_min < 1 || params.size_max > kLocalRegionCount - 1 || params.size_min > params.size_max)
    fail(ErrorCode::InvalidArgument, "subset sizes must satisfy 1 <= size_min <= size_max <= 15");
  if (params.max_retries < 1) fail(ErrorCode::InvalidArgument, "max_retries must be >= 1");
}

namespace {

// Region indices sorted by descending wheel weight, ties by index.
std::array<int, kLocalRegionCount> wheel_order(const RouletteWheel& wheel) {
  std::array<int, kLocalRegionCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return wheel.weights[static_cast<std::size_t>(a)] > wheel.weights[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

RegionSubset improvise_subset(std::span<const RegionSubset> memory, const RouletteWheel& wheel,
                              const RegionSearchParams& params, Rng& rng, int k, std::vector<SlotTrace>* trace) {
  if (memory.empty()) fail(ErrorCode::InvalidArgument, "harmony memory is empty");
  if (k < 1 || k > kLocalRegionCount - 1) fail(ErrorCode::InvalidArgument, "subset size must be in [1, 15]");
  std::uint16_t union_mask = 0;
  for (const auto& m : memory) union_mask = static_cast<std::uint16_t>(union_mask | m.mask());
  const RegionSubset in_memory(union_mask);
  const int bw = static_cast<int>(params.hs.bw);

  RegionSubset chosen;
  for (int slot = 0; slot < k; ++slot) {
    SlotTrace t;
    bool placed = false;
    for (int attempt = 0; attempt < params.max_retries && !placed; ++attempt) {
      int idx;
      if (rng.uniform() < params.hs.hmcr && !in_memory.empty()) {
        idx = spin(wheel, rng, in_memory);
        t.drawn = idx;
        if (rng.uniform() < params.hs.par) {
          const int delta = 1 + rng.below(bw);
          idx = std::clamp(rng.bernoulli(0.5) ? idx + delta : idx - delta, 0, kLocalRegionCount - 1);
        }
      } else {
        idx = rng.below(kLocalRegionCount);
        t.drawn = idx;
      }
      if (!chosen.contains(idx)) {
        chosen.insert(idx);
        t.chosen = idx;
        placed = true;
      }
    }
    if (!placed) {
      for (const int idx : wheel_order(wheel))
        if (!chosen.contains(idx)) {
          chosen.insert(idx);
          t.chosen = idx;
          t.fallback = true;
          break;
        }
    }
    if (trace) trace->push_back(t);
  }
  return chosen;
}

RegionSubset improvise_inclusion(std::span<const RegionSubset> memory, const HSParams& params, Rng& rng) {
  if (memory.empty()) fail(ErrorCode::InvalidArgument, "harmony memory is empty");
  RegionSubset candidate;
  for (int b = 0; b < kLocalRegionCount; ++b) {
    bool bit;
    if (rng.uniform() < params.hmcr) {
      bit = memory[static_cast<std::size_t>(rng.below(static_cast<int>(memory.size())))].contains(b);
      if (rng.uniform() < params.par) bit = !bit;
    } else {
      bit = rng.bernoulli(0.5);
    }
    if (bit) candidate.insert(b);
  }
  return candidate;
}

ScoredSubset select_best(std::span<const ScoredSubset> candidates) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "no candidates to select from");
  ScoredSubset best = candidates.front();
  for (const auto& c : candidates.subspan(1))
    if (c.fitness > best.fitness || (c.fitness == best.fitness && canonical_less(c.subset, best.subset))) best = c;
  return best;
}

namespace {

// Memory entry; fitness holds the negated accuracy so that the shared
// minimising replace_worst() applies.
struct Member {
  RegionSubset subset;
  double fitness = 0.0;
};

// Worst = highest cost; among equal costs the canonically largest subset,
// so the canonical preference survives ties.
bool replace_worst_member(std::vector<Member>& memory, const Member& candidate) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < memory.size(); ++i) {
    const auto& m = memory[i];
    const auto& w = memory[worst];
    if (m.fitness > w.fitness || (m.fitness == w.fitness && canonical_less(w.subset, m.subset))) worst = i;
  }
  if (!(candidate.fitness < memory[worst].fitness)) return false;
  memory[worst] = candidate;
  return true;
}

bool in_memory(const std::vector<Member>& memory, const RegionSubset& s) {
  return std::any_of(memory.begin(), memory.end(), [&](const Member& m) { return m.subset == s; });
}

ScoredSubset best_member(const std::vector<Member>& memory) {
  std::vector<ScoredSubset> scored;
  scored.reserve(memory.size());
  for (const auto& m : memory) scored.push_back({m.subset, -m.fitness});
  return select_best(scored);
}

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::size_t memory_size(const RegionSearchParams& params, int k) {
  return static_cast<std::size_t>(std::min<long long>(params.hs.hms, binomial(kLocalRegionCount, k)));
}

RegionSubset random_subset(Rng& rng, int k) {
  std::array<int, kLocalRegionCount> pool{};
  std::iota(pool.begin(), pool.end(), 0);
  RegionSubset s;
  for (int i = 0; i < k; ++i) {
    const int j = i + rng.below(kLocalRegionCount - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    s.insert(pool[static_cast<std::size_t>(i)]);
  }
  return s;
}

struct CounterSnapshot {
  std::size_t evaluations, cache_hits;
  explicit CounterSnapshot(const FitnessContext& c) : evaluations(c.evaluations()), cache_hits(c.cache_hits()) {}
};

void finish_counters(SelectionResult& r, const FitnessContext& c, const CounterSnapshot& before) {
  r.evaluations = c.evaluations() - before.evaluations;
  r.cache_hits = c.cache_hits() - before.cache_hits;
  r.requests = r.evaluations + r.cache_hits;
}

}  // namespace

std::size_t enhanced_request_budget(const RegionSearchParams& params) {
  std::size_t total = kLocalRegionCount;  // roulette sectors
  for (int k = params.size_min; k <= params.size_max; ++k)
    total += memory_size(params, k) + static_cast<std::size_t>(params.hs.ni);
  return total;
}

SelectionResult enhanced_search(FitnessContext& context, const RegionSearchParams& params) {
  validate(params);
  const auto start = std::chrono::steady_clock::now();
  const CounterSnapshot before(context);
  Rng rng(params.hs.seed);

  SelectionResult result;
  result.variant = SearchVariant::Enhanced;
  result.params = params;
  result.seed = params.hs.seed;
  result.wheel = build_roulette(context);

  std::vector<ScoredSubset> size_winners;
  for (int k = params.size_min; k <= params.size_max; ++k) {
    const std::size_t hms = memory_size(params, k);
    std::vector<Member> memory;
    memory.reserve(hms);
    if (k == 1) {
      // The level-2 regions themselves, strongest sectors first when hms < 16.
      const auto order = wheel_order(result.wheel);
      for (std::size_t i = 0; i < hms; ++i) memory.push_back({RegionSubset::single(order[i]), 0.0});
    } else {
      const std::size_t max_attempts = hms * 1000;
      for (std::size_t attempt = 0; memory.size() < hms && attempt < max_attempts; ++attempt) {
        const RegionSubset s = random_subset(rng, k);
        if (!in_memory(memory, s)) memory.push_back({s, 0.0});
      }
      while (memory.size() < hms) memory.push_back({random_subset(rng, k), 0.0});
    }
    for (auto& m : memory) m.fitness = -context.fitness(m.subset);

    SizeBest size_best;
    size_best.size = k;
    size_best.trajectory.push_back(best_member(memory).fitness);
    std::vector<RegionSubset> subsets(memory.size());
    for (int g = 0; g < params.hs.ni; ++g) {
      std::transform(memory.begin(), memory.end(), subsets.begin(), [](const Member& m) { return m.subset; });
      const RegionSubset candidate = improvise_subset(subsets, result.wheel, params, rng, k);
      const double f = context.fitness(candidate);
      if (!in_memory(memory, candidate)) replace_worst_member(memory, {candidate, -f});
      size_best.trajectory.push_back(best_member(memory).fitness);
    }
    const ScoredSubset winner = best_member(memory);
    size_best.subset = winner.subset;
    size_best.fitness = winner.fitness;
    size_winners.push_back(winner);
    result.per_size.push_back(std::move(size_best));
  }

  const ScoredSubset best = select_best(size_winners);
  result.best_subset = best.subset;
  result.best_fitness = best.fitness;
  finish_counters(result, context, before);
  result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SelectionResult basic_search(FitnessContext& context, const RegionSearchParams& params, int improvisations) {
  validate(params.hs);
  const auto start = std::chrono::steady_clock::now();
  const CounterSnapshot before(context);
  Rng rng(params.hs.seed);
  const auto hms = static_cast<std::size_t>(params.hs.hms);
  if (improvisations < 0) {
    const std::size_t budget = enhanced_request_budget(params);
    improvisations = budget > hms ? static_cast<int>(budget - hms) : 0;
  }

  SelectionResult result;
  result.variant = SearchVariant::Basic;
  result.params = params;
  result.seed = params.hs.seed;

  std::vector<Member> memory(hms);
  for (auto& m : memory) {
    for (int b = 0; b < kLocalRegionCount; ++b)
      if (rng.bernoulli(0.5)) m.subset.insert(b);
    m.fitness = -context.fitness(m.subset);
  }
  ScoredSubset best = best_member(memory);
  result.trajectory.push_back(best.fitness);
  std::vector<RegionSubset> subsets(memory.size());

  for (int it = 0; it < improvisations; ++it) {
    std::transform(memory.begin(), memory.end(), subsets.begin(), [](const Member& m) { return m.subset; });
    const RegionSubset candidate = improvise_inclusion(subsets, params.hs, rng);
    const double f = context.fitness(candidate);
    if (!in_memory(memory, candidate)) replace_worst_member(memory, {candidate, -f});
    best = best_member(memory);
    result.trajectory.push_back(best.fitness);
  }

  result.best_subset = best.subset;
  result.best_fitness = best.fitness;
  result.wheel = make_wheel({});
  finish_counters(result, context, before);
  result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rh
