#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "regionharvest/rng.hpp"

namespace rh {

struct HSParams {
  int hms = 30;
  double hmcr = 0.9;
  double par = 0.3;
  // Real step for continuous problems; integer index radius for the
  // discrete region search.
  double bw = 0.5;
  int ni = 50000;
  std::uint64_t seed = 0;

  bool operator==(const HSParams&) const = default;
};

// Throws unless 0<=hmcr<=1, 0<=par<=1, hms>=1, ni>=1 and bw>0.
void validate(const HSParams& params);

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct ContinuousHarmony {
  std::vector<double> variables;
  // Objective value; lower is better.
  double fitness = std::numeric_limits<double>::quiet_NaN();
};

using Objective = std::function<double(std::span<const double>)>;

// hms harmonies drawn uniformly inside the bounds, each evaluated.
std::vector<ContinuousHarmony> init_memory(std::span<const Bounds> bounds, const HSParams& params,
                                           const Objective& objective, Rng& rng);
// Same, seeded from params.seed.
std::vector<ContinuousHarmony> init_memory(std::span<const Bounds> bounds, const HSParams& params,
                                           const Objective& objective);

// Per variable: with probability hmcr copy it from a random member (then with
// probability par move it by +/- r*bw, r ~ U(0,1)); otherwise draw it
// uniformly in bounds. The result is clamped and left unevaluated.
ContinuousHarmony improvise(std::span<const ContinuousHarmony> memory, std::span<const Bounds> bounds,
                            const HSParams& params, Rng& rng);

// Index of the member with the largest fitness (first one on ties).
template <typename Member>
std::size_t worst_index(const std::vector<Member>& memory) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < memory.size(); ++i)
    if (memory[i].fitness > memory[worst].fitness) worst = i;
  return worst;
}

// Replaces the worst member when the candidate is strictly better. Works
// for any member type exposing a minimised `fitness`.
template <typename Member>
bool replace_worst(std::vector<Member>& memory, Member candidate) {
  if (memory.empty()) return false;
  const std::size_t worst = worst_index(memory);
  if (!(candidate.fitness < memory[worst].fitness)) return false;
  memory[worst] = std::move(candidate);
  return true;
}

struct OptimizeResult {
  ContinuousHarmony best;
  // Best-so-far objective after each improvisation; length ni.
  std::vector<double> trajectory;
};

OptimizeResult optimize(const Objective& objective, std::span<const Bounds> bounds, const HSParams& params);

}  // namespace rh
