#include "regionharvest/harmony.hpp"

#include <algorithm>

#include "regionharvest/error.hpp"

namespace rh {

void validate(const HSParams& p) {
  if (!(p.hmcr >= 0.0 && p.hmcr <= 1.0)) fail(ErrorCode::InvalidArgument, "hmcr must be in [0, 1]");
  if (!(p.par >= 0.0 && p.par <= 1.0)) fail(ErrorCode::InvalidArgument, "par must be in [0, 1]");
  if (p.hms < 1) fail(ErrorCode::InvalidArgument, "hms must be >= 1");
  if (p.ni < 1) fail(ErrorCode::InvalidArgument, "ni must be >= 1");
  if (!(p.bw > 0.0)) fail(ErrorCode::InvalidArgument, "bw must be > 0");
}

namespace {

void check_bounds(std::span<const Bounds> bounds) {
  if (bounds.empty()) fail(ErrorCode::InvalidArgument, "at least one variable is required");
  for (const auto& b : bounds)
    if (!(b.lower < b.upper)) fail(ErrorCode::InvalidArgument, "each bound needs lower < upper");
}

}  // namespace

std::vector<ContinuousHarmony> init_memory(std::span<const Bounds> bounds, const HSParams& params,
                                           const Objective& objective, Rng& rng) {
  validate(params);
  check_bounds(bounds);
  std::vector<ContinuousHarmony> memory(static_cast<std::size_t>(params.hms));
  for (auto& h : memory) {
    h.variables.reserve(bounds.size());
    for (const auto& b : bounds) h.variables.push_back(rng.uniform(b.lower, b.upper));
    h.fitness = objective(h.variables);
  }
  return memory;
}

std::vector<ContinuousHarmony> init_memory(std::span<const Bounds> bounds, const HSParams& params,
                                           const Objective& objective) {
  Rng rng(params.seed);
  return init_memory(bounds, params, objective, rng);
}

ContinuousHarmony improvise(std::span<const ContinuousHarmony> memory, std::span<const Bounds> bounds,
                            const HSParams& params, Rng& rng) {
  if (memory.empty()) fail(ErrorCode::InvalidArgument, "harmony memory is empty");
  ContinuousHarmony out;
  out.variables.resize(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    double x;
    if (rng.uniform() < params.hmcr) {
      x = memory[static_cast<std::size_t>(rng.below(static_cast<int>(memory.size())))].variables[i];
      if (rng.uniform() < params.par) {
        const double step = rng.uniform_open() * params.bw;
        x += rng.bernoulli(0.5) ? step : -step;
      }
    } else {
      x = rng.uniform(bounds[i].lower, bounds[i].upper);
    }
    out.variables[i] = std::clamp(x, bounds[i].lower, bounds[i].upper);
  }
  return out;
}

OptimizeResult optimize(const Objective& objective, std::span<const Bounds> bounds, const HSParams& params) {
  Rng rng(params.seed);
  auto memory = init_memory(bounds, params, objective, rng);

  const auto best_of = [&] {
    return *std::min_element(memory.begin(), memory.end(),
                             [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
  };
  OptimizeResult result;
  result.best = best_of();
  result.trajectory.reserve(static_cast<std::size_t>(params.ni));
  for (int it = 0; it < params.ni; ++it) {
    ContinuousHarmony candidate = improvise(memory, bounds, params, rng);
    candidate.fitness = objective(candidate.variables);
    if (candidate.fitness < result.best.fitness) result.best = candidate;
    replace_worst(memory, std::move(candidate));
    result.trajectory.push_back(result.best.fitness);
  }
  return result;
}

}  // namespace rh
