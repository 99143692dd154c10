#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "regionharvest/error.hpp"
#include "regionharvest/harmony.hpp"

using namespace rh;

namespace {

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

std::vector<Bounds> box(int d, double lo, double hi) { return std::vector<Bounds>(static_cast<std::size_t>(d), {lo, hi}); }

struct Scored {
  int id = 0;
  double fitness = 0.0;
};

}  // namespace

TEST_SUITE("harmony") {
  TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate(HSParams{}));
    CHECK_THROWS_AS(validate(HSParams{30, 1.1, 0.3, 0.5, 10, 0}), Error);
    CHECK_THROWS_AS(validate(HSParams{30, 0.9, -0.1, 0.5, 10, 0}), Error);
    CHECK_THROWS_AS(validate(HSParams{0, 0.9, 0.3, 0.5, 10, 0}), Error);
    CHECK_THROWS_AS(validate(HSParams{30, 0.9, 0.3, 0.5, 0, 0}), Error);
    CHECK_THROWS_AS(validate(HSParams{30, 0.9, 0.3, 0.0, 10, 0}), Error);
  }

  TEST_CASE("init_memory") {
    const HSParams p{30, 0.9, 0.3, 0.5, 10, 7};
    SUBCASE("sizing and fitness") {
      const auto mem = init_memory(box(5, -10, 10), p, sphere);
      CHECK(mem.size() == 30);
      for (const auto& h : mem) {
        CHECK(h.variables.size() == 5);
        CHECK(h.fitness == sphere(h.variables));
      }
    }
    SUBCASE("collapsed bounds") {
      const auto mem = init_memory(box(3, 0.0, 1e-9), p, sphere);
      for (const auto& h : mem)
        for (double x : h.variables) CHECK(std::abs(x) <= 1e-9);
    }
    SUBCASE("deterministic per seed") {
      const auto a = init_memory(box(4, -1, 1), p, sphere);
      const auto b = init_memory(box(4, -1, 1), p, sphere);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].variables == b[i].variables);
    }
    SUBCASE("invalid bounds") { CHECK_THROWS_AS(init_memory(box(2, 1.0, 1.0), p, sphere), Error); }
  }

  TEST_CASE("improvise") {
    const auto bounds = box(6, -5, 5);
    std::vector<ContinuousHarmony> identical(10, ContinuousHarmony{{1, -2, 3, -4, 0.5, 0}, 0.0});
    Rng rng(1);
    SUBCASE("pure memory copy") {
      for (int i = 0; i < 100; ++i)
        CHECK(improvise(identical, bounds, {10, 1.0, 0.0, 0.5, 1, 0}, rng).variables == identical[0].variables);
    }
    SUBCASE("pure randomization stays in bounds and ignores memory") {
      int copies = 0;
      for (int i = 0; i < 100; ++i) {
        const auto h = improvise(identical, bounds, {10, 0.0, 0.0, 0.5, 1, 0}, rng);
        for (std::size_t j = 0; j < h.variables.size(); ++j) {
          CHECK(h.variables[j] >= -5.0);
          CHECK(h.variables[j] <= 5.0);
          copies += h.variables[j] == identical[0].variables[j];
        }
      }
      CHECK(copies == 0);
    }
    SUBCASE("bounded perturbation") {
      for (int i = 0; i < 200; ++i) {
        const auto h = improvise(identical, bounds, {10, 1.0, 1.0, 0.1, 1, 0}, rng);
        for (std::size_t j = 0; j < h.variables.size(); ++j) {
          CHECK(std::abs(h.variables[j] - identical[0].variables[j]) <= 0.1);
          CHECK(h.variables[j] != identical[0].variables[j]);
        }
      }
    }
    SUBCASE("clamped to bounds") {
      std::vector<ContinuousHarmony> edge(3, ContinuousHarmony{std::vector<double>(6, 5.0), 0.0});
      for (int i = 0; i < 100; ++i)
        for (double x : improvise(edge, bounds, {3, 1.0, 1.0, 3.0, 1, 0}, rng).variables) CHECK(x <= 5.0);
    }
  }

  TEST_CASE("replace_worst") {
    std::vector<Scored> mem{{0, 1.0}, {1, 3.0}, {2, 2.0}};
    SUBCASE("worse candidate") {
      CHECK_FALSE(replace_worst(mem, Scored{9, 4.0}));
      CHECK(mem[1].id == 1);
    }
    SUBCASE("equal to worst keeps the incumbent") {
      CHECK_FALSE(replace_worst(mem, Scored{9, 3.0}));
      CHECK(mem[1].id == 1);
    }
    SUBCASE("better candidate replaces the worst") {
      CHECK(replace_worst(mem, Scored{9, 2.5}));
      CHECK(mem.size() == 3);
      CHECK(mem[1].id == 9);
    }
  }

  TEST_CASE("optimize") {
    SUBCASE("ni = 1 keeps the best of memory and one candidate") {
      const HSParams p{8, 0.9, 0.3, 0.5, 1, 123};
      const auto bounds = box(3, -4, 4);
      Rng rng(p.seed);
      auto mem = init_memory(bounds, p, sphere, rng);
      auto cand = improvise(mem, bounds, p, rng);
      double best = sphere(cand.variables);
      for (const auto& h : mem) best = std::min(best, h.fitness);
      const auto r = optimize(sphere, bounds, p);
      CHECK(r.best.fitness == best);
      CHECK(r.trajectory.size() == 1);
    }
    SUBCASE("trajectory is non-increasing and in bounds") {
      const auto r = optimize(sphere, box(4, -3, 3), {10, 0.9, 0.3, 0.2, 2000, 5});
      CHECK(r.trajectory.size() == 2000);
      for (std::size_t i = 1; i < r.trajectory.size(); ++i) REQUIRE(r.trajectory[i] <= r.trajectory[i - 1]);
      CHECK(r.trajectory.back() == r.best.fitness);
      for (double x : r.best.variables) CHECK(std::abs(x) <= 3.0);
    }
    SUBCASE("deterministic per seed") {
      const HSParams p{10, 0.9, 0.3, 0.2, 500, 99};
      CHECK(optimize(sphere, box(3, -3, 3), p).trajectory == optimize(sphere, box(3, -3, 3), p).trajectory);
    }
    SUBCASE("sphere in five dimensions converges") {
      const auto r = optimize(sphere, box(5, -10, 10), {30, 0.9, 0.3, 0.5, 50000, 0});
      CHECK(r.best.fitness < 1e-2);
    }
  }
}
