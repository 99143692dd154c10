#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "regionharvest/error.hpp"
#include "regionharvest/partition.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace rh;

namespace {

BinaryImage filled(int h, int w) {
  BinaryImage img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.set(r, c, true);
  return img;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("centroid") {
    SUBCASE("uniform 4x4") {
      const auto p = centroid(filled(4, 4), {0, 0, 3, 3});
      CHECK(p.row == doctest::Approx(1.5));
      CHECK(p.col == doctest::Approx(1.5));
    }
    SUBCASE("point mass") {
      BinaryImage img(5, 5);
      img.set(2, 3, true);
      const auto p = centroid(img, {0, 0, 4, 4});
      CHECK(p.row == 2.0);
      CHECK(p.col == 3.0);
    }
    SUBCASE("direct summation over the foreground pixels") {
      const BinaryImage img = test::bitmap({"1101", "0111", "0000", "1111"});
      double sr = 0, sc = 0, n = 0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if (img.at(r, c)) {
            sr += r;
            sc += c;
            n += 1;
          }
      CHECK(n == 10);
      const auto p = centroid(img, {0, 0, 3, 3});
      CHECK(p.row == doctest::Approx(sr / n));
      CHECK(p.col == doctest::Approx(sc / n));
    }
    SUBCASE("ink-free region falls back to the geometric centre") {
      const auto p = centroid(BinaryImage(6, 6), {1, 2, 4, 3});
      CHECK(p.row == 2.5);
      CHECK(p.col == 2.5);
    }
    SUBCASE("empty region is an error") { CHECK_THROWS_AS(centroid(filled(2, 2), Region::make_empty()), Error); }
  }

  TEST_CASE("split4 examples") {
    SUBCASE("symmetric mass splits in the middle") {
      const auto q = split4(filled(4, 4), {0, 0, 3, 3});
      CHECK(q[0] == Region{0, 0, 1, 1});
      CHECK(q[1] == Region{0, 2, 1, 3});
      CHECK(q[2] == Region{2, 0, 3, 1});
      CHECK(q[3] == Region{2, 2, 3, 3});
    }
    SUBCASE("top-left mass clamps to the minimum split") {
      BinaryImage img(4, 4);
      img.set(0, 0, true);
      const auto q = split4(img, {0, 0, 3, 3});
      CHECK(q[0] == Region{0, 0, 0, 0});
      CHECK(q[0].area() == 1);
      CHECK(q[3] == Region{1, 1, 3, 3});
    }
    SUBCASE("single row leaves the bottom pair empty") {
      const auto q = split4(filled(1, 4), {0, 0, 0, 3});
      CHECK_FALSE(q[0].empty());
      CHECK_FALSE(q[1].empty());
      CHECK(q[2].empty());
      CHECK(q[3].empty());
    }
    SUBCASE("single column leaves the right pair empty") {
      const auto q = split4(filled(4, 1), {0, 0, 3, 0});
      CHECK(q[1].empty());
      CHECK(q[3].empty());
      CHECK(q[0].area() + q[2].area() == 4);
    }
    SUBCASE("half rounds up") {
      // Mass at rows 0 and 1 only -> centroid row 0.5 -> split row 1.
      BinaryImage img(4, 4);
      img.set(0, 0, true);
      img.set(1, 0, true);
      const auto q = split4(img, {0, 0, 3, 3});
      CHECK(q[0].bottom == 0);
      CHECK(q[2].top == 1);
    }
  }

  TEST_CASE("split4 covers its region exactly over 1000 seeds") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng rng(seed);
      const BinaryImage img = test::random_bitmap(rng, 8, 8, rng.uniform());
      const Region full{0, 0, 7, 7};
      const auto q = split4(img, full);
      REQUIRE(test::exact_cover(full, q, 8, 8));
      // Both halves are non-empty for a parent with >= 2 rows and columns.
      for (const auto& r : q) REQUIRE_FALSE(r.empty());
    }
  }

  TEST_CASE("build_tree") {
    SUBCASE("21 regions with level 0 = full image") {
      Rng rng(1);
      BinaryImage img = test::random_bitmap(rng, 32, 32, 0.2);
      const auto tree = build_tree(img);
      CHECK(tree.all().size() == 21);
      CHECK(tree.level0 == Region{0, 0, 31, 31});
    }
    SUBCASE("uniform 32x32 gives 8x8 local regions") {
      const auto tree = build_tree(filled(32, 32));
      for (const auto& r : tree.level2) {
        CHECK(r.height() == 8);
        CHECK(r.width() == 8);
      }
      CHECK(tree.level2[3] == Region{8, 8, 15, 15});
      CHECK(tree.level2[5] == Region{0, 24, 7, 31});
      CHECK(tree.level2[4] == Region{0, 16, 7, 23});
    }
    SUBCASE("all-background is an error") { CHECK_THROWS_AS(build_tree(BinaryImage(8, 8)), Error); }
    SUBCASE("level-2 children follow parent-major order") {
      Rng rng(3);
      const BinaryImage img = test::random_bitmap(rng, 32, 32, 0.3);
      const auto tree = build_tree(img);
      for (int p = 0; p < 4; ++p) {
        const auto q = split4(img, tree.level1[p]);
        for (int c = 0; c < 4; ++c) CHECK(tree.level2[4 * p + c] == q[c]);
      }
    }
  }

  TEST_CASE("build_tree partitions every level over 1000 random images") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng rng(seed + 7777);
      const int h = 1 + rng.below(20), w = 1 + rng.below(20);
      BinaryImage img = test::random_bitmap(rng, h, w, rng.uniform(0.01, 0.9));
      img.set(rng.below(h), rng.below(w), true);
      const auto tree = build_tree(img);
      REQUIRE(test::exact_cover(tree.level0, tree.level1, h, w));
      REQUIRE(test::exact_cover(tree.level0, tree.level2, h, w));
      for (int p = 0; p < 4; ++p) {
        const std::array<Region, 4> kids{tree.level2[4 * p], tree.level2[4 * p + 1], tree.level2[4 * p + 2],
                                         tree.level2[4 * p + 3]};
        REQUIRE(test::exact_cover(tree.level1[p], kids, h, w));
      }
      REQUIRE(build_tree(img).all() == tree.all());
    }
  }

  TEST_CASE("region table CSV") {
    std::ostringstream out;
    write_region_table(out, build_tree(filled(32, 32)));
    const std::string text = out.str();
    CHECK(text.rfind("level,index,top,left,bottom,right\n", 0) == 0);
    CHECK(text.find("0,0,0,0,31,31\n") != std::string::npos);
    CHECK(text.find("2,15,24,24,31,31\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 22);
  }
}
