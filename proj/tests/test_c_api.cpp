#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "regionharvest/regionharvest.h"

namespace fs = std::filesystem;

namespace {

std::string take(rh_text* text) {
  std::string s(rh_text_data(text), rh_text_size(text));
  rh_text_destroy(text);
  return s;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("regionharvest-capi-" + name);
  fs::remove_all(dir);
  return dir;
}

struct Config {
  rh_config* handle = nullptr;
  Config() { REQUIRE(rh_config_create(&handle) == RH_OK); }
  ~Config() { rh_config_destroy(handle); }
  void set(const char* k, const std::string& v) { REQUIRE(rh_config_set(handle, k, v.c_str()) == RH_OK); }
};

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("status names and version") {
    CHECK(std::string(rh_version()) == "0.1.0");
    CHECK(std::string(rh_status_name(RH_OK)) == "ok");
    CHECK(std::string(rh_status_name(RH_ERR_PHASE_ORDER)) == "phase prerequisite missing");
  }

  TEST_CASE("config validation and rendering") {
    Config c;
    CHECK(rh_config_set(c.handle, "enhanced.hmcr", "0.7") == RH_OK);
    CHECK(rh_config_is_set(c.handle, "enhanced.hmcr") == 1);
    CHECK(rh_config_is_set(c.handle, "enhanced.par") == 0);
    CHECK(rh_config_set(c.handle, "enhanced.hmcr", "lots") == RH_ERR_INVALID_ARGUMENT);
    CHECK(std::string(rh_last_error()).find("hmcr") != std::string::npos);
    CHECK(rh_config_set(c.handle, "bogus", "1") == RH_ERR_INVALID_ARGUMENT);
    rh_text* text = nullptr;
    REQUIRE(rh_config_render(c.handle, &text) == RH_OK);
    CHECK(take(text).find("enhanced.hmcr = 0.7") != std::string::npos);
    REQUIRE(rh_config_hash(c.handle, &text) == RH_OK);
    CHECK(take(text).size() == 16);
    CHECK(rh_config_create(nullptr) == RH_ERR_INVALID_ARGUMENT);
  }

  TEST_CASE("image features through the C boundary") {
    // Dark 12x10 block on a white 40x40 canvas.
    std::vector<uint8_t> gray(40 * 40, 255);
    for (int r = 10; r < 22; ++r)
      for (int c = 5; c < 15; ++c) gray[r * 40 + c] = 0;
    rh_image* img = nullptr;
    REQUIRE(rh_image_from_gray(gray.data(), 40, 40, &img) == RH_OK);
    int uniform = -1;
    REQUIRE(rh_image_binarize(img, &uniform) == RH_OK);
    CHECK(uniform == 0);
    REQUIRE(rh_image_normalize(img, 32, 32) == RH_OK);
    int h = 0, w = 0;
    REQUIRE(rh_image_size(img, &h, &w) == RH_OK);
    CHECK(h == 32);
    CHECK(w == 32);
    std::vector<uint8_t> px(32 * 32);
    REQUIRE(rh_image_pixels(img, px.data(), px.size()) == RH_OK);
    for (auto v : px) CHECK(v == 1);

    std::vector<int> regions(21 * 4);
    REQUIRE(rh_image_regions(img, regions.data(), regions.size()) == RH_OK);
    CHECK(regions[0] == 0);
    CHECK(regions[3] == 31);

    size_t n = 0;
    const int sel[] = {3, 7};
    REQUIRE(rh_image_features(img, sel, 2, nullptr, 0, &n) == RH_OK);
    CHECK(n == 28);
    std::vector<double> f(n);
    REQUIRE(rh_image_features(img, sel, 2, f.data(), f.size(), &n) == RH_OK);
    for (double v : f) CHECK(v == 1.0);
    CHECK(rh_image_features(img, sel, 2, f.data(), 5, &n) == RH_ERR_INVALID_ARGUMENT);
    const int bad[] = {16};
    CHECK(rh_image_features(img, bad, 1, nullptr, 0, &n) == RH_ERR_INVALID_ARGUMENT);
    rh_image_destroy(img);
  }

  TEST_CASE("loading errors map to distinct codes") {
    rh_image* img = nullptr;
    CHECK(rh_image_load("/nonexistent/file.pgm", &img) == RH_ERR_MISSING_FILE);
    CHECK(img == nullptr);
  }

  TEST_CASE("utilities") {
    rh_hs_params p{30, 0.9, 0.3, 0.5, 5000, 1};
    double best = -1;
    int monotone = 0;
    REQUIRE(rh_bench_sphere(2, -5, 5, &p, nullptr, &best, &monotone) == RH_OK);
    CHECK(best >= 0.0);
    CHECK(best < 0.1);
    CHECK(monotone == 1);
    p.hmcr = 2.0;
    CHECK(rh_bench_sphere(2, -5, 5, &p, nullptr, &best, &monotone) == RH_ERR_INVALID_ARGUMENT);

    const int idx[] = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    rh_text* text = nullptr;
    REQUIRE(rh_region_map(idx, 9, &text) == RH_OK);
    CHECK(take(text).find("selected=9 rejected=7 reduction=43.75%") != std::string::npos);

    REQUIRE(rh_strip_timing(R"({"a":1,"timing":2})", &text) == RH_OK);
    CHECK(take(text).find("timing") == std::string::npos);
  }

  TEST_CASE("phases in order on a written corpus") {
    const auto corpus = fresh_dir("corpus");
    REQUIRE(rh_synth_write(3, 6, 0.05, 5, corpus.string().c_str()) == RH_OK);
    CHECK(fs::exists(corpus / "manifest.csv"));

    const auto out = fresh_dir("out");
    Config c;
    c.set("dataset.manifest", (corpus / "manifest.csv").string());
    c.set("classifier.kind", "centroid");
    c.set("enhanced.ni", "2");
    c.set("enhanced.size_max", "2");
    c.set("timing.calls", "1000");
    c.set("timing.repeats", "1");
    c.set("out", out.string());

    CHECK(rh_search(c.handle, nullptr) == RH_ERR_PHASE_ORDER);
    CHECK(std::string(rh_last_error()).rfind("search: ", 0) == 0);

    REQUIRE(rh_prepare(c.handle) == RH_OK);
    REQUIRE(rh_extract(c.handle) == RH_OK);
    double g = -1, full = -1;
    REQUIRE(rh_baseline(c.handle, &g, &full) == RH_OK);
    CHECK(g >= 0.0);
    CHECK(full <= 1.0);
    rh_text* maps = nullptr;
    REQUIRE(rh_search(c.handle, &maps) == RH_OK);
    CHECK(take(maps).find("selected=") != std::string::npos);
    REQUIRE(rh_evaluate(c.handle) == RH_OK);
    rh_text* report = nullptr;
    REQUIRE(rh_report(c.handle, &report) == RH_OK);
    const std::string json = take(report);
    CHECK(json.find("\"enhanced\"") != std::string::npos);
    CHECK(json.find("\"basic\"") != std::string::npos);
  }
}
