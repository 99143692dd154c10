#include <doctest.h>

#include <fstream>
#include <sstream>

#include "regionharvest/error.hpp"
#include "regionharvest/experiment.hpp"
#include "test_util.hpp"

using namespace rh;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(const fs::path& out, std::uint64_t seed) {
  ExperimentConfig c = ExperimentConfig::from_map({{"dataset.synthetic.classes", "3"},
                                                   {"dataset.synthetic.per_class", "10"},
                                                   {"classifier.kind", "centroid"},
                                                   {"enhanced.ni", "3"},
                                                   {"enhanced.size_max", "3"},
                                                   {"timing.calls", "1000"},
                                                   {"timing.repeats", "1"}});
  c.seed = seed;
  c.out_dir = out;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config text parsing") {
    const auto m = parse_config_text(
        "# comment\nseed = 7\n\n[enhanced]\nhmcr = 0.7 ; trailing\nni=10\n[dataset.synthetic]\nclasses = 5\n");
    CHECK(m.at("seed") == "7");
    CHECK(m.at("enhanced.ni") == "10");
    CHECK(m.at("dataset.synthetic.classes") == "5");
    const auto c = ExperimentConfig::from_map(m);
    CHECK(c.seed == 7);
    CHECK(c.enhanced.hs.ni == 10);
    CHECK(c.synthetic_classes == 5);
  }

  TEST_CASE("config map round trip and hash") {
    ExperimentConfig c;
    c.seed = 99;
    c.enhanced.hs.hmcr = 0.7;
    c.classifier.kind = ClassifierKind::NearestCentroid;
    c.variants = parse_variant("basic");
    const auto back = ExperimentConfig::from_map(c.to_map());
    CHECK(back.to_map() == c.to_map());
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);

    ExperimentConfig d = c;
    d.out_dir = "/somewhere/else";
    CHECK(config_hash(d) == config_hash(c));
    d.seed = 100;
    CHECK(config_hash(d) != config_hash(c));
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"no.such.key", "1"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"enhanced.ni", "ten"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"search.variant", "neither"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"timing.calls", "10"}}), Error);
  }

  TEST_CASE("region map and reduction") {
    std::vector<int> all(16);
    for (int i = 0; i < 16; ++i) all[i] = i;
    const auto full = render_region_map(RegionSubset::all());
    CHECK(full.find("selected=16 rejected=0") != std::string::npos);
    for (int i = 0; i < 16; ++i) {
      char cell[8];
      std::snprintf(cell, sizeof cell, "[%2d]", i);
      CHECK(full.find(cell) != std::string::npos);
    }
    const auto none = render_region_map(RegionSubset{});
    CHECK(none.find("selected=0 rejected=16") != std::string::npos);
    CHECK(none.find('[') == std::string::npos);

    const auto nine = RegionSubset::from_indices({0, 1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(render_region_map(nine).find("selected=9 rejected=7 reduction=43.75%") != std::string::npos);
    CHECK(region_reduction(nine) == 7.0 / 16.0);
    CHECK(format_percent(region_reduction(nine)) == "43.75");
    CHECK(format_percent(region_reduction(RegionSubset::from_indices({1, 2}))) == "87.50");
  }

  TEST_CASE("strip_timing removes timing members at any depth") {
    const std::string in = R"({"a":1,"timing":{"x":2},"b":{"wall_clock_seconds":3,"c":[{"timing":4,"d":5}]}})";
    const std::string out = strip_timing(in);
    CHECK(out.find("timing") == std::string::npos);
    CHECK(out.find("wall_clock_seconds") == std::string::npos);
    CHECK(out.find("\"d\": 5") != std::string::npos);
  }

  TEST_CASE("search refuses to run before extraction") {
    const auto dir = test::scratch_dir("phase-order");
    const auto c = tiny_config(dir, 1);
    try {
      run_search(c);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PhaseOrder);
      CHECK(std::string(e.what()).rfind("search: ", 0) == 0);
    }
    run_prepare(c);
    CHECK_THROWS_AS(run_search(c), Error);
  }

  TEST_CASE("pipeline outputs, gating and round trips") {
    const auto dir = test::scratch_dir("pipeline-enhanced");
    auto c = tiny_config(dir, 7);
    c.variants = parse_variant("enhanced");
    const RunReport report = run_pipeline(c);

    CHECK(report.enhanced.has_value());
    CHECK_FALSE(report.basic.has_value());
    CHECK(report.enhanced->feature_count == feature_length(report.enhanced->selection.best_subset));
    CHECK(report.config_hash == config_hash(c));

    const std::string json = slurp(dir / "report.json");
    CHECK(json.find("\"basic\"") == std::string::npos);
    CHECK(report_to_json(report_from_json(json)) == json);

    const std::string acc = slurp(dir / "table_accuracy.csv");
    CHECK(acc.find("dataset,present_work,basic_hs,without_sampling\n") != std::string::npos);
    const std::string timing = slurp(dir / "table_timing.csv");
    CHECK(timing.find("dataset,present_work,basic_hs,without_sampling\n") != std::string::npos);

    // Every artefact carries the config hash.
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension();
      if (ext != ".json" && ext != ".csv") continue;
      CHECK_MESSAGE(slurp(entry.path()).find(report.config_hash) != std::string::npos, entry.path());
    }
    const auto selection = selection_from_json(slurp(dir / "results" / "enhanced.json"));
    CHECK(selection.best_subset == report.enhanced->selection.best_subset);
    CHECK(selection.per_size.size() == 3);
  }

  TEST_CASE("pipeline is reproducible apart from timing") {
    const auto a = run_pipeline(tiny_config(test::scratch_dir("repro-a"), 11));
    const auto b = run_pipeline(tiny_config(test::scratch_dir("repro-b"), 11));
    CHECK(strip_timing(report_to_json(a)) == strip_timing(report_to_json(b)));
    REQUIRE(a.basic.has_value());
    CHECK(a.basic->selection.requests == a.enhanced->selection.requests);
  }

  TEST_CASE("bench_sphere writes a monotone trajectory") {
    const auto dir = test::scratch_dir("bench");
    const auto r = bench_sphere(3, -5, 5, {10, 0.9, 0.3, 0.5, 300, 2}, dir / "t.csv");
    std::istringstream in(slurp(dir / "t.csv"));
    std::string line;
    int rows = 0;
    double prev = 1e300;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("improvisation", 0) == 0) continue;
      const double v = std::stod(line.substr(line.find(',') + 1));
      CHECK(v <= prev);
      prev = v;
      ++rows;
    }
    CHECK(rows == 300);
    CHECK(prev == r.best.fitness);
  }
}
