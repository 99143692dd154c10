// Command-line front end over the regionharvest C API.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regionharvest/regionharvest.h"

namespace {

struct ConfigDeleter {
  void operator()(rh_config* c) const { rh_config_destroy(c); }
};
struct TextDeleter {
  void operator()(rh_text* t) const { rh_text_destroy(t); }
};
using ConfigPtr = std::unique_ptr<rh_config, ConfigDeleter>;
using TextPtr = std::unique_ptr<rh_text, TextDeleter>;

class CliError : public std::runtime_error {
 public:
  CliError(rh_status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int exit_code() const { return static_cast<int>(status_) + 1; }

 private:
  rh_status status_;
};

void check(rh_status status, const char* context) {
  if (status != RH_OK)
    throw CliError(status, std::string(context) + ": " + rh_status_name(status) + ": " + rh_last_error());
}

// Flags shared by the pipeline subcommands; unset flags leave the config alone.
struct PipelineFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<double> hmcr, par, bw;
  std::optional<int> ni, hms;
  std::optional<std::string> classifier;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "INI-style config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "master seed (falls back to REGIONHARVEST_SEED)");
    app->add_option("--variant", variant, "enhanced|basic|both")
        ->check(CLI::IsMember({"enhanced", "basic", "both"}));
    app->add_option("--hmcr", hmcr, "harmony memory consideration rate");
    app->add_option("--par", par, "pitch adjustment rate");
    app->add_option("--bw", bw, "pitch adjustment radius (region indices)");
    app->add_option("--ni", ni, "generations per subset size");
    app->add_option("--hms", hms, "harmony memory size");
    app->add_option("--classifier", classifier, "linear|centroid")->check(CLI::IsMember({"linear", "centroid"}));
    app->add_option("--out", out, "output directory");
    app->add_option("--manifest", manifest, "CSV manifest of image_path,label (default: synthetic corpus)");
    app->add_option("--set", sets, "extra config override key=value")->take_all();
  }

  ConfigPtr build() const {
    rh_config* raw = nullptr;
    check(rh_config_create(&raw), "config");
    ConfigPtr config(raw);
    if (!config_path.empty()) check(rh_config_load_file(config.get(), config_path.c_str()), "config file");
    const auto set = [&](const char* key, const std::string& value) {
      check(rh_config_set(config.get(), key, value.c_str()), key);
    };
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CliError(RH_ERR_INVALID_ARGUMENT, "--set expects key=value: " + kv);
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    const auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    if (manifest) set("dataset.manifest", *manifest);
    if (variant) set("search.variant", *variant);
    if (classifier) set("classifier.kind", *classifier);
    if (hmcr) {
      set("enhanced.hmcr", num(*hmcr));
      set("basic.hmcr", num(*hmcr));
    }
    if (par) {
      set("enhanced.par", num(*par));
      set("basic.par", num(*par));
    }
    if (hms) {
      set("enhanced.hms", std::to_string(*hms));
      set("basic.hms", std::to_string(*hms));
    }
    if (bw) set("enhanced.bw", num(*bw));
    if (ni) set("enhanced.ni", std::to_string(*ni));
    if (out) set("out", *out);
    if (seed) {
      set("seed", std::to_string(*seed));
    } else if (!rh_config_is_set(config.get(), "seed")) {
      if (const char* env = std::getenv("REGIONHARVEST_SEED")) set("seed", env);
    }
    return config;
  }
};

std::string take(rh_text* raw) {
  TextPtr text(raw);
  return std::string(rh_text_data(text.get()), rh_text_size(text.get()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regionharvest: region sampling with harmony search for glyph recognition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rh_version()));

  PipelineFlags flags;
  struct Phase {
    const char* name;
    const char* help;
  };
  const std::vector<Phase> phases = {
      {"prepare", "load, binarize, normalize and split the dataset"},
      {"extract", "compute longest-run region features for every split"},
      {"baseline", "validation accuracy with global-only and all 84 features"},
      {"search", "select local regions with harmony search"},
      {"evaluate", "test accuracy and predict timing for full and selected regions"},
      {"report", "assemble report.json and the accuracy/timing tables"},
      {"run", "all phases in order"},
      {"config", "print the effective configuration and its hash"},
  };
  std::map<std::string, CLI::App*> phase_cmds;
  for (const auto& p : phases) {
    auto* cmd = app.add_subcommand(p.name, p.help);
    flags.attach(cmd);
    phase_cmds[p.name] = cmd;
  }

  int dim = 5, hms = 30, ni = 50000;
  double lo = -10, hi = 10, hmcr = 0.9, par = 0.3, bw = 0.5;
  std::uint64_t bench_seed = 0;
  std::string csv_path;
  auto* bench = app.add_subcommand("bench-hs", "continuous harmony search on the sphere function");
  bench->add_option("--dim", dim, "dimension")->capture_default_str();
  bench->add_option("--lo", lo, "lower bound")->capture_default_str();
  bench->add_option("--hi", hi, "upper bound")->capture_default_str();
  bench->add_option("--hms", hms)->capture_default_str();
  bench->add_option("--hmcr", hmcr)->capture_default_str();
  bench->add_option("--par", par)->capture_default_str();
  bench->add_option("--bw", bw)->capture_default_str();
  bench->add_option("--ni", ni)->capture_default_str();
  bench->add_option("--seed", bench_seed)->capture_default_str();
  bench->add_option("--csv", csv_path, "trajectory CSV (improvisation,best_value)");

  int classes = 10, per_class = 100;
  double noise = 0.05;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic glyph corpus with a manifest");
  synth->add_option("--classes", classes)->capture_default_str();
  synth->add_option("--per-class", per_class)->capture_default_str();
  synth->add_option("--noise", noise)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out", synth_out, "output directory")->required();

  std::vector<int> map_indices;
  auto* map = app.add_subcommand("region-map", "print the 4x4 map for a set of level-2 regions");
  map->add_option("indices", map_indices, "selected region indices (0..15)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) {
      const rh_hs_params p{hms, hmcr, par, bw, ni, bench_seed};
      double best = 0;
      int monotone = 0;
      check(rh_bench_sphere(dim, lo, hi, &p, csv_path.empty() ? nullptr : csv_path.c_str(), &best, &monotone),
            "bench-hs");
      std::printf("best_value=%.6e monotone=%s\n", best, monotone ? "yes" : "no");
      return 0;
    }
    if (synth->parsed()) {
      check(rh_synth_write(classes, per_class, noise, synth_seed, synth_out.c_str()), "synth");
      std::printf("wrote %d samples to %s\n", classes * per_class, synth_out.c_str());
      return 0;
    }
    if (map->parsed()) {
      rh_text* text = nullptr;
      check(rh_region_map(map_indices.data(), map_indices.size(), &text), "region-map");
      std::cout << take(text);
      return 0;
    }

    const auto config = flags.build();
    const rh_config* cfg = config.get();
    if (phase_cmds["config"]->parsed()) {
      rh_text* text = nullptr;
      check(rh_config_render(cfg, &text), "config");
      std::cout << take(text);
      check(rh_config_hash(cfg, &text), "config");
      std::cout << "# hash " << take(text) << "\n";
    } else if (phase_cmds["prepare"]->parsed()) {
      check(rh_prepare(cfg), "prepare");
    } else if (phase_cmds["extract"]->parsed()) {
      check(rh_extract(cfg), "extract");
    } else if (phase_cmds["baseline"]->parsed()) {
      double global_only = 0, full = 0;
      check(rh_baseline(cfg, &global_only, &full), "baseline");
      std::printf("global_only_validation=%.6f full_validation=%.6f\n", global_only, full);
    } else if (phase_cmds["search"]->parsed()) {
      rh_text* text = nullptr;
      check(rh_search(cfg, &text), "search");
      std::cout << take(text);
    } else if (phase_cmds["evaluate"]->parsed()) {
      check(rh_evaluate(cfg), "evaluate");
    } else if (phase_cmds["report"]->parsed()) {
      rh_text* text = nullptr;
      check(rh_report(cfg, &text), "report");
      std::cout << take(text);
    } else if (phase_cmds["run"]->parsed()) {
      rh_text* text = nullptr;
      check(rh_run_pipeline(cfg, &text), "run");
      std::cout << take(text);
    }
  } catch (const CliError& e) {
    std::cerr << "regionharvest: " << e.what() << "\n";
    return e.exit_code();
  }
  return 0;
}
