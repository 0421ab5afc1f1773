// openrect: run, sweep, verify-theorems, export-boundary, convert-idx, pca.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "openrect/error.hpp"
#include "openrect/experiment.hpp"
#include "openrect/io.hpp"
#include "openrect/pca.hpp"

using namespace openrect;

namespace {

constexpr const char* kConfigHelp = R"(Config file (JSON). Fields and defaults:
  dataset            {"synthetic": <mixture>, "n_per_component": 200}
                     or {"csv": PATH, "header": true, "label_column": -1, "pca": 0}
  uu_classes         []        label names (csv) or class ids (synthetic)
  split_fraction     0.5       train share of the stratified split
  classifier         {"kind": "gda"}  gda | svm | knn | tree | mlp
  rtscv              {"c": 0.1, "k": 3, "mode": "kfold", "holdout_fraction": 0.5,
                      "restrict_uu_to_sample": true}
  engine             "rtscv"   rtscv | csi | pre
  seed               0
  sweep              {"axis": "sample_rate" | "folds" | "separability",
                      "levels": [...], "replicates": 10, "include_holdout": false,
                      "mode": "known" | "uu", "vary": "spread" | "variance"}
  boundary_resolution 200)";

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<Seed> seed;
  std::optional<std::string> engine;
  bool quiet = false;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.engine) cfg.engine = engine_from_string(*c.engine);
  return cfg;
}

void say(const Common& c, const std::string& line) {
  if (!c.quiet) std::cout << line << "\n";
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-set rectification experiments"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool engine) {
    sub->add_option("--config", common.config, kConfigHelp)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "Override the config seed");
    if (engine)
      sub->add_option("--engine", common.engine, "Override the config engine")
          ->check(CLI::IsMember({"rtscv", "csi", "pre"}));
    sub->add_flag("--quiet", common.quiet, "No progress output");
  };

  auto* run = app.add_subcommand("run", "Rectify and evaluate one scenario");
  add_common(run, true);

  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over the levels of one axis");
  add_common(sweep, true);
  std::optional<int> replicates;
  sweep->add_option("--replicates", replicates, "Seeds per level (default: config, else 10)");

  auto* verify = app.add_subcommand("verify-theorems",
                                    "Check the guarantee conditions against Monte Carlo");
  std::string families_path, verify_out = "out/theorems.csv";
  std::size_t n_random = 0, mc_samples = 1000000;
  Seed verify_seed = 0;
  bool verify_quiet = false;
  verify->add_option("--families", families_path, "Spec family JSON")->check(CLI::ExistingFile);
  verify->add_option("--random", n_random, "Generate this many random families instead");
  verify->add_option("--samples", mc_samples, "Monte-Carlo draws per class")->capture_default_str();
  verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();
  verify->add_option("--out", verify_out, "Verdict CSV")->capture_default_str();
  std::string save_families;
  verify->add_option("--save-families", save_families, "Also write the checked families as JSON");
  verify->add_flag("--quiet", verify_quiet, "No summary output");
  verify->add_option("--config", families_path, "Alias for --families")->check(CLI::ExistingFile);

  auto* boundary = app.add_subcommand("export-boundary", "Label a grid over 2-D data");
  add_common(boundary, false);
  std::optional<int> resolution;
  boundary->add_option("--resolution", resolution, "Cells per side (default: config)");

  auto* idx = app.add_subcommand("convert-idx", "Convert IDX image and label files to CSV");
  std::string idx_images, idx_labels, idx_out;
  idx->add_option("--images", idx_images, "Image file (may be gzipped)")->required();
  idx->add_option("--labels", idx_labels, "Label file (may be gzipped)")->required();
  idx->add_option("--out", idx_out, "Output CSV")->required();

  auto* pca = app.add_subcommand("pca", "Project a CSV dataset onto its principal components");
  std::string pca_in, pca_out;
  int pca_components = 0;
  bool pca_no_header = false;
  pca->add_option("--input", pca_in, "Input CSV (label in the last column)")->required();
  pca->add_option("--components", pca_components, "Number of components")->required();
  pca->add_option("--out", pca_out, "Output CSV")->required();
  pca->add_flag("--no-header", pca_no_header, "Input has no header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const auto cfg = load(common);
      const auto result = run_experiment(cfg, cfg.seed);
      write_experiment(result, cfg, common.out);
      say(common, to_string(result.engine) + ": macro F " + pct(result.report.macro_f) +
                      ", detection " + pct(result.report.detection_acc) + ", classification " +
                      pct(result.report.classification_acc) + " -> " + common.out);
    } else if (*sweep) {
      auto cfg = load(common);
      if (!cfg.sweep) throw ValidationError("config has no 'sweep' section");
      SweepSpec spec = *cfg.sweep;
      if (replicates) {
        if (*replicates < 1) throw ValidationError("--replicates must be >= 1");
        spec.replicates = *replicates;
      }
      const auto out = run_sweep(cfg, spec);
      write_sweep(out, common.out);
      for (const auto& s : out.summary)
        say(common, s.label + " " + std::to_string(s.level) + ": macro F " +
                        (s.n_ok ? pct(s.macro_f_mean) : std::string("gap")) + " (" +
                        std::to_string(s.n_ok) + " ok)");
    } else if (*verify) {
      std::vector<SpecFamily> families;
      if (n_random > 0) {
        families = random_families(n_random, verify_seed);
      } else {
        if (families_path.empty()) throw ValidationError("give --families PATH or --random N");
        std::ifstream in(families_path);
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(0, families_path + ": " + e.what());
        }
        families = families_from_json(doc);
      }
      if (!save_families.empty()) {
        std::ofstream f(save_families);
        if (!f) throw IoError("cannot write " + save_families);
        f << families_to_json(families).dump(2) << "\n";
      }
      if (mc_samples < 2) throw ValidationError("--samples must be >= 2");
      const auto checks = verify_families(families, mc_samples, verify_seed);
      const auto violations = write_theorem_table(checks, verify_out);
      std::size_t satisfied = 0;
      for (const auto& c : checks) satisfied += c.verdict.satisfied;
      if (!verify_quiet)
        std::cout << families.size() << " families, " << checks.size() << " checks, " << satisfied
                  << " conditions satisfied, " << violations << " violations -> " << verify_out
                  << "\n";
    } else if (*boundary) {
      const auto cfg = load(common);
      const auto grid = export_boundary(cfg, resolution.value_or(cfg.boundary_resolution), cfg.seed);
      write_boundary(grid, common.out);
      say(common, "boundary grid " + std::to_string(grid.resolution) + "x" +
                      std::to_string(grid.resolution) + " -> " + common.out);
    } else if (*idx) {
      convert_idx_to_csv(idx_images, idx_labels, idx_out);
    } else if (*pca) {
      CsvOptions opts;
      opts.header = !pca_no_header;
      const auto loaded = load_csv(pca_in, opts);
      PcaModel model;
      const Dataset projected = pca_project(loaded.data, pca_components, &model);
      std::vector<std::string> names;
      for (int i = 0; i < pca_components; ++i) names.push_back("pc" + std::to_string(i));
      write_csv(pca_out, projected, &loaded.label_map, names);
      for (std::size_t i = 0; i < model.explained_variance_ratio.size(); ++i)
        std::printf("pc%zu explained_variance_ratio %.6f\n", i, model.explained_variance_ratio[i]);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
