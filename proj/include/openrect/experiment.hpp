#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "openrect/classifiers.hpp"
#include "openrect/dataset.hpp"
#include "openrect/metrics.hpp"
#include "openrect/rtscv.hpp"
#include "openrect/separability.hpp"
#include "openrect/theory.hpp"

namespace openrect {

enum class Engine { Rtscv, Csi, Pre };

Engine engine_from_string(const std::string& name);
std::string to_string(Engine engine);

struct SweepSpec {
  /// sample_rate | folds | separability
  std::string axis = "sample_rate";
  std::vector<double> levels;
  int replicates = 10;
  /// Holdout mode is run as an extra level of a folds sweep when set.
  bool include_holdout = false;
  ScatterMode separability_mode = ScatterMode::KnownVsKnown;
  SweepAxis separability_axis = SweepAxis::Spread;
};

struct ExperimentConfig {
  // Dataset: exactly one of synthetic / csv_path.
  std::optional<GaussianMixtureSpec> synthetic;
  std::size_t n_per_component = 200;
  std::filesystem::path csv_path;
  CsvOptions csv;
  /// Project CSV features onto this many principal components first (0 = off).
  int pca_components = 0;

  /// Unknown classes by label name (CSV) or class id (synthetic).
  std::vector<std::string> uu_classes;
  double split_fraction = 0.5;
  nlohmann::json classifier = {{"kind", "gda"}};
  RtscvConfig rtscv;
  Engine engine = Engine::Rtscv;
  Seed seed = 0;
  std::optional<SweepSpec> sweep;
  int boundary_resolution = 200;

  /// Relative csv paths resolve against this directory.
  std::filesystem::path base_dir;

  void validate() const;
};

/// Parses a config document; unknown keys and type errors raise ValidationError.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Loads or generates the full labeled dataset for a config and seed.
struct LoadedData {
  Dataset data;
  LabelMap label_map;
};
LoadedData load_dataset(const ExperimentConfig& config, Seed seed);

/// Scenario from the config's unknown-class selection.
OpenSetScenario build_scenario(const ExperimentConfig& config, const LoadedData& loaded, Seed seed);

struct ExperimentResult {
  EvalReport report;
  Engine engine = Engine::Rtscv;
  Seed seed = 0;
  int n_known = 0;
  int n_uu_classes = 0;
  /// Openness with the target set taken as all test classes.
  double openness_all_targets = 0.0;
  /// Absent for the pre-rectified engine.
  std::optional<RtscvOutcome> outcome;
  std::shared_ptr<Classifier> model;
};

/// Fits with the configured engine and evaluates on the test rows left out
/// of the random sample (the same rows for every engine at a given seed).
ExperimentResult run_experiment(const ExperimentConfig& config, Seed seed);
ExperimentResult run_on_scenario(const ExperimentConfig& config, const OpenSetScenario& scenario,
                                 Seed seed);

std::string result_csv_header();
std::string result_csv_row(const ExperimentResult& result);

/// Writes report.csv, outcome.json and model.json under out_dir.
void write_experiment(const ExperimentResult& result, const ExperimentConfig& config,
                      const std::filesystem::path& out_dir);

struct SweepCell {
  double level = 0.0;
  int replicate = 0;
  Seed seed = 0;
  std::optional<double> j1;
  std::optional<ExperimentResult> result;
  std::string error;
};

struct SweepSummary {
  double level = 0.0;
  std::string label;
  std::size_t n_ok = 0;
  double macro_f_mean = 0.0, macro_f_ci95 = 0.0;
  double overall_mean = 0.0, overall_ci95 = 0.0;
  double detection_mean = 0.0;
  double classification_mean = 0.0;
  std::optional<double> j1_mean;
};

struct SweepOutput {
  std::vector<SweepCell> cells;  // level-major, then replicate
  std::vector<SweepSummary> summary;
};

/// Level -1 in a folds sweep stands for holdout mode.
SweepOutput run_sweep(const ExperimentConfig& config, const SweepSpec& spec);
void write_sweep(const SweepOutput& out, const std::filesystem::path& out_dir);

/// Mean and half-width of a normal-approximation 95% interval.
std::pair<double, double> mean_ci95(const std::vector<double>& values);

/// n families cycling through d in {1, 2, 5, 16} and 2 to 4 known classes.
std::vector<SpecFamily> random_families(std::size_t n, Seed seed);

/// Writes theorems.csv; returns the number of violations.
std::size_t write_theorem_table(const std::vector<TheoremCheck>& checks,
                                const std::filesystem::path& out_csv);

struct BoundaryGrid {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  int resolution = 1;
  /// resolution x resolution, row r is the r-th y value from the bottom.
  std::vector<Label> labels;
  Label dummy = 0;
  Dataset points;                // X-tilde features with their labels
  std::vector<Origin> origins;   // per point
};

/// Fits the base classifier on the augmented set (training rows plus the
/// sample labeled as the dummy class) and labels a grid over the data range.
BoundaryGrid export_boundary(const ExperimentConfig& config, int resolution, Seed seed);
void write_boundary(const BoundaryGrid& grid, const std::filesystem::path& out_dir,
                    int pixels_per_cell = 0);

}  // namespace openrect
