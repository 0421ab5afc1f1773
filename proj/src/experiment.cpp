#include "openrect/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>
#include <set>

#include "openrect/csi.hpp"
#include "openrect/error.hpp"
#include "openrect/io.hpp"
#include "openrect/parallel.hpp"
#include "openrect/pca.hpp"

namespace openrect {

using nlohmann::json;

Engine engine_from_string(const std::string& name) {
  if (name == "rtscv") return Engine::Rtscv;
  if (name == "csi") return Engine::Csi;
  if (name == "pre") return Engine::Pre;
  throw ValidationError("engine must be rtscv, csi or pre, got '" + name + "'");
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::Rtscv: return "rtscv";
    case Engine::Csi: return "csi";
    case Engine::Pre: return "pre";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (synthetic.has_value() == !csv_path.empty())
    throw ValidationError("dataset: give exactly one of 'synthetic' or 'csv'");
  if (synthetic) synthetic->validate();
  if (n_per_component < 1) throw ValidationError("dataset.n_per_component must be >= 1");
  if (pca_components < 0) throw ValidationError("dataset.pca must be >= 0");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ValidationError("split_fraction must lie in (0, 1)");
  rtscv.validate();
  make_factory(classifier);
  if (boundary_resolution < 1) throw ValidationError("boundary_resolution must be >= 1");
  if (sweep) {
    static const std::set<std::string> axes = {"sample_rate", "folds", "separability"};
    if (!axes.count(sweep->axis))
      throw ValidationError("sweep.axis must be sample_rate, folds or separability");
    if (sweep->levels.empty() && !sweep->include_holdout)
      throw ValidationError("sweep.levels must not be empty");
    if (sweep->replicates < 1) throw ValidationError("sweep.replicates must be >= 1");
    if (sweep->axis == "separability" && !synthetic)
      throw ValidationError("separability sweeps need a synthetic dataset");
  }
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ValidationError(where + ": unknown field '" + key + "'");
}

SweepSpec parse_sweep(const json& j) {
  reject_unknown(j, {"axis", "levels", "replicates", "include_holdout", "mode", "vary"}, "sweep");
  SweepSpec s;
  s.axis = j.value("axis", s.axis);
  s.levels = j.value("levels", s.levels);
  s.replicates = j.value("replicates", s.replicates);
  s.include_holdout = j.value("include_holdout", false);
  const std::string mode = j.value("mode", std::string("known"));
  if (mode == "known")
    s.separability_mode = ScatterMode::KnownVsKnown;
  else if (mode == "uu")
    s.separability_mode = ScatterMode::KnownVsUu;
  else
    throw ValidationError("sweep.mode must be 'known' or 'uu'");
  const std::string vary = j.value("vary", std::string("spread"));
  if (vary == "spread")
    s.separability_axis = SweepAxis::Spread;
  else if (vary == "variance")
    s.separability_axis = SweepAxis::Variance;
  else
    throw ValidationError("sweep.vary must be 'spread' or 'variance'");
  return s;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    reject_unknown(doc,
                   {"dataset", "uu_classes", "split_fraction", "classifier", "rtscv", "engine",
                    "seed", "sweep", "boundary_resolution", "description"},
                   "config");
    const json& ds = doc.at("dataset");
    reject_unknown(ds, {"synthetic", "n_per_component", "csv", "header", "label_column", "pca"},
                   "dataset");
    if (ds.contains("synthetic")) cfg.synthetic = ds.at("synthetic").get<GaussianMixtureSpec>();
    if (ds.contains("csv")) cfg.csv_path = ds.at("csv").get<std::string>();
    cfg.n_per_component = ds.value("n_per_component", cfg.n_per_component);
    cfg.csv.header = ds.value("header", true);
    if (ds.contains("label_column")) {
      const auto& lc = ds.at("label_column");
      if (lc.is_string())
        cfg.csv.label_column = lc.get<std::string>();
      else
        cfg.csv.label_column = lc.get<long>();
    }
    cfg.pca_components = ds.value("pca", 0);

    if (doc.contains("uu_classes")) {
      for (const auto& u : doc.at("uu_classes"))
        cfg.uu_classes.push_back(u.is_string() ? u.get<std::string>() : u.dump());
    }
    cfg.split_fraction = doc.value("split_fraction", cfg.split_fraction);
    if (doc.contains("classifier")) cfg.classifier = doc.at("classifier");
    if (doc.contains("rtscv")) cfg.rtscv = doc.at("rtscv").get<RtscvConfig>();
    cfg.engine = engine_from_string(doc.value("engine", std::string("rtscv")));
    cfg.seed = doc.value("seed", Seed{0});
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
    cfg.boundary_resolution = doc.value("boundary_resolution", cfg.boundary_resolution);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config.classifier: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

LoadedData load_dataset(const ExperimentConfig& config, Seed seed) {
  LoadedData out;
  if (config.synthetic) {
    GaussianMixtureSpec spec = *config.synthetic;
    spec.seed = derive_seed(spec.seed, seed);
    out.data = generate_gaussian(spec, config.n_per_component);
    for (int c = 0; c < out.data.n_classes; ++c) out.label_map.names.push_back(std::to_string(c));
    return out;
  }
  auto path = config.csv_path;
  if (path.is_relative() && !config.base_dir.empty() && !std::filesystem::exists(path))
    path = config.base_dir / path;
  auto loaded = load_csv(path, config.csv);
  out.data = std::move(loaded.data);
  out.label_map = std::move(loaded.label_map);
  if (config.pca_components > 0) out.data = pca_project(out.data, config.pca_components);
  return out;
}

OpenSetScenario build_scenario(const ExperimentConfig& config, const LoadedData& loaded,
                               Seed seed) {
  std::vector<Label> ids;
  for (const auto& name : config.uu_classes) ids.push_back(loaded.label_map.id_of(name));
  return make_scenario(loaded.data, ids, config.split_fraction, derive_seed(seed, 10));
}

namespace {

RtscvConfig rtscv_for(const ExperimentConfig& config, Seed seed) {
  RtscvConfig cfg = config.rtscv;
  cfg.seed = derive_seed(seed, 11);
  return cfg;
}

}  // namespace

ExperimentResult run_on_scenario(const ExperimentConfig& config, const OpenSetScenario& sc,
                                 Seed seed) {
  const auto factory = make_factory(config.classifier);
  const RtscvConfig cfg = rtscv_for(config, seed);
  const int m = sc.n_known();
  const int n_uu = static_cast<int>(sc.uu_class_ids.size());

  ExperimentResult r;
  r.engine = config.engine;
  r.seed = seed;
  r.n_known = m;
  r.n_uu_classes = n_uu;

  Dataset remainder;
  Matrix probs;
  std::vector<double> uu_score;
  if (config.engine == Engine::Pre) {
    auto model = factory();
    model->fit(sc.train);
    if (std::floor(cfg.c * static_cast<double>(sc.test.size()) + 0.5) < 1.0)
      throw ValidationError("rtscv.c selects no test rows");
    remainder = sample_test(sc.test, cfg.c, derive_seed(cfg.seed, 1)).remainder;
    probs = model->probabilities(remainder.features);
    for (Eigen::Index i = 0; i < probs.rows(); ++i) uu_score.push_back(1.0 - probs.row(i).maxCoeff());
    r.model = std::move(model);
  } else {
    RtscvOutcome outcome = config.engine == Engine::Rtscv
                               ? rectify(sc.train, sc.test, factory, cfg)
                               : csi_rectify(sc.train, sc.test, factory, cfg);
    remainder = outcome.sample.remainder;
    probs = outcome.rectified_model->probabilities(remainder.features);
    for (Eigen::Index i = 0; i < probs.rows(); ++i) uu_score.push_back(probs(i, m));
    r.model = outcome.rectified_model;
    r.outcome = std::move(outcome);
  }
  const std::vector<Label> pred = r.model->predict(remainder.features);
  const double open = openness(m, m + n_uu, m).value;
  r.report = evaluate(remainder.labels, pred, m, uu_score, open);
  r.openness_all_targets = openness(m, m + n_uu, m + n_uu).value;
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config, Seed seed) {
  const auto loaded = load_dataset(config, seed);
  const auto sc = build_scenario(config, loaded, seed);
  return run_on_scenario(config, sc, seed);
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

json report_json(const EvalReport& r) {
  json conf = json::array();
  for (int t = 0; t < r.confusion.size(); ++t) {
    json row = json::array();
    for (int p = 0; p < r.confusion.size(); ++p) row.push_back(r.confusion.at(t, p));
    conf.push_back(row);
  }
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"openness", r.openness},
          {"macro_f", r.macro_f},
          {"classification_acc", opt(r.classification_acc)},
          {"detection_acc", opt(r.detection_acc)},
          {"auroc", opt(r.auroc)},
          {"overall_acc", r.overall_acc},
          {"confusion", conf}};
}

}  // namespace

std::string result_csv_header() {
  return "seed,n_known,n_uu_classes," + report_csv_header() + ",openness_all_targets,n_uu_found,engine";
}

std::string result_csv_row(const ExperimentResult& r) {
  return std::to_string(r.seed) + "," + std::to_string(r.n_known) + "," +
         std::to_string(r.n_uu_classes) + "," + report_csv_row(r.report) + "," +
         num(r.openness_all_targets) + "," +
         (r.outcome ? std::to_string(r.outcome->uu_set.size()) : std::string()) + "," +
         to_string(r.engine);
}

void write_experiment(const ExperimentResult& result, const ExperimentConfig& config,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "report.csv", result_csv_header() + "\n" + result_csv_row(result) + "\n");
  json doc;
  doc["engine"] = to_string(result.engine);
  doc["seed"] = result.seed;
  doc["classifier"] = config.classifier;
  doc["report"] = report_json(result.report);
  doc["openness_all_targets"] = result.openness_all_targets;
  if (result.outcome) doc["outcome"] = outcome_to_json(*result.outcome, "model.json");
  write_text(out_dir / "outcome.json", doc.dump(2) + "\n");
  write_text(out_dir / "model.json", save_model(*result.model).dump() + "\n");
}

// ---------------------------------------------------------------------------
// Sweeps

std::pair<double, double> mean_ci95(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return {mean, 1.959963984540054 * sd / std::sqrt(static_cast<double>(values.size()))};
}

namespace {

constexpr double kHoldoutLevel = -1.0;

std::string sweep_mode_label(const SweepSpec& spec, double level) {
  if (spec.axis == "folds") return level == kHoldoutLevel ? "holdout" : "kfold";
  if (spec.axis == "separability")
    return std::string(spec.separability_mode == ScatterMode::KnownVsKnown ? "known_" : "uu_") +
           (spec.separability_axis == SweepAxis::Spread ? "spread" : "variance");
  return spec.axis;
}

void run_cell(const ExperimentConfig& base, const SweepSpec& spec, SweepCell& cell) {
  ExperimentConfig cfg = base;
  if (spec.axis == "sample_rate") {
    cfg.rtscv.c = cell.level;
  } else if (spec.axis == "folds") {
    if (cell.level == kHoldoutLevel) {
      cfg.rtscv.mode = CvMode::Holdout;
    } else {
      cfg.rtscv.mode = CvMode::KFold;
      cfg.rtscv.k = static_cast<int>(std::lround(cell.level));
    }
  }
  cfg.rtscv.validate();

  if (spec.axis == "separability") {
    SeparabilitySweep sw;
    sw.base = *cfg.synthetic;
    for (const auto& name : cfg.uu_classes) {
      try {
        sw.uu_class_ids.push_back(std::stoi(name));
      } catch (const std::exception&) {
        throw ValidationError("synthetic uu class '" + name + "' is not a class id");
      }
    }
    sw.mode = spec.separability_mode;
    sw.axis = spec.separability_axis;
    cfg.synthetic = apply_level(sw, cell.level);
    const auto loaded = load_dataset(cfg, cell.seed);
    cell.j1 = scatter_summary(empirical_moments(loaded.data), sw.uu_class_ids, sw.mode).j1;
    cell.result = run_on_scenario(cfg, build_scenario(cfg, loaded, cell.seed), cell.seed);
    return;
  }
  cell.result = run_experiment(cfg, cell.seed);
}

}  // namespace

SweepOutput run_sweep(const ExperimentConfig& config, const SweepSpec& spec) {
  std::vector<double> levels = spec.levels;
  if (spec.axis == "folds" && spec.include_holdout) levels.push_back(kHoldoutLevel);

  SweepOutput out;
  for (double level : levels)
    for (int r = 0; r < spec.replicates; ++r)
      out.cells.push_back({level, r, config.seed + static_cast<Seed>(r), {}, {}, {}});

  parallel_for(out.cells.size(), [&](std::size_t i) {
    SweepCell& cell = out.cells[i];
    try {
      run_cell(config, spec, cell);
    } catch (const Error& e) {
      cell.result.reset();
      cell.error = e.what();
    }
  });

  for (std::size_t li = 0; li < levels.size(); ++li) {
    SweepSummary s;
    s.level = levels[li];
    s.label = sweep_mode_label(spec, levels[li]);
    std::vector<double> f, acc, det, cls, j;
    for (const auto& cell : out.cells) {
      if (cell.level != levels[li] || !cell.result) continue;
      ++s.n_ok;
      f.push_back(cell.result->report.macro_f);
      acc.push_back(cell.result->report.overall_acc);
      if (cell.result->report.detection_acc) det.push_back(*cell.result->report.detection_acc);
      if (cell.result->report.classification_acc)
        cls.push_back(*cell.result->report.classification_acc);
      if (cell.j1) j.push_back(*cell.j1);
    }
    std::tie(s.macro_f_mean, s.macro_f_ci95) = mean_ci95(f);
    std::tie(s.overall_mean, s.overall_ci95) = mean_ci95(acc);
    s.detection_mean = mean_ci95(det).first;
    s.classification_mean = mean_ci95(cls).first;
    if (!j.empty()) s.j1_mean = mean_ci95(j).first;
    out.summary.push_back(s);
  }
  return out;
}

void write_sweep(const SweepOutput& out, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string summary =
      "level,n_ok,macro_f_mean,macro_f_ci95,overall_acc_mean,overall_acc_ci95,detection_acc_mean,"
      "classification_acc_mean,j1_mean,mode\n";
  for (const auto& s : out.summary) {
    // A level with no successful replicate is a gap: its metric cells stay empty.
    const bool gap = s.n_ok == 0;
    summary += num(s.level) + "," + std::to_string(s.n_ok) + "," +
               (gap ? "," : num(s.macro_f_mean) + "," + num(s.macro_f_ci95) + ",") +
               (gap ? "," : num(s.overall_mean) + "," + num(s.overall_ci95) + ",") +
               num(s.detection_mean) + "," + num(s.classification_mean) + "," + num(s.j1_mean) +
               "," + s.label + "\n";
  }
  write_text(out_dir / "sweep.csv", summary);

  std::string rows = "level,replicate,seed,j1," + report_csv_header() + ",status\n";
  for (const auto& c : out.cells) {
    rows += num(c.level) + "," + std::to_string(c.replicate) + "," + std::to_string(c.seed) + "," +
            num(c.j1) + ",";
    if (c.result)
      rows += report_csv_row(c.result->report) + ",ok\n";
    else
      rows += ",,,,,,error\n";
  }
  write_text(out_dir / "sweep_replicates.csv", rows);

  std::string errors;
  for (const auto& c : out.cells)
    if (!c.result) errors += num(c.level) + " replicate " + std::to_string(c.replicate) + ": " + c.error + "\n";
  if (!errors.empty()) write_text(out_dir / "sweep_errors.txt", errors);
}

// ---------------------------------------------------------------------------
// Theorems

std::vector<SpecFamily> random_families(std::size_t n, Seed seed) {
  static const int dims[] = {1, 2, 5, 16};
  std::vector<SpecFamily> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    out.push_back(random_family(rng, dims[i % 4], 2 + static_cast<int>(i % 3)));
  }
  return out;
}

std::size_t write_theorem_table(const std::vector<TheoremCheck>& checks,
                                const std::filesystem::path& out_csv) {
  std::string text = theorem_csv_header() + "\n";
  std::size_t violations = 0;
  for (const auto& c : checks) {
    text += theorem_csv_row(c) + "\n";
    violations += c.violation;
  }
  if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
  write_text(out_csv, text);
  return violations;
}

// ---------------------------------------------------------------------------
// Decision boundaries

BoundaryGrid export_boundary(const ExperimentConfig& config, int resolution, Seed seed) {
  if (resolution < 1) throw ValidationError("resolution must be >= 1");
  const auto loaded = load_dataset(config, seed);
  if (loaded.data.dim() != 2)
    throw DimensionError("boundary export needs 2-D data, got d = " +
                         std::to_string(loaded.data.dim()));
  const auto sc = build_scenario(config, loaded, seed);
  const RtscvConfig cfg = rtscv_for(config, seed);
  if (std::floor(cfg.c * static_cast<double>(sc.test.size()) + 0.5) < 1.0)
    throw ValidationError("rtscv.c selects no test rows");
  const auto sample = sample_test(sc.test, cfg.c, derive_seed(cfg.seed, 1));
  Dataset unlabeled = sample.sample;
  unlabeled.n_classes = sc.train.n_classes;
  std::fill(unlabeled.labels.begin(), unlabeled.labels.end(), 0);
  const auto aug = augment(sc.train, unlabeled, sc.train.n_classes);

  auto model = make_factory(config.classifier)();
  model->fit(aug.data);

  BoundaryGrid g;
  g.resolution = resolution;
  g.dummy = sc.train.n_classes;
  g.points = aug.data;
  for (const auto& p : aug.provenance) g.origins.push_back(p.origin);
  const Matrix& f = aug.data.features;
  const double pad_x = 0.05 * (f.col(0).maxCoeff() - f.col(0).minCoeff()) + 1e-9;
  const double pad_y = 0.05 * (f.col(1).maxCoeff() - f.col(1).minCoeff()) + 1e-9;
  g.x_min = f.col(0).minCoeff() - pad_x;
  g.x_max = f.col(0).maxCoeff() + pad_x;
  g.y_min = f.col(1).minCoeff() - pad_y;
  g.y_max = f.col(1).maxCoeff() + pad_y;

  Matrix cells(static_cast<Eigen::Index>(resolution) * resolution, 2);
  for (int r = 0; r < resolution; ++r)
    for (int c = 0; c < resolution; ++c) {
      const auto row = static_cast<Eigen::Index>(r) * resolution + c;
      cells(row, 0) = g.x_min + (c + 0.5) * (g.x_max - g.x_min) / resolution;
      cells(row, 1) = g.y_min + (r + 0.5) * (g.y_max - g.y_min) / resolution;
    }
  g.labels = model->predict(cells);
  return g;
}

void write_boundary(const BoundaryGrid& g, const std::filesystem::path& out_dir,
                    int pixels_per_cell) {
  std::filesystem::create_directories(out_dir);
  const int res = g.resolution;
  auto cx = [&](int c) { return g.x_min + (c + 0.5) * (g.x_max - g.x_min) / res; };
  auto cy = [&](int r) { return g.y_min + (r + 0.5) * (g.y_max - g.y_min) / res; };

  std::string grid = "x,y,label\n";
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c)
      grid += num(cx(c)) + "," + num(cy(r)) + "," +
              std::to_string(g.labels[static_cast<std::size_t>(r) * res + c]) + "\n";
  write_text(out_dir / "boundary_grid.csv", grid);

  std::string pts = "x,y,from_sample,label\n";
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    pts += num(g.points.features(row, 0)) + "," + num(g.points.features(row, 1)) + "," +
           (g.origins[i] == Origin::Sample ? "1" : "0") + "," + std::to_string(g.points.labels[i]) +
           "\n";
  }
  write_text(out_dir / "boundary_points.csv", pts);

  const int scale = pixels_per_cell > 0 ? pixels_per_cell : std::max(1, 600 / res);
  const int w = res * scale, h = res * scale;
  std::vector<Rgb> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int r = res - 1 - y / scale;  // top of the image is y_max
      const int c = x / scale;
      Rgb col = class_color(g.labels[static_cast<std::size_t>(r) * res + c], g.dummy);
      // Lighten the background so the points stand out.
      if (g.labels[static_cast<std::size_t>(r) * res + c] != g.dummy)
        col = {static_cast<std::uint8_t>((col.r + 2 * 255) / 3),
               static_cast<std::uint8_t>((col.g + 2 * 255) / 3),
               static_cast<std::uint8_t>((col.b + 2 * 255) / 3)};
      px[static_cast<std::size_t>(y) * w + x] = col;
    }
  auto plot = [&](int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < w && y < h) px[static_cast<std::size_t>(y) * w + x] = c;
  };
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const int x = static_cast<int>((g.points.features(row, 0) - g.x_min) / (g.x_max - g.x_min) * w);
    const int y = h - 1 - static_cast<int>((g.points.features(row, 1) - g.y_min) / (g.y_max - g.y_min) * h);
    if (g.origins[i] == Origin::Sample) {
      // Triangle, white so it shows on the black dummy region too.
      for (int dy = 0; dy < 5; ++dy)
        for (int dx = -dy / 2; dx <= dy / 2; ++dx) plot(x + dx, y - 2 + dy, {255, 255, 255});
    } else {
      const Rgb c = class_color(g.points.labels[i], g.dummy);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) plot(x + dx, y + dy, c);
    }
  }
  write_png(out_dir / "boundary.png", w, h, px);
}

}  // namespace openrect
