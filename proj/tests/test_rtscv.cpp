#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <numeric>

#include "openrect/error.hpp"
#include "openrect/experiment.hpp"
#include "openrect/metrics.hpp"
#include "openrect/rtscv.hpp"
#include "support.hpp"

using namespace openrect;
using openrect::testing::blobs;
using openrect::testing::ring_spec;

namespace {

ClassifierFactory gda() { return make_factory({{"kind", "gda"}}); }

OpenSetScenario ring_scenario(double uu_x, Seed seed, std::vector<Label> uu = {10}) {
  auto spec = ring_spec(6.0, 0.3, 0.5, seed);
  spec.components.back().mean << uu_x, 0.0;
  return make_scenario(generate_gaussian(spec, 200), uu, 0.5, derive_seed(seed, 10));
}

Dataset known_rows_only(const Dataset& test, Label dummy) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (test.labels[i] != dummy) keep.push_back(i);
  Dataset out = test.subset(keep);
  out.n_classes = dummy;
  return out;
}

AugmentedDataset augmented_blobs(Seed seed) {
  Dataset known = blobs({{0, 0}, {20, 0}, {0, 20}}, 30, 0.5, seed);
  Dataset far = blobs({{20, 20}}, 12, 0.5, seed + 1);
  far.n_classes = 3;
  return augment(known, far, 3);
}

void check_outcome_invariants(const RtscvOutcome& o, const Dataset& train) {
  const Label dummy = train.n_classes;
  CHECK(o.rectified_model->n_classes() == train.n_classes + 1);
  CHECK(o.dummy_label() == dummy);
  CHECK(std::is_sorted(o.uu_set.begin(), o.uu_set.end()));
  for (auto i : o.uu_set) CHECK(i < o.sample.sample.size());

  const auto& bar = o.rectified_train;
  REQUIRE(bar.size() == train.size() + o.uu_set.size());
  CHECK(bar.features.topRows(static_cast<Eigen::Index>(train.size())) == train.features);
  CHECK(std::equal(train.labels.begin(), train.labels.end(), bar.labels.begin()));
  for (std::size_t j = 0; j < o.uu_set.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(train.size() + j);
    CHECK(bar.labels[static_cast<std::size_t>(row)] == dummy);
    CHECK(bar.features.row(row) ==
          o.sample.sample.features.row(static_cast<Eigen::Index>(o.uu_set[j])));
  }
  CHECK(o.diagnostics.n_uu == o.uu_set.size());
  CHECK(o.diagnostics.n_sample == o.sample.sample.size());
}

}  // namespace

TEST_CASE("rectify: a test set without unknowns yields few dummy representatives") {
  auto sc = ring_scenario(0.0, 5);
  const Dataset test = known_rows_only(sc.test, sc.dummy_label());
  RtscvConfig cfg;
  cfg.seed = 7;
  auto o = rectify(sc.train, test, gda(), cfg);
  REQUIRE(o.diagnostics.n_sample > 0);
  const double share =
      static_cast<double>(o.diagnostics.n_uu) / static_cast<double>(o.diagnostics.n_sample);
  CHECK(share <= 0.10);
  check_outcome_invariants(o, sc.train);
}

TEST_CASE("rectify: far unknown cluster is detected on the held-out rows") {
  auto sc = ring_scenario(30.0, 2);
  RtscvConfig cfg;
  cfg.seed = 3;
  auto o = rectify(sc.train, sc.test, gda(), cfg);
  const auto& rest = o.sample.remainder;
  const auto pred = o.rectified_model->predict(rest.features);
  const auto det = detection_accuracy(rest.labels, pred, sc.dummy_label());
  REQUIRE(det.has_value());
  CHECK(*det >= 0.95);
  check_outcome_invariants(o, sc.train);
}

TEST_CASE("rectify: a sample rate that selects no rows is rejected") {
  auto sc = ring_scenario(0.0, 1);
  const Dataset small = sc.test.subset(std::vector<std::size_t>{0, 1, 2, 3});
  RtscvConfig cfg;
  cfg.c = 0.1;  // round(0.4) = 0
  CHECK_THROWS_AS(rectify(sc.train, small, gda(), cfg), ValidationError);
  cfg.c = 0.0;
  CHECK_THROWS_AS(rectify(sc.train, sc.test, gda(), cfg), ValidationError);
  cfg.c = 0.1;
  cfg.k = 1;
  CHECK_THROWS_AS(rectify(sc.train, sc.test, gda(), cfg), ValidationError);
}

TEST_CASE("cv_relabel: separable classes keep their labels out of fold") {
  const auto aug = augmented_blobs(4);
  const auto cv = cv_relabel(aug, gda(), 2, 9);
  REQUIRE(cv.predictions.size() == aug.data.size());
  for (std::size_t i = 0; i < aug.n_train; ++i) CHECK(cv.predictions[i] == aug.data.labels[i]);
  for (std::size_t i = aug.n_train; i < aug.data.size(); ++i) CHECK(cv.predictions[i] == 3);
}

TEST_CASE("cv_relabel: every row gets exactly one prediction under any seed") {
  const auto aug = augmented_blobs(8);
  for (Seed s : {1u, 2u, 3u}) {
    for (int k : {2, 3, 5}) {
      const auto cv = cv_relabel(aug, gda(), k, s);
      CHECK(cv.fold_valid_sizes.size() == static_cast<std::size_t>(k));
      CHECK(std::accumulate(cv.fold_valid_sizes.begin(), cv.fold_valid_sizes.end(),
                            std::size_t{0}) == aug.data.size());
      CHECK(std::none_of(cv.predictions.begin(), cv.predictions.end(),
                         [](Label l) { return l < 0; }));
    }
  }
  auto plan = kfold_indices(aug.data.size(), 3, aug.data.labels, 5);
  std::vector<int> seen(aug.data.size(), 0);
  for (const auto& f : plan.folds)
    for (auto i : f.valid) ++seen[i];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST_CASE("cv_relabel: k equal to the row count is leave-one-out") {
  Dataset known = blobs({{0, 0}, {10, 0}}, 5, 0.3, 2);
  Dataset far = blobs({{5, 10}}, 4, 0.3, 3);
  far.n_classes = 2;
  const auto aug = augment(known, far, 2);
  const int n = static_cast<int>(aug.data.size());
  const auto cv = cv_relabel(aug, gda(), n, 1);
  CHECK(cv.fold_valid_sizes.size() == aug.data.size());
  for (auto s : cv.fold_valid_sizes) CHECK(s == 1);
  CHECK_FALSE(cv.stratified);
  for (std::size_t i = 0; i < aug.data.size(); ++i) CHECK(cv.predictions[i] == aug.data.labels[i]);
}

TEST_CASE("rectify: containment, label-space growth and determinism") {
  auto sc = ring_scenario(0.0, 11);
  RtscvConfig cfg;
  cfg.seed = 21;
  auto a = rectify(sc.train, sc.test, gda(), cfg);
  auto b = rectify(sc.train, sc.test, gda(), cfg);
  check_outcome_invariants(a, sc.train);
  CHECK(a.uu_set == b.uu_set);
  CHECK(a.cv_predictions == b.cv_predictions);
  CHECK(a.sample.sample_indices == b.sample.sample_indices);
  CHECK(a.rectified_model->probabilities(sc.test.features) ==
        b.rectified_model->probabilities(sc.test.features));

  const auto test_idx = a.uu_test_indices();
  for (std::size_t j = 0; j < test_idx.size(); ++j)
    CHECK(test_idx[j] == a.sample.sample_indices[a.uu_set[j]]);

  auto json = outcome_to_json(a, "model.json");
  CHECK(json["uu_set"].get<std::vector<std::size_t>>() == a.uu_set);
  CHECK(json["n_classes"] == sc.n_known() + 1);
  CHECK(json["model"] == "model.json");
  CHECK(json["config"]["k"] == 3);
}

TEST_CASE("rectify: literal reading lets dummy-predicted training rows join X_u") {
  // Unknown sits on top of class 0, so some training rows look like the dummy.
  auto sc = ring_scenario(6.0, 13);
  RtscvConfig cfg;
  cfg.seed = 4;
  cfg.restrict_uu_to_sample = false;
  auto o = rectify(sc.train, sc.test, gda(), cfg);
  CHECK(o.diagnostics.n_train_predicted_dummy > 0);
  CHECK(o.rectified_train.size() ==
        sc.train.size() + o.uu_set.size() + o.diagnostics.n_train_predicted_dummy);
  CHECK_FALSE(o.diagnostics.warnings.empty());

  cfg.restrict_uu_to_sample = true;
  auto r = rectify(sc.train, sc.test, gda(), cfg);
  CHECK(r.rectified_train.size() == sc.train.size() + r.uu_set.size());
  CHECK(r.uu_set == o.uu_set);
}

TEST_CASE("rectify: holdout mode and k = 2 satisfy the same invariants") {
  auto sc = ring_scenario(0.0, 6);
  RtscvConfig cfg;
  cfg.seed = 2;
  cfg.k = 2;
  auto kf = rectify(sc.train, sc.test, gda(), cfg);
  cfg.mode = CvMode::Holdout;
  cfg.holdout_fraction = 0.5;
  auto ho = rectify(sc.train, sc.test, gda(), cfg);
  check_outcome_invariants(kf, sc.train);
  check_outcome_invariants(ho, sc.train);
  CHECK(ho.diagnostics.fold_sizes.size() == 1);
  // Rows outside the holdout slice carry no prediction.
  CHECK(std::count(ho.cv_predictions.begin(), ho.cv_predictions.end(), -1) > 0);
  CHECK(std::count(kf.cv_predictions.begin(), kf.cv_predictions.end(), -1) == 0);
}

TEST_CASE("rectify: fold without dummy rows is flagged, not fatal") {
  Dataset known = blobs({{0, 0}, {10, 0}}, 20, 0.3, 2);
  Dataset test = blobs({{5, 10}}, 10, 0.3, 3);
  test.n_classes = 2;
  RtscvConfig cfg;
  cfg.c = 0.1;  // a single sample row, so at most one fold trains on it
  cfg.k = 3;
  auto o = rectify(known, test, gda(), cfg);
  CHECK(o.diagnostics.n_sample == 1);
  CHECK(o.diagnostics.fold_without_dummy);
  CHECK_FALSE(o.diagnostics.warnings.empty());
  check_outcome_invariants(o, known);
}

TEST_CASE("search_sample_rate: contract and the synthetic benchmark range") {
  auto sc = ring_scenario(0.0, 1);
  auto one = search_sample_rate(sc.train, sc.test, gda(), {0.07}, 3, 1);
  CHECK(one.best_c == 0.07);
  CHECK(one.curve.size() == 1);

  const std::vector<double> grid = {0.02, 0.04, 0.06, 0.08, 0.10, 0.15, 0.25};
  auto cfg = load_config(OPENRECT_SOURCE_DIR "/configs/synthetic.json");
  auto loaded = load_dataset(cfg, cfg.seed);
  auto bench = build_scenario(cfg, loaded, cfg.seed);
  auto s = search_sample_rate(bench.train, bench.test, make_factory(cfg.classifier), grid, 3,
                              cfg.seed);
  REQUIRE(s.curve.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.curve[i].first == grid[i]);
    CHECK(s.curve[i].second >= 0.0);
    CHECK(s.curve[i].second <= 1.0);
  }
  CHECK(s.best_c >= 0.06);
  CHECK(s.best_c <= 0.10);
  CHECK_THROWS_AS(search_sample_rate(sc.train, sc.test, gda(), {}, 3, 1), ValidationError);
}

TEST_CASE("search_folds: single candidate and curve shape") {
  auto sc = ring_scenario(0.0, 3);
  auto one = search_folds(sc.train, sc.test, gda(), 0.1, {2}, 1);
  CHECK(one.best_k == 2);
  REQUIRE(one.curve.size() == 1);

  auto all = search_folds(sc.train, sc.test, gda(), 0.1, {2, 3, 4, 5, 6}, 1);
  REQUIRE(all.curve.size() == 5);
  double lo = 1, hi = 0;
  for (const auto& [k, f] : all.curve) {
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  CHECK(hi - lo <= 0.05);
  CHECK(std::any_of(all.curve.begin(), all.curve.end(),
                    [&](const auto& p) { return p.first == all.best_k && p.second == hi; }));
}

TEST_CASE("rectify: cost stays within 3(k+1) single fits") {
  auto sc = ring_scenario(0.0, 4);
  RtscvConfig cfg;
  cfg.seed = 1;
  auto factory = make_factory({{"kind", "svm"}});
  using clock = std::chrono::steady_clock;
  auto best_of = [](int reps, auto&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = clock::now();
      fn();
      best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count());
    }
    return best;
  };
  const double single = best_of(5, [&] { factory()->fit(sc.train); });
  const double full = best_of(5, [&] { rectify(sc.train, sc.test, factory, cfg); });
  MESSAGE("single fit " << single << " s, rectify " << full << " s");
  CHECK(full <= 3.0 * (cfg.k + 1) * single);
}

TEST_CASE("rectify: rectified beats pre-rectified at every openness level") {
  const std::vector<std::vector<Label>> uu_sets = {{10}, {9, 10}, {7, 8, 9, 10}, {5, 6, 7, 8, 9, 10}};
  for (const auto& uu : uu_sets) {
    auto spec = ring_spec(6.0, 0.3, 0.5, 1);
    auto sc = make_scenario(generate_gaussian(spec, 200), uu, 0.5, 9);
    RtscvConfig cfg;
    cfg.seed = 5;
    auto o = rectify(sc.train, sc.test, gda(), cfg);
    const auto& rest = o.sample.remainder;
    const int m = sc.n_known();
    auto pre = gda()();
    pre->fit(sc.train);
    const double f_pre = macro_f_measure(rest.labels, pre->predict(rest.features), m + 1);
    const double f_rect =
        macro_f_measure(rest.labels, o.rectified_model->predict(rest.features), m + 1);
    INFO("u.u. classes " << uu.size() << ": pre " << f_pre << ", rectified " << f_rect);
    CHECK(f_rect > f_pre);
  }
}
