#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "openrect/csi.hpp"
#include "openrect/error.hpp"
#include "openrect/experiment.hpp"
#include "openrect/metrics.hpp"
#include "support.hpp"

using namespace openrect;
using openrect::testing::blobs;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("seeded_kmeans: a tight single-class sample stays with its class") {
  // The class seed is the class mean itself, so it coincides with the sample
  // mean that seeds the unknown cluster; the tie goes to the class.
  const Dataset sample = blobs({{10, 0}}, 200, 0.3, 4);
  const Vector own = sample.features.colwise().mean().transpose();
  const std::vector<Vector> seeds = {v2(0, 0), own, v2(0, 10)};
  const auto r = seeded_kmeans(sample.features, seeds);
  const auto hits = std::count(r.assignments.begin(), r.assignments.end(), 1);
  CHECK(static_cast<double>(hits) / 200.0 >= 0.95);
  CHECK(r.centers.size() == 4);
  for (const auto& c : r.centers) CHECK(c.allFinite());

  // A seed merely near the class mean competes with the sample-mean seed and
  // the blob is shared between the two clusters.
  const auto split = seeded_kmeans(sample.features, {v2(0, 0), v2(10, 0), v2(0, 10)});
  MESSAGE("class share with a nearby seed: "
          << std::count(split.assignments.begin(), split.assignments.end(), 1) / 200.0);
}

TEST_CASE("seeded_kmeans: one known class plus one distant unknown cluster") {
  const Dataset known = blobs({{0, 0}}, 100, 1.0, 2);
  Dataset far = blobs({{15, 15}}, 100, 1.0, 3);
  const Matrix sample = (Matrix(200, 2) << known.features, far.features).finished();
  const auto r = seeded_kmeans(sample, {v2(0, 0)});
  const auto recall = std::count(r.assignments.begin() + 100, r.assignments.end(), 1);
  CHECK(static_cast<double>(recall) / 100.0 >= 0.9);
  CHECK(r.converged);
}

TEST_CASE("seeded_kmeans: zero iterations give nearest-seed assignments") {
  const std::vector<Vector> seeds = {v2(0, 0), v2(6, 0)};
  const Dataset sample = blobs({{0, 0}, {6, 0}, {3, 8}}, 20, 1.0, 5);
  KmeansOptions opt;
  opt.max_iter = 0;
  const auto r = seeded_kmeans(sample.features, seeds, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 0);
  std::vector<Vector> all = seeds;
  all.push_back(sample.features.colwise().mean().transpose());
  for (Eigen::Index i = 0; i < sample.features.rows(); ++i) {
    Label best = 0;
    for (std::size_t c = 1; c < all.size(); ++c)
      if ((sample.features.row(i).transpose() - all[c]).squaredNorm() <
          (sample.features.row(i).transpose() - all[static_cast<std::size_t>(best)]).squaredNorm())
        best = static_cast<Label>(c);
    CHECK(r.assignments[static_cast<std::size_t>(i)] == best);
  }
}

TEST_CASE("seeded_kmeans: monotone WCSS, determinism and optimality at convergence") {
  const Dataset sample = blobs({{0, 0}, {4, 1}, {2, 5}, {7, 7}}, 60, 1.5, 9);
  const std::vector<Vector> seeds = {v2(0, 0), v2(4, 1), v2(2, 5)};
  const auto a = seeded_kmeans(sample.features, seeds);
  const auto b = seeded_kmeans(sample.features, seeds);
  CHECK(a.assignments == b.assignments);
  CHECK(a.wcss_history == b.wcss_history);
  for (std::size_t i = 1; i < a.wcss_history.size(); ++i)
    CHECK(a.wcss_history[i] <= a.wcss_history[i - 1] + 1e-9);
  REQUIRE(a.converged);
  for (Eigen::Index i = 0; i < sample.features.rows(); ++i) {
    const Vector x = sample.features.row(i).transpose();
    const auto own = static_cast<std::size_t>(a.assignments[static_cast<std::size_t>(i)]);
    for (std::size_t c = 0; c < a.centers.size(); ++c) {
      const double dc = (x - a.centers[c]).squaredNorm(), d_own = (x - a.centers[own]).squaredNorm();
      // A later cluster must be closer by a relative 1e-12 to win a tie.
      if (c < own) CHECK(dc > d_own);
      if (c > own) CHECK(dc >= d_own * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("seeded_kmeans: an empty cluster keeps its seed") {
  const Dataset sample = blobs({{0, 0}}, 30, 0.2, 1);
  const auto r = seeded_kmeans(sample.features, {v2(0, 0), v2(100, 100)});
  CHECK(r.centers[1].isApprox(v2(100, 100)));
  CHECK(std::count(r.assignments.begin(), r.assignments.end(), 1) == 0);
  CHECK_THROWS_AS(seeded_kmeans(sample.features, {}), ValidationError);
  CHECK_THROWS_AS(seeded_kmeans(Matrix(0, 2), {v2(0, 0)}), EmptyInputError);
}

TEST_CASE("csi_rectify: outcome contract matches rectify") {
  const auto config = load_config(OPENRECT_SOURCE_DIR "/configs/csi_one_cluster.json");
  const auto loaded = load_dataset(config, config.seed);
  const auto sc = build_scenario(config, loaded, config.seed);
  RtscvConfig cfg = config.rtscv;
  cfg.seed = 2;
  auto factory = make_factory(config.classifier);
  const auto o = csi_rectify(sc.train, sc.test, factory, cfg);
  CHECK(o.engine == "csi");
  CHECK(o.rectified_model->n_classes() == sc.n_known() + 1);
  CHECK(o.rectified_train.size() == sc.train.size() + o.uu_set.size());
  CHECK_FALSE(o.uu_set.empty());
  for (auto i : o.uu_set) {
    CHECK(i < o.sample.sample.size());
    CHECK(o.sample.sample.labels[i] == sc.dummy_label());  // far cluster is clean
  }
  // Same sample as rectify under the same seed, so the engines compare on equal rows.
  const auto r = rectify(sc.train, sc.test, factory, cfg);
  CHECK(r.sample.sample_indices == o.sample.sample_indices);
  const auto& rest = o.sample.remainder;
  const double f_csi = macro_f_measure(rest.labels, o.rectified_model->predict(rest.features),
                                       sc.n_known() + 1);
  const double f_rt = macro_f_measure(rest.labels, r.rectified_model->predict(rest.features),
                                      sc.n_known() + 1);
  CHECK(std::abs(f_csi - f_rt) <= 0.03);
  CHECK(outcome_to_json(o)["engine"] == "csi");
}

TEST_CASE("csi_rectify: no unknowns in the test set") {
  auto spec = testing::ring_spec(6.0, 0.3, 0.5, 8);
  auto sc = make_scenario(generate_gaussian(spec, 200), std::vector<Label>{10}, 0.5, 1);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < sc.test.size(); ++i)
    if (sc.test.labels[i] != sc.dummy_label()) keep.push_back(i);
  Dataset test = sc.test.subset(keep);
  test.n_classes = sc.n_known();
  RtscvConfig cfg;
  cfg.seed = 6;
  auto factory = make_factory({{"kind", "gda"}});
  const auto o = csi_rectify(sc.train, test, factory, cfg);
  CHECK(static_cast<double>(o.uu_set.size()) / static_cast<double>(o.sample.sample.size()) <= 0.10);
}
