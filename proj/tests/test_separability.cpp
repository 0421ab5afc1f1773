#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "openrect/error.hpp"
#include "openrect/metrics.hpp"
#include "openrect/separability.hpp"
#include "support.hpp"

using namespace openrect;

namespace {

SquareMatrix random_cov(Rng& rng, int d) {
  std::normal_distribution<double> n(0, 1);
  SquareMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return a * a.transpose() / d;
}

double min_eigenvalue(const SquareMatrix& m) {
  Eigen::SelfAdjointEigenSolver<SquareMatrix> es(m);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("between_scatter: hand cases and loop oracle") {
  Vector e1 = Vector::Zero(3);
  e1[0] = 1;
  std::vector<Vector> pm = {e1, -e1};
  std::vector<double> w = {0.5, 0.5};
  const SquareMatrix sb = between_scatter(pm, w, Vector::Zero(3));
  CHECK(sb.isApprox(e1 * e1.transpose()));

  std::vector<Vector> same(4, e1);
  std::vector<double> w4(4, 0.25);
  CHECK(between_scatter(same, w4, e1).isZero());

  Rng rng(2);
  std::normal_distribution<double> n(0, 1);
  std::vector<Vector> means(5, Vector(3));
  std::vector<double> ww = {0.1, 0.3, 0.2, 0.25, 0.15};
  for (auto& m : means)
    for (int j = 0; j < 3; ++j) m[j] = n(rng);
  Vector ref(3);
  ref << 0.3, -0.2, 1.0;
  SquareMatrix oracle = SquareMatrix::Zero(3, 3);
  for (std::size_t i = 0; i < means.size(); ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        oracle(a, b) += ww[i] * (means[i][a] - ref[a]) * (means[i][b] - ref[b]);
  CHECK((between_scatter(means, ww, ref) - oracle).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(between_scatter(means, ww, Vector::Zero(2)), DimensionError);
}

TEST_CASE("within_scatter and j1: identities") {
  Rng rng(7);
  std::vector<SquareMatrix> covs = {random_cov(rng, 3), random_cov(rng, 3)};
  std::vector<double> w1 = {1.0};
  CHECK(within_scatter(std::vector{covs[0]}, w1).isApprox(covs[0]));
  std::vector<SquareMatrix> iso(3, 2.5 * SquareMatrix::Identity(3, 3));
  std::vector<double> w3 = {0.2, 0.5, 0.3};
  CHECK(within_scatter(iso, w3).isApprox(2.5 * SquareMatrix::Identity(3, 3)));
  std::vector<double> w2 = {0.7, 0.3};
  CHECK(within_scatter(covs, w2).isApprox(0.7 * covs[0] + 0.3 * covs[1]));

  const SquareMatrix sw = SquareMatrix::Identity(2, 2);
  CHECK(j1(SquareMatrix::Zero(2, 2), sw) == 1.0);
  CHECK(j1(sw, sw) == 2.0);
  CHECK_THROWS_AS(j1(sw, SquareMatrix::Zero(2, 2)), SingularScatterError);
}

TEST_CASE("scatter_summary: PSD, trace identity and both modes") {
  auto spec = testing::ring_spec(5.0, 0.4, 1.5, 3);
  const std::vector<Label> uu = {10};
  const auto moments = spec_moments(spec);
  for (auto mode : {ScatterMode::KnownVsKnown, ScatterMode::KnownVsUu}) {
    const auto s = scatter_summary(moments, uu, mode);
    CHECK(s.s_b.isApprox(s.s_b.transpose()));
    CHECK(s.s_w.isApprox(s.s_w.transpose()));
    CHECK(min_eigenvalue(s.s_b) >= -1e-9);
    CHECK(min_eigenvalue(s.s_w) >= -1e-9);
    CHECK(std::abs((s.s_b + s.s_w).trace() - (s.s_b.trace() + s.s_w.trace())) < 1e-12);
    CHECK(s.j1 >= 1.0);
  }
  // Ring of radius 5, equal weights: trace S_b = 25, trace S_w = 2 * 0.4.
  const auto kk = scatter_summary(moments, uu, ScatterMode::KnownVsKnown);
  CHECK(kk.s_b.trace() == doctest::Approx(25.0));
  CHECK(kk.j1 == doctest::Approx(1.0 + 25.0 / 0.8));
  // Known-vs-uu: reference is the unknown mean (origin), S_w its covariance.
  const auto ku = scatter_summary(moments, uu, ScatterMode::KnownVsUu);
  CHECK(ku.s_w.isApprox(1.5 * SquareMatrix::Identity(2, 2)));
  CHECK(ku.j1 == doctest::Approx(1.0 + 25.0 / 3.0));
  CHECK_THROWS_AS(scatter_summary(moments, std::vector<Label>{}, ScatterMode::KnownVsUu),
                  ValidationError);
}

TEST_CASE("scatter_summary: empirical moments agree with the generating spec") {
  auto spec = testing::ring_spec(4.0, 0.5, 2.0, 11);
  spec.components[3].variance = 1.2;
  const std::vector<Label> uu = {10};
  const Dataset data = generate_gaussian(spec, 10000);  // 1.1e5 rows
  const auto emp = empirical_moments(data);
  const auto ref = spec_moments(spec);
  for (auto mode : {ScatterMode::KnownVsKnown, ScatterMode::KnownVsUu}) {
    const auto a = scatter_summary(emp, uu, mode);
    const auto b = scatter_summary(ref, uu, mode);
    CHECK((a.s_b - b.s_b).norm() / b.s_b.trace() < 0.02);
    CHECK((a.s_w - b.s_w).norm() / b.s_w.trace() < 0.02);
    CHECK(a.j1 == doctest::Approx(b.j1).epsilon(0.02));
  }
}

TEST_CASE("spec_moments: components sharing a class merge into a mixture") {
  GaussianMixtureSpec spec;
  for (double x : {-2.0, 2.0}) {
    GaussianComponent c;
    c.mean = Vector::Zero(2);
    c.mean[0] = x;
    c.variance = 0.5;
    c.weight = 0.5;
    spec.components.push_back(c);
  }
  const auto m = spec_moments(spec);
  REQUIRE(m.weights.size() == 1);
  CHECK(m.means[0].norm() < 1e-15);
  CHECK(m.covs[0](0, 0) == doctest::Approx(4.5));
  CHECK(m.covs[0](1, 1) == doctest::Approx(0.5));
}

TEST_CASE("j1: invariant to a common rescaling of the data") {
  const Dataset data = generate_gaussian(testing::ring_spec(3.0, 0.6, 1.0, 5), 100);
  Dataset big = data;
  big.features *= 7.5;
  const std::vector<Label> uu = {10};
  for (auto mode : {ScatterMode::KnownVsKnown, ScatterMode::KnownVsUu})
    CHECK(scatter_summary(empirical_moments(big), uu, mode).j1 ==
          doctest::Approx(scatter_summary(empirical_moments(data), uu, mode).j1).epsilon(1e-12));
}

TEST_CASE("j1: a degenerate dataset is singular") {
  Dataset d;
  d.features = Matrix::Zero(4, 2);
  d.features(2, 0) = d.features(3, 0) = 5.0;
  d.labels = {0, 0, 1, 1};
  d.n_classes = 2;
  CHECK_THROWS_AS(scatter_summary(empirical_moments(d), std::vector<Label>{},
                                  ScatterMode::KnownVsKnown),
                  SingularScatterError);
}

TEST_CASE("sweep_separability: J1 tracks accuracy; single level and degenerate level") {
  SeparabilitySweep sweep;
  sweep.base = testing::ring_spec(6.0, 0.3, 0.5, 1);
  sweep.uu_class_ids = {10};
  sweep.n_per_component = 100;
  sweep.levels = {0.2, 0.35, 0.5, 0.65, 0.8, 1.0};
  auto factory = make_factory({{"kind", "gda"}});
  RtscvConfig cfg;
  cfg.seed = 1;
  const auto pts = sweep_separability(sweep, factory, cfg);
  REQUIRE(pts.size() == sweep.levels.size());
  std::vector<double> j, acc;
  for (const auto& p : pts) {
    CHECK_FALSE(p.skipped);
    j.push_back(p.j1);
    acc.push_back(p.accuracy);
  }
  CHECK(spearman(j, acc) > 0.0);

  sweep.levels = {0.5};
  CHECK(sweep_separability(sweep, factory, cfg).size() == 1);

  // Variances so small that every known row equals its mean exactly.
  SeparabilitySweep flat = sweep;
  flat.base.components.resize(4);
  for (std::size_t i = 0; i < 4; ++i) {
    flat.base.components[i].mean << 100.0 + 10.0 * static_cast<double>(i % 2),
        100.0 + 10.0 * static_cast<double>(i / 2);
    flat.base.components[i].variance = 1e-300;
    flat.base.components[i].weight = 0.25;
  }
  flat.base.components[3].class_id = 10;
  flat.levels = {1.0};
  const auto degenerate = sweep_separability(flat, factory, cfg);
  REQUIRE(degenerate.size() == 1);
  CHECK(degenerate[0].skipped);
  CHECK_FALSE(degenerate[0].note.empty());
}

TEST_CASE("apply_level: spread and variance axes touch only the selected side") {
  SeparabilitySweep sweep;
  sweep.base = testing::ring_spec(6.0, 0.3, 0.5, 1);
  sweep.uu_class_ids = {10};
  sweep.mode = ScatterMode::KnownVsKnown;
  const auto s = apply_level(sweep, 0.5);
  CHECK(s.components[0].mean[0] == doctest::Approx(3.0));
  CHECK(s.components[10].mean.norm() == 0.0);
  sweep.mode = ScatterMode::KnownVsUu;
  sweep.axis = SweepAxis::Variance;
  const auto v = apply_level(sweep, 4.0);
  CHECK(v.components[10].variance == doctest::Approx(2.0));
  CHECK(v.components[0].variance == doctest::Approx(0.3));
  CHECK_THROWS_AS(apply_level(sweep, 0.0), ValidationError);
}
