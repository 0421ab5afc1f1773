#include "openrect/csi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "openrect/error.hpp"

namespace openrect {

namespace {

// Relative margin a later cluster must win by. Recomputed centers can differ
// from a coinciding seed in the last bit, which would otherwise split a tie.
constexpr double kTieTol = 1e-12;

// Returns the WCSS of the new assignment.
double assign(const Matrix& x, const std::vector<Vector>& centers, std::vector<Label>& out) {
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Label best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double dist = (x.row(i).transpose() - centers[c]).squaredNorm();
      if (dist < best_d * (1.0 - kTieTol)) {
        best_d = dist;
        best = static_cast<Label>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
    wcss += best_d;
  }
  return wcss;
}

}  // namespace

SeededKmeansResult seeded_kmeans(const Matrix& sample, const std::vector<Vector>& known_class_means,
                                 const KmeansOptions& options) {
  if (known_class_means.empty()) throw ValidationError("seeded k-means needs at least one known mean");
  if (sample.rows() == 0) throw EmptyInputError("seeded k-means: empty sample");
  if (options.max_iter < 0) throw ValidationError("max_iter must be >= 0");
  if (!(options.tol >= 0.0)) throw ValidationError("tol must be >= 0");
  for (const auto& mu : known_class_means)
    if (mu.size() != sample.cols()) throw DimensionError("seeded k-means: seed dimension mismatch");

  SeededKmeansResult r;
  r.centers = known_class_means;
  r.centers.push_back(sample.colwise().mean().transpose());
  r.assignments.assign(static_cast<std::size_t>(sample.rows()), 0);
  r.wcss_history.push_back(assign(sample, r.centers, r.assignments));

  const auto k = r.centers.size();
  for (int it = 1; it <= options.max_iter; ++it) {
    std::vector<Vector> sums(k, Vector::Zero(sample.cols()));
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
      const auto c = static_cast<std::size_t>(r.assignments[static_cast<std::size_t>(i)]);
      sums[c] += sample.row(i).transpose();
      ++counts[c];
    }
    double movement = 0.0, scale = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      Vector next = sums[c] / static_cast<double>(counts[c]);
      movement = std::max(movement, (next - r.centers[c]).norm());
      r.centers[c] = std::move(next);
      scale = std::max(scale, r.centers[c].norm());
    }
    auto previous = r.assignments;
    r.wcss_history.push_back(assign(sample, r.centers, r.assignments));
    r.iterations = it;
    if (movement <= options.tol * scale || previous == r.assignments) {
      r.converged = true;
      break;
    }
  }
  return r;
}

RtscvOutcome csi_rectify(const Dataset& train, const Dataset& test,
                         const ClassifierFactory& factory, const RtscvConfig& cfg,
                         const KmeansOptions& options) {
  if (!(cfg.c > 0.0 && cfg.c <= 1.0)) throw ValidationError("rtscv.c must lie in (0, 1]");
  train.validate();
  if (train.empty()) throw ValidationError("csi: training set has no rows");
  if (test.empty()) throw EmptyInputError("csi: test set is empty");
  if (test.dim() != train.dim()) throw DimensionError("csi: test and training dimensions differ");
  if (std::floor(cfg.c * static_cast<double>(test.size()) + 0.5) < 1.0)
    throw ValidationError("rtscv.c = " + std::to_string(cfg.c) + " selects no test rows out of " +
                          std::to_string(test.size()));

  RtscvOutcome out;
  out.engine = "csi";
  out.config = cfg;
  out.sample = sample_test(test, cfg.c, derive_seed(cfg.seed, 1));
  const Label dummy = train.n_classes;

  // Every known class needs a seed; a class absent from training gets the
  // overall training mean, which any present class will out-compete.
  std::vector<Vector> means(static_cast<std::size_t>(train.n_classes),
                            train.features.colwise().mean().transpose());
  const auto counts = train.class_counts();
  std::vector<Vector> sums(means.size(), Vector::Zero(static_cast<Eigen::Index>(train.dim())));
  for (std::size_t i = 0; i < train.size(); ++i)
    sums[static_cast<std::size_t>(train.labels[i])] +=
        train.features.row(static_cast<Eigen::Index>(i)).transpose();
  for (std::size_t c = 0; c < means.size(); ++c)
    if (counts[c] > 0) means[c] = sums[c] / static_cast<double>(counts[c]);

  const auto km = seeded_kmeans(out.sample.sample.features, means, options);

  out.cv_predictions.assign(train.size(), -1);
  out.cv_predictions.insert(out.cv_predictions.end(), km.assignments.begin(), km.assignments.end());
  for (std::size_t i = 0; i < km.assignments.size(); ++i)
    if (km.assignments[i] == dummy) out.uu_set.push_back(i);

  Dataset uu = out.sample.sample.subset(out.uu_set);
  uu.n_classes = dummy + 1;
  std::fill(uu.labels.begin(), uu.labels.end(), dummy);
  Dataset base = train;
  base.n_classes = dummy + 1;
  out.rectified_train = concat(base, uu);
  out.rectified_train.n_classes = dummy + 1;
  auto model = factory();
  model->fit(out.rectified_train);
  out.rectified_model = std::move(model);

  auto& d = out.diagnostics;
  d.n_train = train.size();
  d.n_sample = out.sample.sample.size();
  d.n_uu = out.uu_set.size();
  if (!km.converged)
    d.warnings.push_back("seeded k-means stopped after " + std::to_string(km.iterations) +
                         " iterations without converging");
  return out;
}

}  // namespace openrect
