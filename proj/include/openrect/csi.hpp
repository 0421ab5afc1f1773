#pragma once

#include <vector>

#include "openrect/classifiers.hpp"
#include "openrect/dataset.hpp"
#include "openrect/rtscv.hpp"

namespace openrect {

struct SeededKmeansResult {
  std::vector<Label> assignments;  // cluster id per sample row, 0..M
  std::vector<Vector> centers;     // M + 1 centers; the last one is the uu cluster
  int iterations = 0;
  bool converged = false;
  /// Within-cluster sum of squares after each assignment step.
  std::vector<double> wcss_history;
};

struct KmeansOptions {
  int max_iter = 300;
  /// Relative center movement; scaled by max(1, largest center norm).
  double tol = 1e-6;
};

/// Lloyd iterations seeded with the known-class means and the mean of the
/// sample. Distances are Euclidean, ties (within a relative 1e-12) go to the
/// smallest cluster id and an empty cluster keeps its previous center.
SeededKmeansResult seeded_kmeans(const Matrix& sample, const std::vector<Vector>& known_class_means,
                                 const KmeansOptions& options = {});

/// rectify() with the cross-validation phase replaced by seeded k-means over
/// the sample. Only cfg.c, cfg.seed and restrict_uu_to_sample are consulted.
RtscvOutcome csi_rectify(const Dataset& train, const Dataset& test,
                         const ClassifierFactory& factory, const RtscvConfig& cfg,
                         const KmeansOptions& options = {});

}  // namespace openrect
