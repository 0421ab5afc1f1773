#pragma once

#include <vector>

#include "openrect/dataset.hpp"

namespace openrect {

struct PcaModel {
  Vector mean;
  Matrix components;  // n_components x d, orthonormal rows
  std::vector<double> eigenvalues;
  std::vector<double> explained_variance_ratio;
  int iterations = 0;  // largest iteration count over components

  Matrix transform(const Matrix& x) const;
};

struct PcaOptions {
  int max_iter = 5000;
  double tol = 1e-13;
  Seed seed = 0;
};

/// Top principal components of the population covariance by power iteration,
/// deflating each found direction before the next.
PcaModel pca_fit(const Matrix& x, int n_components, const PcaOptions& options = {});

/// Projected features, labels unchanged.
Dataset pca_project(const Dataset& data, int n_components, PcaModel* model_out = nullptr,
                    const PcaOptions& options = {});

}  // namespace openrect
