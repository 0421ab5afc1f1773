#include "openrect/pca.hpp"

#include <cmath>

#include "openrect/error.hpp"

namespace openrect {

Matrix PcaModel::transform(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DimensionError("pca: dimension mismatch");
  return (x.rowwise() - mean.transpose()) * components.transpose();
}

PcaModel pca_fit(const Matrix& x, int n_components, const PcaOptions& options) {
  if (x.rows() == 0) throw EmptyInputError("pca: no rows");
  const auto d = x.cols();
  if (n_components < 1 || n_components > d)
    throw ValidationError("pca: n_components must lie in 1.." + std::to_string(d));

  PcaModel m;
  m.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - m.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(x.rows());
  const double total_var = cov.trace();

  m.components.resize(n_components, d);
  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Removes the components already found from v.
  auto deflate = [&](Eigen::VectorXd& v, int found) {
    for (int j = 0; j < found; ++j) {
      const Eigen::VectorXd u = m.components.row(j).transpose();
      v -= u.dot(v) * u;
    }
  };

  for (int c = 0; c < n_components; ++c) {
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v[j] = normal(rng);
    deflate(v, c);
    v.normalize();
    double lambda = 0.0;
    int it = 0;
    for (; it < options.max_iter; ++it) {
      Eigen::VectorXd w = cov * v;
      deflate(w, c);
      const double norm = w.norm();
      if (norm == 0.0) break;  // remaining variance is zero
      w /= norm;
      // The sign of an eigenvector is arbitrary; compare up to sign.
      const double change = std::min((w - v).norm(), (w + v).norm());
      v = w;
      lambda = v.dot(cov * v);
      if (change < options.tol) break;
    }
    m.iterations = std::max(m.iterations, it);
    // Fix the sign so the largest-magnitude entry is positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    m.components.row(c) = v.transpose();
    m.eigenvalues.push_back(lambda);
    m.explained_variance_ratio.push_back(total_var > 0 ? lambda / total_var : 0.0);
  }
  return m;
}

Dataset pca_project(const Dataset& data, int n_components, PcaModel* model_out,
                    const PcaOptions& options) {
  data.validate();
  auto model = pca_fit(data.features, n_components, options);
  Dataset out;
  out.features = model.transform(data.features);
  out.labels = data.labels;
  out.n_classes = data.n_classes;
  if (model_out) *model_out = std::move(model);
  return out;
}

}  // namespace openrect
