#include <cmath>
#include <limits>
#include <numbers>

#include "openrect/classifiers.hpp"
#include "openrect/error.hpp"

namespace openrect {

GdaModel gda_fit(const Dataset& train, const GdaOptions& options) {
  train.validate();
  if (train.empty()) throw InsufficientDataError("GDA: empty training set");
  const auto d = static_cast<Eigen::Index>(train.dim());
  const auto n_cls = static_cast<Eigen::Index>(train.n_classes);
  const auto counts = train.class_counts();

  GdaModel m;
  m.mode = options.mode;
  m.means = Matrix::Zero(n_cls, d);
  m.variances = Matrix::Zero(n_cls, d);
  m.log_priors = Vector::Constant(n_cls, -std::numeric_limits<double>::infinity());

  for (std::size_t i = 0; i < train.size(); ++i)
    m.means.row(train.labels[i]) += train.features.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index c = 0; c < n_cls; ++c)
    if (counts[static_cast<std::size_t>(c)] > 0)
      m.means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

  Matrix sq = Matrix::Zero(n_cls, d);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Label y = train.labels[i];
    sq.row(y) += (train.features.row(static_cast<Eigen::Index>(i)) - m.means.row(y))
                     .array()
                     .square()
                     .matrix();
  }

  // Floor relative to the overall spread of the training features.
  const Eigen::RowVectorXd global_mean = train.features.colwise().mean();
  const double global_var =
      (train.features.rowwise() - global_mean).array().square().mean();
  m.variance_floor = 1e-6 * (global_var + 1e-12);

  const auto n = static_cast<double>(train.size());
  Eigen::RowVectorXd pooled = sq.colwise().sum() / n;
  if (options.mode == GdaMode::Isotropic) pooled.setConstant(pooled.mean());

  for (Eigen::Index c = 0; c < n_cls; ++c) {
    const std::size_t count = counts[static_cast<std::size_t>(c)];
    if (count == 0) continue;
    if (count == 1 && !options.pool_singletons)
      throw InsufficientDataError("GDA: class " + std::to_string(c) +
                                  " has a single sample; need at least 2");
    Eigen::RowVectorXd v;
    if (count == 1) {
      v = pooled;
    } else {
      v = sq.row(c) / static_cast<double>(count);
      if (options.mode == GdaMode::Isotropic) v.setConstant(v.mean());
    }
    m.variances.row(c) = v.cwiseMax(m.variance_floor);
    m.log_priors[c] = std::log(static_cast<double>(count) / n);
  }
  // Absent classes still need a finite variance so densities stay well defined.
  for (Eigen::Index c = 0; c < n_cls; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0) m.variances.row(c).setConstant(1.0);
  return m;
}

Eigen::RowVectorXd gda_predict_scores(const GdaModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.means.cols())
    throw DimensionError("GDA: expected " + std::to_string(model.means.cols()) +
                         " features, got " + std::to_string(x.size()));
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  Eigen::RowVectorXd out(model.n_classes());
  for (Eigen::Index c = 0; c < model.means.rows(); ++c) {
    if (!std::isfinite(model.log_priors[c])) {
      out[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double log_l = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double v = model.variances(c, j);
      const double diff = x[j] - model.means(c, j);
      log_l -= 0.5 * (diff * diff / v + std::log(v) + log_2pi);
    }
    out[c] = log_l + model.log_priors[c];
  }
  return out;
}

Matrix GdaClassifier::scores(const Matrix& x) const {
  detail::check_dim(x, dim(), "GDA");
  Matrix out(x.rows(), model_.n_classes());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out.row(i) = gda_predict_scores(model_, x.row(i).transpose());
  return out;
}

nlohmann::json GdaClassifier::to_json() const {
  return {{"kind", "gda"},
          {"mode", model_.mode == GdaMode::Diagonal ? "diagonal" : "isotropic"},
          {"means", detail::matrix_to_json(model_.means)},
          {"variances", detail::matrix_to_json(model_.variances)},
          {"log_priors", detail::vector_to_json(model_.log_priors)},
          {"variance_floor", model_.variance_floor}};
}

}  // namespace openrect
