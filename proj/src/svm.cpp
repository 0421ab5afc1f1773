#include <algorithm>
#include <cmath>
#include <numeric>

#include "openrect/classifiers.hpp"
#include "openrect/error.hpp"

namespace openrect {

namespace {

double ovr_objective(const Matrix& z, const std::vector<Label>& labels, Label cls,
                     const Eigen::RowVectorXd& w, double bias, double lambda) {
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double y = labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (z.row(i).dot(w) + bias));
  }
  return 0.5 * lambda * (w.squaredNorm() + bias * bias) + hinge / static_cast<double>(z.rows());
}

}  // namespace

LinearSvmModel svm_fit(const Dataset& train, const SvmOptions& options) {
  train.validate();
  if (!(options.lambda > 0.0)) throw ValidationError("SVM: lambda must be > 0");
  if (options.epochs < 1) throw ValidationError("SVM: epochs must be >= 1");
  if (train.classes_present() < 2)
    throw ValidationError("SVM: need at least two classes with samples");

  const auto n = static_cast<Eigen::Index>(train.size());
  const auto d = static_cast<Eigen::Index>(train.dim());
  LinearSvmModel m;
  m.options = options;
  m.feature_mean = train.features.colwise().mean().transpose();
  m.feature_scale =
      ((train.features.rowwise() - m.feature_mean.transpose()).array().square().colwise().mean())
          .sqrt()
          .transpose();
  for (Eigen::Index j = 0; j < d; ++j)
    if (m.feature_scale[j] < 1e-12) m.feature_scale[j] = 1.0;
  const Matrix z = (train.features.rowwise() - m.feature_mean.transpose()).array().rowwise() /
                   m.feature_scale.transpose().array();

  // One visiting order per epoch, shared by all one-vs-rest problems.
  Rng rng(options.seed);
  std::vector<std::vector<Eigen::Index>> orders(static_cast<std::size_t>(options.epochs));
  for (auto& order : orders) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
  }

  m.weights = Matrix::Zero(train.n_classes, d);
  m.bias = Vector::Zero(train.n_classes);
  m.objective_trace.assign(static_cast<std::size_t>(options.epochs), 0.0);
  const double radius = 1.0 / std::sqrt(options.lambda);

  for (Label cls = 0; cls < train.n_classes; ++cls) {
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(d);
    double b = 0.0;
    // Suffix average over the second half of the epochs.
    Eigen::RowVectorXd w_avg = Eigen::RowVectorXd::Zero(d);
    double b_avg = 0.0, n_avg = 0.0;
    const int avg_from = options.epochs / 2;
    double t = 1.0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      for (Eigen::Index i : orders[static_cast<std::size_t>(epoch)]) {
        const double y = train.labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
        const double eta = 1.0 / (options.lambda * t);
        const double margin = y * (z.row(i).dot(w) + b);
        const double shrink = 1.0 - 1.0 / t;
        w *= shrink;
        b *= shrink;
        if (margin < 1.0) {
          w += eta * y * z.row(i);
          b += eta * y;
        }
        const double norm = std::sqrt(w.squaredNorm() + b * b);
        if (norm > radius) {
          w *= radius / norm;
          b *= radius / norm;
        }
        t += 1.0;
        if (epoch >= avg_from) {
          w_avg += w;
          b_avg += b;
          n_avg += 1.0;
        }
      }
      m.objective_trace[static_cast<std::size_t>(epoch)] +=
          ovr_objective(z, train.labels, cls, w, b, options.lambda) /
          static_cast<double>(train.n_classes);
    }
    m.weights.row(cls) = w_avg / n_avg;
    m.bias[cls] = b_avg / n_avg;
  }
  return m;
}

Matrix LinearSvm::scores(const Matrix& x) const {
  detail::check_dim(x, dim(), "SVM");
  const Matrix z = (x.rowwise() - model_.feature_mean.transpose()).array().rowwise() /
                   model_.feature_scale.transpose().array();
  Matrix out = z * model_.weights.transpose();
  out.rowwise() += model_.bias.transpose();
  return out;
}

nlohmann::json LinearSvm::to_json() const {
  return {{"kind", "svm"},
          {"lambda", model_.options.lambda},
          {"epochs", model_.options.epochs},
          {"seed", model_.options.seed},
          {"weights", detail::matrix_to_json(model_.weights)},
          {"bias", detail::vector_to_json(model_.bias)},
          {"feature_mean", detail::vector_to_json(model_.feature_mean)},
          {"feature_scale", detail::vector_to_json(model_.feature_scale)}};
}

}  // namespace openrect
