#include <algorithm>
#include <cmath>
#include <numeric>

#include "openrect/classifiers.hpp"
#include "openrect/error.hpp"

namespace openrect {

namespace {

Matrix standardize(const Matrix& x, const Vector& mean, const Vector& scale) {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

}  // namespace

void Mlp::fit(const Dataset& train) {
  train.validate();
  if (train.classes_present() < 2) throw ValidationError("MLP: need at least two classes");
  n_classes_ = train.n_classes;
  const auto n = static_cast<Eigen::Index>(train.size());
  mean_ = train.features.colwise().mean().transpose();
  scale_ = ((train.features.rowwise() - mean_.transpose()).array().square().colwise().mean())
               .sqrt()
               .transpose();
  for (Eigen::Index j = 0; j < scale_.size(); ++j)
    if (scale_[j] < 1e-12) scale_[j] = 1.0;
  const Matrix z = standardize(train.features, mean_, scale_);

  std::vector<int> sizes{static_cast<int>(train.dim())};
  sizes.insert(sizes.end(), options_.hidden.begin(), options_.hidden.end());
  sizes.push_back(n_classes_);

  Rng rng(options_.seed);
  weights_.clear();
  biases_.clear();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    std::normal_distribution<double> init(0.0, std::sqrt(2.0 / sizes[l]));
    Matrix w(sizes[l + 1], sizes[l]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = init(rng);
    weights_.push_back(std::move(w));
    biases_.push_back(Vector::Zero(sizes[l + 1]));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const std::size_t layers = weights_.size();
  std::vector<Matrix> acts(layers + 1);
  for (int epoch = 0; epoch < options_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += options_.batch_size) {
      const Eigen::Index end = std::min<Eigen::Index>(n, start + options_.batch_size);
      const Eigen::Index b = end - start;
      acts[0].resize(b, z.cols());
      Matrix onehot = Matrix::Zero(b, n_classes_);
      for (Eigen::Index i = 0; i < b; ++i) {
        const auto row = order[static_cast<std::size_t>(start + i)];
        acts[0].row(i) = z.row(row);
        onehot(i, train.labels[static_cast<std::size_t>(row)]) = 1.0;
      }
      for (std::size_t l = 0; l < layers; ++l) {
        acts[l + 1] = acts[l] * weights_[l].transpose();
        acts[l + 1].rowwise() += biases_[l].transpose();
        if (l + 1 < layers) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
      }
      Matrix delta = (row_softmax(acts[layers]) - onehot) / static_cast<double>(b);
      for (std::size_t l = layers; l-- > 0;) {
        const Matrix grad_w = delta.transpose() * acts[l];
        const Vector grad_b = delta.colwise().sum().transpose();
        if (l > 0) {
          Matrix back = delta * weights_[l];
          delta = back.array() * (acts[l].array() > 0.0).cast<double>();
        }
        weights_[l] -= options_.learning_rate * grad_w;
        biases_[l] -= options_.learning_rate * grad_b;
      }
    }
  }
}

Matrix Mlp::scores(const Matrix& x) const {
  detail::check_dim(x, dim(), "MLP");
  Matrix a = standardize(x, mean_, scale_);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix next = a * weights_[l].transpose();
    next.rowwise() += biases_[l].transpose();
    if (l + 1 < weights_.size()) next = next.cwiseMax(0.0);
    a = std::move(next);
  }
  return a;
}

nlohmann::json Mlp::to_json() const {
  auto layers = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l)
    layers.push_back({{"weights", detail::matrix_to_json(weights_[l])},
                      {"bias", detail::vector_to_json(biases_[l])}});
  return {{"kind", "mlp"},
          {"hidden", options_.hidden},
          {"epochs", options_.epochs},
          {"batch_size", options_.batch_size},
          {"learning_rate", options_.learning_rate},
          {"seed", options_.seed},
          {"n_classes", n_classes_},
          {"feature_mean", detail::vector_to_json(mean_)},
          {"feature_scale", detail::vector_to_json(scale_)},
          {"layers", layers}};
}

std::unique_ptr<Mlp> Mlp::from_json(const nlohmann::json& j) {
  MlpOptions o;
  o.hidden = j.value("hidden", o.hidden);
  o.epochs = j.value("epochs", o.epochs);
  o.batch_size = j.value("batch_size", o.batch_size);
  o.learning_rate = j.value("learning_rate", o.learning_rate);
  o.seed = j.value("seed", o.seed);
  auto m = std::make_unique<Mlp>(o);
  m->n_classes_ = j.at("n_classes").get<int>();
  m->mean_ = detail::vector_from_json(j.at("feature_mean"));
  m->scale_ = detail::vector_from_json(j.at("feature_scale"));
  for (const auto& layer : j.at("layers")) {
    m->weights_.push_back(detail::matrix_from_json(layer.at("weights")));
    m->biases_.push_back(detail::vector_from_json(layer.at("bias")));
  }
  return m;
}

}  // namespace openrect
