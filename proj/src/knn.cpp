#include <algorithm>
#include <numeric>

#include "openrect/classifiers.hpp"
#include "openrect/error.hpp"

namespace openrect {

void KnnClassifier::fit(const Dataset& train) {
  train.validate();
  if (k_nn_ < 1) throw ValidationError("kNN: k must be >= 1");
  if (static_cast<std::size_t>(k_nn_) > train.size())
    throw InsufficientDataError("kNN: k (" + std::to_string(k_nn_) + ") exceeds training size (" +
                                std::to_string(train.size()) + ")");
  train_ = train;
}

Eigen::RowVectorXd KnnClassifier::votes(const Eigen::Ref<const Vector>& x) const {
  const auto n = train_.features.rows();
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    dist[static_cast<std::size_t>(i)] = {(train_.features.row(i) - x.transpose()).squaredNorm(), i};
  // Equal distances are resolved by training-row order.
  auto kth = dist.begin() + k_nn_;
  std::partial_sort(dist.begin(), kth, dist.end());
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(train_.n_classes);
  for (auto it = dist.begin(); it != kth; ++it)
    v[train_.labels[static_cast<std::size_t>(it->second)]] += 1.0;
  return v / static_cast<double>(k_nn_);
}

Label KnnClassifier::predict_one(const Eigen::Ref<const Vector>& x) const {
  return argmax_row(votes(x));
}

Matrix KnnClassifier::scores(const Matrix& x) const {
  detail::check_dim(x, dim(), "kNN");
  Matrix out(x.rows(), train_.n_classes);
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = votes(x.row(i).transpose());
  return out;
}

nlohmann::json KnnClassifier::to_json() const {
  return {{"kind", "knn"},
          {"k", k_nn_},
          {"n_classes", train_.n_classes},
          {"features", detail::matrix_to_json(train_.features)},
          {"labels", train_.labels}};
}

}  // namespace openrect
