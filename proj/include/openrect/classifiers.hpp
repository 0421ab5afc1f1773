#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "openrect/dataset.hpp"
#include "openrect/types.hpp"

namespace openrect {

/// Black-box base classifier.
///
/// scores() returns one row per sample and one column per class, higher
/// meaning more confident. predict() is the row argmax with ties going to the
/// smallest class id. The label space is taken from Dataset::n_classes at fit
/// time, so classes with no rows are still representable.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void fit(const Dataset& train) = 0;
  virtual Matrix scores(const Matrix& x) const = 0;
  /// Row-normalized scores. Defaults to a softmax over scores().
  virtual Matrix probabilities(const Matrix& x) const;
  std::vector<Label> predict(const Matrix& x) const;

  virtual int n_classes() const = 0;
  virtual int dim() const = 0;
  virtual std::string_view kind() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

/// Index of the largest entry; the first one wins on ties.
Label argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row);
Matrix row_softmax(const Matrix& scores);

// ---------------------------------------------------------------------------
// Gaussian discriminant analysis

enum class GdaMode { Isotropic, Diagonal };

struct GdaOptions {
  GdaMode mode = GdaMode::Isotropic;
  /// A class with exactly one row normally raises InsufficientDataError.
  /// When set, such a class borrows the pooled within-class variance instead.
  bool pool_singletons = false;
};

struct GdaModel {
  GdaMode mode = GdaMode::Isotropic;
  Matrix means;      // n_classes x d
  Matrix variances;  // n_classes x d; rows are constant in isotropic mode
  Vector log_priors;  // -inf for classes without rows
  double variance_floor = 0.0;

  int n_classes() const { return static_cast<int>(means.rows()); }
};

GdaModel gda_fit(const Dataset& train, const GdaOptions& options = {});
/// log L_i(x) + log P'(i) per class.
Eigen::RowVectorXd gda_predict_scores(const GdaModel& model,
                                      const Eigen::Ref<const Vector>& x);

class GdaClassifier final : public Classifier {
 public:
  explicit GdaClassifier(GdaOptions options = {}) : options_(options) {}
  explicit GdaClassifier(GdaModel model) : model_(std::move(model)) { options_.mode = model_.mode; }

  void fit(const Dataset& train) override { model_ = gda_fit(train, options_); }
  Matrix scores(const Matrix& x) const override;
  int n_classes() const override { return model_.n_classes(); }
  int dim() const override { return static_cast<int>(model_.means.cols()); }
  std::string_view kind() const override { return "gda"; }
  nlohmann::json to_json() const override;

  const GdaModel& model() const { return model_; }

 private:
  GdaOptions options_;
  GdaModel model_;
};

// ---------------------------------------------------------------------------
// Linear SVM, one-vs-rest, trained by stochastic subgradient descent on the
// hinge loss with step 1/(lambda t). Features are standardized internally and
// the bias is learned as the weight of a constant feature.

struct SvmOptions {
  double lambda = 1e-4;
  int epochs = 15;
  Seed seed = 1;
};

struct LinearSvmModel {
  Matrix weights;  // n_classes x d, standardized coordinates, suffix-averaged iterates
  Vector bias;
  Vector feature_mean;
  Vector feature_scale;
  SvmOptions options;
  /// Mean one-vs-rest primal objective of the raw iterate after each epoch.
  std::vector<double> objective_trace;

  int n_classes() const { return static_cast<int>(weights.rows()); }
};

LinearSvmModel svm_fit(const Dataset& train, const SvmOptions& options = {});

class LinearSvm final : public Classifier {
 public:
  explicit LinearSvm(SvmOptions options = {}) : options_(options) {}
  explicit LinearSvm(LinearSvmModel model) : options_(model.options), model_(std::move(model)) {}

  void fit(const Dataset& train) override { model_ = svm_fit(train, options_); }
  Matrix scores(const Matrix& x) const override;
  int n_classes() const override { return model_.n_classes(); }
  int dim() const override { return static_cast<int>(model_.weights.cols()); }
  std::string_view kind() const override { return "svm"; }
  nlohmann::json to_json() const override;

  const LinearSvmModel& model() const { return model_; }

 private:
  SvmOptions options_;
  LinearSvmModel model_;
};

// ---------------------------------------------------------------------------
// k-nearest neighbours (Euclidean). Scores are vote fractions.

class KnnClassifier final : public Classifier {
 public:
  explicit KnnClassifier(int k_nn = 5) : k_nn_(k_nn) {}

  void fit(const Dataset& train) override;
  Matrix scores(const Matrix& x) const override;
  Matrix probabilities(const Matrix& x) const override { return scores(x); }
  Label predict_one(const Eigen::Ref<const Vector>& x) const;
  int n_classes() const override { return train_.n_classes; }
  int dim() const override { return static_cast<int>(train_.dim()); }
  std::string_view kind() const override { return "knn"; }
  nlohmann::json to_json() const override;

  int k_nn() const { return k_nn_; }
  const Dataset& training_data() const { return train_; }

 private:
  Eigen::RowVectorXd votes(const Eigen::Ref<const Vector>& x) const;

  int k_nn_;
  Dataset train_;
};

// ---------------------------------------------------------------------------
// CART decision tree with Gini impurity. Scores are leaf class frequencies.

struct TreeOptions {
  int max_depth = 12;
  int min_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;
  std::vector<std::size_t> class_counts;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int n_classes = 0;
  int dim = 0;
  TreeOptions options;

  const TreeNode& leaf_for(const Eigen::Ref<const Vector>& x) const;
  int depth() const;
  std::size_t leaf_count() const;
};

TreeModel tree_fit(const Dataset& train, const TreeOptions& options = {});
double gini_impurity(const std::vector<std::size_t>& counts);

class DecisionTree final : public Classifier {
 public:
  explicit DecisionTree(TreeOptions options = {}) : options_(options) {}
  explicit DecisionTree(TreeModel model) : options_(model.options), model_(std::move(model)) {}

  void fit(const Dataset& train) override { model_ = tree_fit(train, options_); }
  Matrix scores(const Matrix& x) const override;
  Matrix probabilities(const Matrix& x) const override { return scores(x); }
  int n_classes() const override { return model_.n_classes; }
  int dim() const override { return model_.dim; }
  std::string_view kind() const override { return "tree"; }
  nlohmann::json to_json() const override;

  const TreeModel& model() const { return model_; }

 private:
  TreeOptions options_;
  TreeModel model_;
};

// ---------------------------------------------------------------------------
// Fully connected network: ReLU hidden layers, softmax output, minibatch SGD
// on cross-entropy. Features are standardized internally.

struct MlpOptions {
  std::vector<int> hidden = {64, 32};
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.05;
  Seed seed = 1;
};

class Mlp final : public Classifier {
 public:
  explicit Mlp(MlpOptions options = {}) : options_(std::move(options)) {}

  void fit(const Dataset& train) override;
  Matrix scores(const Matrix& x) const override;
  int n_classes() const override { return n_classes_; }
  int dim() const override { return static_cast<int>(mean_.size()); }
  std::string_view kind() const override { return "mlp"; }
  nlohmann::json to_json() const override;

  static std::unique_ptr<Mlp> from_json(const nlohmann::json& j);

 private:
  MlpOptions options_;
  int n_classes_ = 0;
  Vector mean_, scale_;
  std::vector<Matrix> weights_;  // out x in
  std::vector<Vector> biases_;
};

// ---------------------------------------------------------------------------
// Construction and persistence

/// Builds a factory from a JSON description such as
/// {"kind": "svm", "lambda": 1e-4, "epochs": 15, "seed": 3}.
ClassifierFactory make_factory(const nlohmann::json& spec);

/// Self-describing document: {"kind": ..., ...parameters}.
nlohmann::json save_model(const Classifier& model);
std::unique_ptr<Classifier> load_model(const nlohmann::json& doc);

namespace detail {
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);
void check_dim(const Matrix& x, int expected, std::string_view who);
}  // namespace detail

}  // namespace openrect
