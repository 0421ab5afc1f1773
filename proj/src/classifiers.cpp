#include "openrect/classifiers.hpp"

#include <cmath>
#include <limits>

#include "openrect/error.hpp"

namespace openrect {

Label argmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Label best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row[j] > best_v) {
      best_v = row[j];
      best = static_cast<Label>(j);
    }
  }
  return best;
}

Matrix row_softmax(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double top = scores.row(i).maxCoeff();
    if (!std::isfinite(top)) {
      out.row(i).setConstant(1.0 / static_cast<double>(scores.cols()));
      continue;
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      double e = std::exp(scores(i, j) - top);
      out(i, j) = e;
      total += e;
    }
    out.row(i) /= total;
  }
  return out;
}

Matrix Classifier::probabilities(const Matrix& x) const { return row_softmax(scores(x)); }

std::vector<Label> Classifier::predict(const Matrix& x) const {
  Matrix s = scores(x);
  std::vector<Label> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax_row(s.row(i));
  return out;
}

namespace detail {

nlohmann::json vector_to_json(const Vector& v) {
  auto j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i]))
      j.push_back(v[i]);
    else
      j.push_back(nullptr);  // -inf log-priors of absent classes
  }
  return j;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        j[i].is_null() ? -std::numeric_limits<double>::infinity() : j[i].get<double>();
  return v;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(vector_to_json(m.row(i).transpose()));
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (j.empty()) return Matrix();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j.front().size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != static_cast<std::size_t>(m.cols()))
      throw FormatError("ragged matrix in model document");
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  }
  return m;
}

void check_dim(const Matrix& x, int expected, std::string_view who) {
  if (x.cols() != expected)
    throw DimensionError(std::string(who) + ": expected " + std::to_string(expected) +
                         " features, got " + std::to_string(x.cols()));
}

}  // namespace detail

ClassifierFactory make_factory(const nlohmann::json& spec) {
  const std::string kind = spec.value("kind", std::string("gda"));
  if (kind == "gda") {
    GdaOptions o;
    const std::string mode = spec.value("mode", std::string("isotropic"));
    if (mode == "isotropic")
      o.mode = GdaMode::Isotropic;
    else if (mode == "diagonal")
      o.mode = GdaMode::Diagonal;
    else
      throw ValidationError("classifier.mode must be isotropic or diagonal");
    o.pool_singletons = spec.value("pool_singletons", true);
    return [o] { return std::make_unique<GdaClassifier>(o); };
  }
  if (kind == "svm") {
    SvmOptions o;
    o.lambda = spec.value("lambda", o.lambda);
    o.epochs = spec.value("epochs", o.epochs);
    o.seed = spec.value("seed", o.seed);
    if (!(o.lambda > 0.0)) throw ValidationError("classifier.lambda must be > 0");
    if (o.epochs < 1) throw ValidationError("classifier.epochs must be >= 1");
    return [o] { return std::make_unique<LinearSvm>(o); };
  }
  if (kind == "knn") {
    int k = spec.value("k", 5);
    if (k < 1) throw ValidationError("classifier.k must be >= 1");
    return [k] { return std::make_unique<KnnClassifier>(k); };
  }
  if (kind == "tree") {
    TreeOptions o;
    o.max_depth = spec.value("max_depth", o.max_depth);
    o.min_leaf = spec.value("min_leaf", o.min_leaf);
    if (o.max_depth < 0) throw ValidationError("classifier.max_depth must be >= 0");
    if (o.min_leaf < 1) throw ValidationError("classifier.min_leaf must be >= 1");
    return [o] { return std::make_unique<DecisionTree>(o); };
  }
  if (kind == "mlp") {
    MlpOptions o;
    o.hidden = spec.value("hidden", o.hidden);
    o.epochs = spec.value("epochs", o.epochs);
    o.batch_size = spec.value("batch_size", o.batch_size);
    o.learning_rate = spec.value("learning_rate", o.learning_rate);
    o.seed = spec.value("seed", o.seed);
    if (o.epochs < 1 || o.batch_size < 1 || !(o.learning_rate > 0.0))
      throw ValidationError("classifier: mlp epochs, batch_size and learning_rate must be positive");
    return [o] { return std::make_unique<Mlp>(o); };
  }
  throw ValidationError("unknown classifier kind '" + kind + "'");
}

nlohmann::json save_model(const Classifier& model) { return model.to_json(); }

std::unique_ptr<Classifier> load_model(const nlohmann::json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "gda") {
    GdaModel m;
    m.mode = doc.at("mode").get<std::string>() == "diagonal" ? GdaMode::Diagonal
                                                             : GdaMode::Isotropic;
    m.means = detail::matrix_from_json(doc.at("means"));
    m.variances = detail::matrix_from_json(doc.at("variances"));
    m.log_priors = detail::vector_from_json(doc.at("log_priors"));
    m.variance_floor = doc.value("variance_floor", 0.0);
    return std::make_unique<GdaClassifier>(std::move(m));
  }
  if (kind == "svm") {
    LinearSvmModel m;
    m.weights = detail::matrix_from_json(doc.at("weights"));
    m.bias = detail::vector_from_json(doc.at("bias"));
    m.feature_mean = detail::vector_from_json(doc.at("feature_mean"));
    m.feature_scale = detail::vector_from_json(doc.at("feature_scale"));
    m.options.lambda = doc.value("lambda", m.options.lambda);
    m.options.epochs = doc.value("epochs", m.options.epochs);
    m.options.seed = doc.value("seed", m.options.seed);
    return std::make_unique<LinearSvm>(std::move(m));
  }
  if (kind == "knn") {
    auto knn = std::make_unique<KnnClassifier>(doc.at("k").get<int>());
    Dataset train;
    train.features = detail::matrix_from_json(doc.at("features"));
    train.labels = doc.at("labels").get<std::vector<Label>>();
    train.n_classes = doc.at("n_classes").get<int>();
    knn->fit(train);
    return knn;
  }
  if (kind == "tree") {
    TreeModel m;
    m.n_classes = doc.at("n_classes").get<int>();
    m.dim = doc.at("dim").get<int>();
    m.options.max_depth = doc.value("max_depth", m.options.max_depth);
    m.options.min_leaf = doc.value("min_leaf", m.options.min_leaf);
    for (const auto& nj : doc.at("nodes")) {
      TreeNode n;
      n.feature = nj.at("feature").get<int>();
      n.threshold = nj.at("threshold").get<double>();
      n.left = nj.at("left").get<int>();
      n.right = nj.at("right").get<int>();
      n.class_counts = nj.at("counts").get<std::vector<std::size_t>>();
      m.nodes.push_back(std::move(n));
    }
    return std::make_unique<DecisionTree>(std::move(m));
  }
  if (kind == "mlp") return Mlp::from_json(doc);
  throw FormatError("unknown model kind '" + kind + "'");
}

}  // namespace openrect
