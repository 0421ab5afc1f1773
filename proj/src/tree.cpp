#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "openrect/classifiers.hpp"
#include "openrect/error.hpp"

namespace openrect {

double gini_impurity(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0.0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TreeOptions& options, TreeModel& model)
      : data_(data), options_(options), model_(model) {}

  int build(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(model_.nodes.size());
    model_.nodes.emplace_back();
    std::vector<std::size_t> counts(static_cast<std::size_t>(data_.n_classes), 0);
    for (auto r : rows) ++counts[static_cast<std::size_t>(data_.labels[r])];
    model_.nodes[static_cast<std::size_t>(id)].class_counts = counts;

    const double parent = gini_impurity(counts);
    const auto min_leaf = static_cast<std::size_t>(options_.min_leaf);
    if (depth >= options_.max_depth || parent == 0.0 || rows.size() < 2 * min_leaf) return id;

    Split best = best_split(rows, counts);
    // A zero-gain split is still taken (an XOR layout has no better first split);
    // weighted Gini never rises, so depth alone bounds the recursion.
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      if (data_.features(static_cast<Eigen::Index>(r), best.feature) <= best.threshold)
        left.push_back(r);
      else
        right.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& node = model_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

 private:
  Split best_split(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& counts) {
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    const auto n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(options_.min_leaf);
    std::vector<std::size_t> order(rows);
    for (Eigen::Index f = 0; f < data_.features.cols(); ++f) {
      auto value = [&](std::size_t r) { return data_.features(static_cast<Eigen::Index>(r), f); };
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return value(a) < value(b) || (value(a) == value(b) && a < b);
      });
      std::vector<std::size_t> left(counts.size(), 0), right(counts);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto y = static_cast<std::size_t>(data_.labels[order[i]]);
        ++left[y];
        --right[y];
        const double v0 = value(order[i]), v1 = value(order[i + 1]);
        if (!(v0 < v1)) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double imp = (static_cast<double>(nl) * gini_impurity(left) +
                            static_cast<double>(nr) * gini_impurity(right)) /
                           static_cast<double>(n);
        if (imp < best.impurity) {
          best.impurity = imp;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (v0 + v1);
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const TreeOptions& options_;
  TreeModel& model_;
};

}  // namespace

TreeModel tree_fit(const Dataset& train, const TreeOptions& options) {
  train.validate();
  if (options.max_depth < 0) throw ValidationError("tree: max_depth must be >= 0");
  if (options.min_leaf < 1) throw ValidationError("tree: min_leaf must be >= 1");
  if (train.size() < static_cast<std::size_t>(options.min_leaf))
    throw InsufficientDataError("tree: fewer samples than min_leaf");
  TreeModel m;
  m.n_classes = train.n_classes;
  m.dim = static_cast<int>(train.dim());
  m.options = options;
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  TreeBuilder(train, options, m).build(std::move(rows), 0);
  return m;
}

const TreeNode& TreeModel::leaf_for(const Eigen::Ref<const Vector>& x) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0)
    node = &nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left
                                                                                : node->right)];
  return *node;
}

int TreeModel::depth() const {
  std::function<int(int)> walk = [&](int id) -> int {
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return nodes.empty() ? 0 : walk(0);
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

Matrix DecisionTree::scores(const Matrix& x) const {
  detail::check_dim(x, dim(), "tree");
  Matrix out(x.rows(), model_.n_classes);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto& leaf = model_.leaf_for(x.row(i).transpose());
    double total = 0.0;
    for (auto c : leaf.class_counts) total += static_cast<double>(c);
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      out(i, c) = static_cast<double>(leaf.class_counts[static_cast<std::size_t>(c)]) / total;
  }
  return out;
}

nlohmann::json DecisionTree::to_json() const {
  auto nodes = nlohmann::json::array();
  for (const auto& n : model_.nodes)
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"counts", n.class_counts}});
  return {{"kind", "tree"},
          {"n_classes", model_.n_classes},
          {"dim", model_.dim},
          {"max_depth", model_.options.max_depth},
          {"min_leaf", model_.options.min_leaf},
          {"nodes", nodes}};
}

}  // namespace openrect
