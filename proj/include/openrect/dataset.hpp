#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "openrect/types.hpp"

namespace openrect {

/// Dense feature matrix with labels in 0..n_classes-1.
///
/// n_classes is the size of the label space, which can exceed the number of
/// labels actually present (an augmented set with an empty sample still has
/// the dummy class in its label space).
struct Dataset {
  Matrix features;
  std::vector<Label> labels;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  bool empty() const { return labels.empty(); }

  /// Throws ValidationError if any invariant is broken.
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  std::vector<std::size_t> class_counts() const;
  /// Number of classes with at least one row.
  int classes_present() const;
};

/// Stacks b under a; label space is the larger of the two.
Dataset concat(const Dataset& a, const Dataset& b);

/// Bidirectional mapping between external label names and internal ids.
struct LabelMap {
  std::vector<std::string> names;

  Label id_of(const std::string& name) const;  // throws ValidationError
  const std::string& name_of(Label id) const;
  std::size_t size() const { return names.size(); }
};

struct CsvOptions {
  bool header = true;
  /// Column index or header name. Negative index counts from the end.
  std::variant<long, std::string> label_column = -1L;
  /// Empty feature cells load as NaN instead of raising ParseError.
  bool allow_missing = false;
};

struct LoadedCsv {
  Dataset data;
  LabelMap label_map;
  std::vector<std::string> feature_names;
};

/// Labels that all parse as integers are ordered numerically; anything else
/// is canonicalized by first appearance.
LoadedCsv load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
LoadedCsv parse_csv(std::istream& in, const CsvOptions& options = {});

/// Writes features followed by a trailing `label` column. Uses label names
/// when a map is given. NaN features are written as empty cells.
void write_csv(std::ostream& out, const Dataset& data, const LabelMap* names = nullptr,
               const std::vector<std::string>& feature_names = {});
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const LabelMap* names = nullptr,
               const std::vector<std::string>& feature_names = {});

// ---------------------------------------------------------------------------
// Synthetic Gaussian mixtures

struct GaussianComponent {
  Vector mean;
  double variance = 1.0;  // isotropic sigma^2
  double weight = 1.0;
  Label class_id = 0;
};

struct GaussianMixtureSpec {
  std::vector<GaussianComponent> components;
  Seed seed = 0;

  std::size_t dim() const;
  void validate() const;
};

/// Component i contributes round(weight_i * n_per_component * n_components)
/// rows, so equal weights give n_per_component rows each. Deterministic in spec.seed.
Dataset generate_gaussian(const GaussianMixtureSpec& spec, std::size_t n_per_component);

void to_json(nlohmann::json& j, const GaussianMixtureSpec& spec);
void from_json(const nlohmann::json& j, GaussianMixtureSpec& spec);

// ---------------------------------------------------------------------------
// Open-set scenarios

struct RowSplit {
  std::vector<std::size_t> first;   // ascending
  std::vector<std::size_t> second;  // ascending
};

/// Per class, round-half-up of fraction * class size rows go to `first`.
RowSplit stratified_split(std::span<const Label> labels, int n_classes, double fraction,
                          Seed seed);

/// Known classes are re-indexed densely to 0..m-1 in both splits; every
/// test row from an unknown class carries label m (the dummy id).
struct OpenSetScenario {
  Dataset train;
  Dataset test;
  std::vector<Label> known_class_ids;  // original id of internal class i
  std::vector<Label> uu_class_ids;     // original ids
  std::vector<Label> test_original_labels;

  int n_known() const { return static_cast<int>(known_class_ids.size()); }
  Label dummy_label() const { return n_known(); }
  /// Classes in the full label space (known plus unknown).
  int n_total_classes() const {
    return n_known() + static_cast<int>(uu_class_ids.size());
  }
};

/// Stratified split of `full`, then rows of the unknown classes are dropped
/// from the training part. The test part is left as split.
OpenSetScenario make_scenario(const Dataset& full, std::span<const Label> uu_class_ids,
                              double split_fraction, Seed seed);

// ---------------------------------------------------------------------------
// Algorithm building blocks

struct TestSample {
  Dataset sample;
  Dataset remainder;
  std::vector<std::size_t> sample_indices;     // into the test set, ascending
  std::vector<std::size_t> remainder_indices;  // ascending
};

/// round-half-up of c*|test|, at least 1 when the test set is nonempty.
std::size_t sample_size_for(double c, std::size_t n_test);

TestSample sample_test(const Dataset& test, double c, Seed seed);

enum class Origin { Train, Sample };

struct Provenance {
  Origin origin;
  std::size_t index;  // row in the originating dataset
};

struct AugmentedDataset {
  Dataset data;
  std::vector<Provenance> provenance;
  std::size_t n_train = 0;

  const Provenance& at(std::size_t row) const { return provenance.at(row); }
};

/// Appends the sample with every row relabeled `dummy_label`, which must be
/// train.n_classes.
AugmentedDataset augment(const Dataset& train, const Dataset& sample, Label dummy_label);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

struct KFoldPlan {
  std::vector<Fold> folds;
  bool stratified = false;
};

/// Stratified when every present class has at least k members (and labels
/// are given); otherwise an unstratified shuffle with stratified=false.
KFoldPlan kfold_indices(std::size_t n, int k, std::span<const Label> stratify_labels,
                        Seed seed);

}  // namespace openrect
