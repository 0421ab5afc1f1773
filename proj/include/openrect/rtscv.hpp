#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "openrect/classifiers.hpp"
#include "openrect/dataset.hpp"
#include "openrect/types.hpp"

namespace openrect {

enum class CvMode { KFold, Holdout };

struct RtscvConfig {
  double c = 0.1;  // sample rate, fraction of the test set
  int k = 3;
  Seed seed = 0;
  CvMode mode = CvMode::KFold;
  double holdout_fraction = 0.5;
  /// When false, training rows predicted as dummy during cross-validation
  /// also join X_u, so they appear in X-bar twice with different labels.
  bool restrict_uu_to_sample = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const RtscvConfig& cfg);
void from_json(const nlohmann::json& j, RtscvConfig& cfg);

/// Out-of-fold predictions over an augmented set. Rows that were never in a
/// validation fold (holdout mode) carry -1.
struct CvRelabeling {
  std::vector<Label> predictions;
  std::vector<std::size_t> fold_valid_sizes;
  /// Dummy rows in each fold's training portion.
  std::vector<std::size_t> fold_train_dummy;
  /// Distinct classes in each fold's training portion.
  std::vector<int> fold_train_classes;
  bool stratified = false;
};

CvRelabeling cv_relabel(const AugmentedDataset& augmented, const ClassifierFactory& factory, int k,
                        Seed seed);
/// Single split; `fraction` of the rows (stratified) are predicted.
CvRelabeling holdout_relabel(const AugmentedDataset& augmented, const ClassifierFactory& factory,
                             double fraction, Seed seed);

struct RtscvDiagnostics {
  std::size_t n_train = 0;
  std::size_t n_sample = 0;
  std::size_t n_uu = 0;
  /// Training rows the cross-validation phase predicted as dummy.
  std::size_t n_train_predicted_dummy = 0;
  std::vector<std::size_t> fold_sizes;
  bool folds_stratified = false;
  /// Some fold had no dummy row to learn from.
  bool fold_without_dummy = false;
  std::vector<std::string> warnings;
};

struct RtscvOutcome {
  std::string engine = "rtscv";
  RtscvConfig config;
  std::shared_ptr<Classifier> rectified_model;
  TestSample sample;
  /// Positions within sample.sample identified as unknown, ascending.
  std::vector<std::size_t> uu_set;
  /// X-bar: the training set plus X_u relabeled as the dummy class.
  Dataset rectified_train;
  /// Indexed like the augmented set (training rows first, then the sample).
  std::vector<Label> cv_predictions;
  RtscvDiagnostics diagnostics;

  Label dummy_label() const { return rectified_model->n_classes() - 1; }
  /// uu_set mapped to row indices of the test set.
  std::vector<std::size_t> uu_test_indices() const;
};

RtscvOutcome rectify(const Dataset& train, const Dataset& test, const ClassifierFactory& factory,
                     const RtscvConfig& cfg);

/// Config echo, diagnostics and uu indices. The model is referenced by name.
nlohmann::json outcome_to_json(const RtscvOutcome& outcome, const std::string& model_ref = "");

struct SampleRateSearch {
  double best_c = 0.0;
  /// (c, share of training rows predicted as dummy) per candidate, in input order.
  std::vector<std::pair<double, double>> curve;
};

/// Tolerance, in absolute proxy units, for treating a candidate as tied with the minimum.
inline constexpr double kSampleRateTolerance = 0.005;

SampleRateSearch search_sample_rate(const Dataset& train, const Dataset& test,
                                    const ClassifierFactory& factory,
                                    const std::vector<double>& candidate_rates, int k, Seed seed);

struct FoldSearch {
  int best_k = 0;
  /// (k, macro F) per candidate, in input order.
  std::vector<std::pair<int, double>> curve;
};

/// Fraction of the training set held out for scoring each k.
inline constexpr double kFoldSearchValidation = 0.2;

FoldSearch search_folds(const Dataset& train, const Dataset& test, const ClassifierFactory& factory,
                        double c, const std::vector<int>& candidate_ks, Seed seed);

}  // namespace openrect
