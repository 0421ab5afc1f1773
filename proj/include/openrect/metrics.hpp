#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "openrect/types.hpp"

namespace openrect {

struct Openness {
  double value = 0.0;
  /// Set when the radicand exceeded 1 and the value was clamped to 0.
  bool clamped = false;
};

/// 1 - sqrt(2 * train / (test + target)).
Openness openness(int n_train_classes, int n_test_classes, int n_target_classes);

/// Square count matrix indexed [truth][prediction].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes = 0)
      : n_(n_classes), counts_(static_cast<std::size_t>(n_classes * n_classes), 0) {}

  int size() const { return n_; }
  std::size_t at(Label truth, Label pred) const {
    return counts_[static_cast<std::size_t>(truth * n_ + pred)];
  }
  void add(Label truth, Label pred) { ++counts_[static_cast<std::size_t>(truth * n_ + pred)]; }
  std::size_t row_sum(Label truth) const;
  std::size_t col_sum(Label pred) const;
  std::size_t total() const;

 private:
  int n_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> pred,
                                 int n_classes);

/// Per-class F-measures (0 where precision + recall is 0).
std::vector<double> classwise_f_measure(const ConfusionMatrix& cm);
/// Unweighted mean of the per-class F-measures over all n_classes.
double macro_f_measure(std::span<const Label> truth, std::span<const Label> pred, int n_classes);

/// Accuracy over rows whose truth is a known class (< dummy). Empty stratum -> nullopt.
std::optional<double> classification_accuracy(std::span<const Label> truth,
                                              std::span<const Label> pred, Label dummy);
/// Share of unknown rows (truth == dummy) predicted as dummy. Empty stratum -> nullopt.
std::optional<double> detection_accuracy(std::span<const Label> truth,
                                         std::span<const Label> pred, Label dummy);
double overall_accuracy(std::span<const Label> truth, std::span<const Label> pred);

/// Mann-Whitney estimate of P(score of a random unknown > score of a random
/// known), ties counted as one half.
double auroc(std::span<const double> scores, std::span<const bool> is_uu);

/// One experiment cell. Labels run over 0..n_known, n_known being the dummy class.
struct EvalReport {
  double openness = 0.0;
  double macro_f = 0.0;
  std::optional<double> classification_acc;
  std::optional<double> detection_acc;
  std::optional<double> auroc;
  double overall_acc = 0.0;
  ConfusionMatrix confusion;
};

/// uu_scores may be empty, in which case AUROC is left absent.
EvalReport evaluate(std::span<const Label> truth, std::span<const Label> pred, int n_known,
                    std::span<const double> uu_scores = {}, double openness_value = 0.0);

/// CSV column names and one formatted row; absent metrics are written as empty cells.
std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);

/// Spearman rank correlation with average ranks for ties. NaN if either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace openrect
