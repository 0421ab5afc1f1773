#include "openrect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>

#include "openrect/error.hpp"

namespace openrect {

Openness openness(int n_train_classes, int n_test_classes, int n_target_classes) {
  if (n_train_classes < 1 || n_test_classes < 1 || n_target_classes < 1)
    throw ValidationError("openness: class counts must be >= 1");
  const double radicand =
      2.0 * n_train_classes / static_cast<double>(n_test_classes + n_target_classes);
  if (radicand > 1.0) return {0.0, true};
  return {1.0 - std::sqrt(radicand), false};
}

std::size_t ConfusionMatrix::row_sum(Label truth) const {
  std::size_t s = 0;
  for (Label p = 0; p < n_; ++p) s += at(truth, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(Label pred) const {
  std::size_t s = 0;
  for (Label t = 0; t < n_; ++t) s += at(t, pred);
  return s;
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

namespace {

void check_pair(std::span<const Label> truth, std::span<const Label> pred) {
  if (truth.size() != pred.size())
    throw ValidationError("truth and prediction vectors differ in length");
  if (truth.empty()) throw EmptyInputError("metric over empty label vectors");
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> pred,
                                 int n_classes) {
  check_pair(truth, pred);
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || pred[i] < 0 || pred[i] >= n_classes)
      throw ValidationError("label outside 0.." + std::to_string(n_classes - 1));
    cm.add(truth[i], pred[i]);
  }
  return cm;
}

std::vector<double> classwise_f_measure(const ConfusionMatrix& cm) {
  std::vector<double> f(static_cast<std::size_t>(cm.size()), 0.0);
  for (Label c = 0; c < cm.size(); ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    const double predicted = static_cast<double>(cm.col_sum(c));
    const double actual = static_cast<double>(cm.row_sum(c));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    if (precision + recall > 0)
      f[static_cast<std::size_t>(c)] = 2.0 * precision * recall / (precision + recall);
  }
  return f;
}

double macro_f_measure(std::span<const Label> truth, std::span<const Label> pred, int n_classes) {
  auto f = classwise_f_measure(confusion_matrix(truth, pred, n_classes));
  return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

std::optional<double> classification_accuracy(std::span<const Label> truth,
                                              std::span<const Label> pred, Label dummy) {
  check_pair(truth, pred);
  std::size_t n = 0, ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == dummy) continue;
    ++n;
    ok += truth[i] == pred[i];
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(ok) / static_cast<double>(n);
}

std::optional<double> detection_accuracy(std::span<const Label> truth,
                                         std::span<const Label> pred, Label dummy) {
  check_pair(truth, pred);
  std::size_t n = 0, ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != dummy) continue;
    ++n;
    ok += pred[i] == dummy;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(ok) / static_cast<double>(n);
}

double overall_accuracy(std::span<const Label> truth, std::span<const Label> pred) {
  check_pair(truth, pred);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += truth[i] == pred[i];
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

double auroc(std::span<const double> scores, std::span<const bool> is_uu) {
  if (scores.size() != is_uu.size()) throw ValidationError("auroc: length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (bool b : is_uu) n_pos += b;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("auroc: need both unknown and known samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the rank sum of the positives, using mid-ranks; integral throughout.
  unsigned long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1..j share the mid-rank (i+1+j)/2.
    const unsigned long long twice_mid = i + 1 + j;
    for (std::size_t t = i; t < j; ++t)
      if (is_uu[order[t]]) twice_rank_sum += twice_mid;
    i = j;
  }
  const unsigned long long twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(std::span<const Label> truth, std::span<const Label> pred, int n_known,
                    std::span<const double> uu_scores, double openness_value) {
  EvalReport r;
  const Label dummy = n_known;
  r.openness = openness_value;
  r.confusion = confusion_matrix(truth, pred, n_known + 1);
  auto f = classwise_f_measure(r.confusion);
  r.macro_f = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  r.classification_acc = classification_accuracy(truth, pred, dummy);
  r.detection_acc = detection_accuracy(truth, pred, dummy);
  r.overall_acc = overall_accuracy(truth, pred);
  if (!uu_scores.empty()) {
    if (uu_scores.size() != truth.size()) throw ValidationError("uu score length mismatch");
    // std::vector<bool> has no contiguous storage to span over.
    auto is_uu = std::make_unique<bool[]>(truth.size());
    std::size_t n_uu = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) n_uu += (is_uu[i] = truth[i] == dummy);
    if (n_uu > 0 && n_uu < truth.size())
      r.auroc = auroc(uu_scores, std::span<const bool>(is_uu.get(), truth.size()));
  }
  return r;
}

namespace {

std::string fmt_metric(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

std::string report_csv_header() {
  return "openness,macro_f,classification_acc,detection_acc,auroc,overall_acc";
}

std::string report_csv_row(const EvalReport& r) {
  return fmt_metric(r.openness) + "," + fmt_metric(r.macro_f) + "," +
         fmt_metric(r.classification_acc) + "," + fmt_metric(r.detection_acc) + "," +
         fmt_metric(r.auroc) + "," + fmt_metric(r.overall_acc);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[order[j]] == v[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mid;
    i = j;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("spearman: length mismatch");
  if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace openrect
