#include "openrect/rtscv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "openrect/error.hpp"
#include "openrect/metrics.hpp"
#include "openrect/parallel.hpp"

namespace openrect {

void RtscvConfig::validate() const {
  if (!(c > 0.0 && c <= 1.0)) throw ValidationError("rtscv.c must lie in (0, 1], got " + std::to_string(c));
  if (mode == CvMode::KFold && k < 2)
    throw ValidationError("rtscv.k must be >= 2, got " + std::to_string(k));
  if (mode == CvMode::Holdout && !(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ValidationError("rtscv.holdout_fraction must lie in (0, 1)");
}

void to_json(nlohmann::json& j, const RtscvConfig& cfg) {
  j = {{"c", cfg.c},
       {"k", cfg.k},
       {"seed", cfg.seed},
       {"mode", cfg.mode == CvMode::KFold ? "kfold" : "holdout"},
       {"holdout_fraction", cfg.holdout_fraction},
       {"restrict_uu_to_sample", cfg.restrict_uu_to_sample}};
}

void from_json(const nlohmann::json& j, RtscvConfig& cfg) {
  if (!j.is_object()) throw ValidationError("rtscv config must be an object");
  static const std::set<std::string> known = {"c",    "k", "seed", "mode", "holdout_fraction",
                                              "restrict_uu_to_sample"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("rtscv: unknown field '" + key + "'");
  try {
    cfg.c = j.value("c", cfg.c);
    cfg.k = j.value("k", cfg.k);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.holdout_fraction = j.value("holdout_fraction", cfg.holdout_fraction);
    cfg.restrict_uu_to_sample = j.value("restrict_uu_to_sample", cfg.restrict_uu_to_sample);
    const std::string mode = j.value("mode", std::string("kfold"));
    if (mode == "kfold")
      cfg.mode = CvMode::KFold;
    else if (mode == "holdout")
      cfg.mode = CvMode::Holdout;
    else
      throw ValidationError("rtscv.mode must be 'kfold' or 'holdout', got '" + mode + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rtscv: ") + e.what());
  }
  cfg.validate();
}

namespace {

// Fits one fresh model per fold and scatters its predictions back by row.
CvRelabeling run_folds(const AugmentedDataset& augmented, const ClassifierFactory& factory,
                       const std::vector<Fold>& folds) {
  const Label dummy = augmented.data.n_classes - 1;
  CvRelabeling out;
  out.predictions.assign(augmented.data.size(), -1);
  out.fold_valid_sizes.resize(folds.size());
  out.fold_train_dummy.resize(folds.size());
  out.fold_train_classes.resize(folds.size());

  std::vector<std::vector<Label>> fold_preds(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    const Fold& fold = folds[f];
    Dataset fit_part = augmented.data.subset(fold.train);
    Dataset valid_part = augmented.data.subset(fold.valid);
    auto model = factory();
    model->fit(fit_part);
    fold_preds[f] = model->predict(valid_part.features);
    out.fold_valid_sizes[f] = fold.valid.size();
    out.fold_train_dummy[f] = static_cast<std::size_t>(
        std::count(fit_part.labels.begin(), fit_part.labels.end(), dummy));
    out.fold_train_classes[f] = fit_part.classes_present();
  });
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (std::size_t i = 0; i < folds[f].valid.size(); ++i)
      out.predictions[folds[f].valid[i]] = fold_preds[f][i];
  return out;
}

struct CvPhase {
  TestSample sample;
  AugmentedDataset augmented;
  CvRelabeling relabeling;
};

CvPhase run_cv_phase(const Dataset& train, const Dataset& test, const ClassifierFactory& factory,
                     const RtscvConfig& cfg) {
  cfg.validate();
  train.validate();
  if (train.empty() || train.classes_present() < 1)
    throw ValidationError("rtscv: training set has no rows");
  if (test.empty()) throw EmptyInputError("rtscv: test set is empty");
  if (test.dim() != train.dim()) throw DimensionError("rtscv: test and training dimensions differ");
  if (std::floor(cfg.c * static_cast<double>(test.size()) + 0.5) < 1.0)
    throw ValidationError("rtscv.c = " + std::to_string(cfg.c) + " selects no test rows out of " +
                          std::to_string(test.size()));

  CvPhase phase;
  phase.sample = sample_test(test, cfg.c, derive_seed(cfg.seed, 1));
  // The sample's own labels are never consulted; only its features join X-tilde.
  Dataset unlabeled = phase.sample.sample;
  unlabeled.n_classes = train.n_classes;
  std::fill(unlabeled.labels.begin(), unlabeled.labels.end(), 0);
  phase.augmented = augment(train, unlabeled, train.n_classes);
  if (cfg.mode == CvMode::KFold)
    phase.relabeling = cv_relabel(phase.augmented, factory, cfg.k, derive_seed(cfg.seed, 2));
  else
    phase.relabeling =
        holdout_relabel(phase.augmented, factory, cfg.holdout_fraction, derive_seed(cfg.seed, 2));
  return phase;
}

std::size_t train_predicted_dummy(const CvPhase& phase) {
  const Label dummy = phase.augmented.data.n_classes - 1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < phase.augmented.n_train; ++i)
    n += phase.relabeling.predictions[i] == dummy;
  return n;
}

}  // namespace

CvRelabeling cv_relabel(const AugmentedDataset& augmented, const ClassifierFactory& factory, int k,
                        Seed seed) {
  auto plan = kfold_indices(augmented.data.size(), k, augmented.data.labels, seed);
  auto out = run_folds(augmented, factory, plan.folds);
  out.stratified = plan.stratified;
  return out;
}

CvRelabeling holdout_relabel(const AugmentedDataset& augmented, const ClassifierFactory& factory,
                             double fraction, Seed seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ValidationError("holdout fraction must lie in (0, 1)");
  auto split =
      stratified_split(augmented.data.labels, augmented.data.n_classes, 1.0 - fraction, seed);
  if (split.first.empty() || split.second.empty())
    throw InsufficientDataError("holdout split leaves one side empty");
  std::vector<Fold> folds{{split.first, split.second}};
  auto out = run_folds(augmented, factory, folds);
  out.stratified = true;
  return out;
}

std::vector<std::size_t> RtscvOutcome::uu_test_indices() const {
  std::vector<std::size_t> out;
  out.reserve(uu_set.size());
  for (auto i : uu_set) out.push_back(sample.sample_indices[i]);
  return out;
}

RtscvOutcome rectify(const Dataset& train, const Dataset& test, const ClassifierFactory& factory,
                     const RtscvConfig& cfg) {
  CvPhase phase = run_cv_phase(train, test, factory, cfg);
  const auto& aug = phase.augmented;
  const auto& preds = phase.relabeling.predictions;
  const Label dummy = train.n_classes;

  RtscvOutcome out;
  out.config = cfg;
  out.cv_predictions = preds;

  // X_u: sample rows the held-out models sent to the dummy class. A sample
  // row with no prediction (outside the holdout slice) keeps its dummy label.
  std::vector<std::size_t> uu_rows;
  for (std::size_t row = 0; row < aug.data.size(); ++row) {
    const bool dummy_like = preds[row] == dummy || preds[row] < 0;
    if (aug.at(row).origin == Origin::Sample) {
      if (dummy_like) {
        out.uu_set.push_back(aug.at(row).index);
        uu_rows.push_back(row);
      }
    } else if (!cfg.restrict_uu_to_sample && preds[row] == dummy) {
      uu_rows.push_back(row);
    }
  }

  Dataset uu = aug.data.subset(uu_rows);
  std::fill(uu.labels.begin(), uu.labels.end(), dummy);
  Dataset base = train;
  base.n_classes = train.n_classes + 1;
  out.rectified_train = concat(base, uu);
  out.rectified_train.n_classes = train.n_classes + 1;

  auto model = factory();
  model->fit(out.rectified_train);
  out.rectified_model = std::move(model);

  auto& d = out.diagnostics;
  d.n_train = train.size();
  d.n_sample = phase.sample.sample.size();
  d.n_uu = out.uu_set.size();
  d.n_train_predicted_dummy = train_predicted_dummy(phase);
  d.fold_sizes = phase.relabeling.fold_valid_sizes;
  d.folds_stratified = phase.relabeling.stratified;
  for (std::size_t f = 0; f < phase.relabeling.fold_train_dummy.size(); ++f) {
    if (phase.relabeling.fold_train_dummy[f] == 0) {
      d.fold_without_dummy = true;
      d.warnings.push_back("fold " + std::to_string(f) + " has no dummy rows in its training part");
    }
    if (phase.relabeling.fold_train_classes[f] < 2)
      d.warnings.push_back("fold " + std::to_string(f) + " trained on a single class");
  }
  if (!cfg.restrict_uu_to_sample && d.n_train_predicted_dummy > 0)
    d.warnings.push_back(std::to_string(d.n_train_predicted_dummy) +
                         " training rows duplicated into X_u with the dummy label");
  out.sample = std::move(phase.sample);
  return out;
}

nlohmann::json outcome_to_json(const RtscvOutcome& o, const std::string& model_ref) {
  const auto& d = o.diagnostics;
  nlohmann::json j;
  j["engine"] = o.engine;
  j["config"] = o.config;
  j["diagnostics"] = {{"n_train", d.n_train},
                      {"n_sample", d.n_sample},
                      {"n_uu", d.n_uu},
                      {"n_train_predicted_dummy", d.n_train_predicted_dummy},
                      {"fold_sizes", d.fold_sizes},
                      {"folds_stratified", d.folds_stratified},
                      {"fold_without_dummy", d.fold_without_dummy},
                      {"warnings", d.warnings}};
  j["sample_indices"] = o.sample.sample_indices;
  j["uu_set"] = o.uu_set;
  j["uu_test_indices"] = o.uu_test_indices();
  j["n_classes"] = o.rectified_model ? o.rectified_model->n_classes() : 0;
  if (!model_ref.empty()) j["model"] = model_ref;
  return j;
}

SampleRateSearch search_sample_rate(const Dataset& train, const Dataset& test,
                                    const ClassifierFactory& factory,
                                    const std::vector<double>& candidate_rates, int k, Seed seed) {
  if (candidate_rates.empty()) throw ValidationError("sample-rate search needs candidates");
  SampleRateSearch out;
  for (double c : candidate_rates) {
    RtscvConfig cfg;
    cfg.c = c;
    cfg.k = k;
    cfg.seed = seed;
    auto phase = run_cv_phase(train, test, factory, cfg);
    const double proxy = static_cast<double>(train_predicted_dummy(phase)) /
                         static_cast<double>(phase.augmented.n_train);
    out.curve.emplace_back(c, proxy);
  }
  double best_proxy = out.curve.front().second;
  for (const auto& [c, p] : out.curve) best_proxy = std::min(best_proxy, p);
  out.best_c = -1.0;
  for (const auto& [c, p] : out.curve)
    if (p <= best_proxy + kSampleRateTolerance && c > out.best_c) out.best_c = c;
  return out;
}

FoldSearch search_folds(const Dataset& train, const Dataset& test, const ClassifierFactory& factory,
                        double c, const std::vector<int>& candidate_ks, Seed seed) {
  if (candidate_ks.empty()) throw ValidationError("fold search needs candidates");
  auto split =
      stratified_split(train.labels, train.n_classes, 1.0 - kFoldSearchValidation,
                       derive_seed(seed, 3));
  Dataset fit_part = train.subset(split.first);
  Dataset valid_part = train.subset(split.second);

  FoldSearch out;
  for (int k : candidate_ks) {
    RtscvConfig cfg;
    cfg.c = c;
    cfg.k = k;
    cfg.seed = seed;
    auto outcome = rectify(fit_part, test, factory, cfg);
    Dataset scored = concat(valid_part, outcome.sample.remainder);
    auto pred = outcome.rectified_model->predict(scored.features);
    out.curve.emplace_back(k, macro_f_measure(scored.labels, pred, train.n_classes + 1));
  }
  double best = -1.0;
  for (const auto& [k, f] : out.curve)
    if (f > best || (f == best && k < out.best_k)) {
      best = f;
      out.best_k = k;
    }
  return out;
}

}  // namespace openrect
