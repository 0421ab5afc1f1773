#include "openrect/separability.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "openrect/error.hpp"
#include "openrect/metrics.hpp"
#include "openrect/parallel.hpp"

namespace openrect {

SquareMatrix between_scatter(std::span<const Vector> class_means, std::span<const double> weights,
                             const Vector& reference) {
  if (class_means.size() != weights.size())
    throw ValidationError("between_scatter: means and weights differ in length");
  const auto d = reference.size();
  SquareMatrix out = SquareMatrix::Zero(d, d);
  for (std::size_t i = 0; i < class_means.size(); ++i) {
    if (class_means[i].size() != d) throw DimensionError("between_scatter: dimension mismatch");
    const Vector diff = class_means[i] - reference;
    out.noalias() += weights[i] * diff * diff.transpose();
  }
  return out;
}

SquareMatrix within_scatter(std::span<const SquareMatrix> class_covs,
                            std::span<const double> weights) {
  if (class_covs.size() != weights.size())
    throw ValidationError("within_scatter: covariances and weights differ in length");
  if (class_covs.empty()) throw ValidationError("within_scatter: no classes");
  const auto d = class_covs.front().rows();
  SquareMatrix out = SquareMatrix::Zero(d, d);
  for (std::size_t i = 0; i < class_covs.size(); ++i) {
    if (class_covs[i].rows() != d || class_covs[i].cols() != d)
      throw DimensionError("within_scatter: dimension mismatch");
    out += weights[i] * class_covs[i];
  }
  return out;
}

double j1(const SquareMatrix& s_b, const SquareMatrix& s_w) {
  const double tw = s_w.trace();
  if (!(tw > 0.0)) throw SingularScatterError("J1: trace of the within-class scatter is 0");
  return 1.0 + s_b.trace() / tw;
}

ClassMoments empirical_moments(const Dataset& data) {
  data.validate();
  const auto d = static_cast<Eigen::Index>(data.dim());
  const auto counts = data.class_counts();
  ClassMoments m;
  m.weights.assign(counts.size(), 0.0);
  m.means.assign(counts.size(), Vector::Zero(d));
  m.covs.assign(counts.size(), SquareMatrix::Zero(d, d));
  for (std::size_t i = 0; i < data.size(); ++i)
    m.means[static_cast<std::size_t>(data.labels[i])] += data.features.row(static_cast<Eigen::Index>(i)).transpose();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0) m.means[c] /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    const Vector diff = data.features.row(static_cast<Eigen::Index>(i)).transpose() - m.means[c];
    m.covs[c].noalias() += diff * diff.transpose();
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) m.covs[c] /= static_cast<double>(counts[c]);
    m.weights[c] = static_cast<double>(counts[c]) / static_cast<double>(data.size());
  }
  return m;
}

ClassMoments spec_moments(const GaussianMixtureSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Label max_id = 0;
  for (const auto& c : spec.components) max_id = std::max(max_id, c.class_id);
  const auto n = static_cast<std::size_t>(max_id) + 1;
  ClassMoments m;
  m.weights.assign(n, 0.0);
  m.means.assign(n, Vector::Zero(d));
  m.covs.assign(n, SquareMatrix::Zero(d, d));
  // Accumulate weighted first and second moments, then center.
  for (const auto& c : spec.components) {
    const auto k = static_cast<std::size_t>(c.class_id);
    m.weights[k] += c.weight;
    m.means[k] += c.weight * c.mean;
    m.covs[k] += c.weight * (c.variance * SquareMatrix::Identity(d, d) + c.mean * c.mean.transpose());
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (m.weights[k] <= 0.0) continue;
    m.means[k] /= m.weights[k];
    m.covs[k] = m.covs[k] / m.weights[k] - m.means[k] * m.means[k].transpose();
  }
  return m;
}

ScatterSummary scatter_summary(const ClassMoments& moments, std::span<const Label> uu_class_ids,
                               ScatterMode mode) {
  const std::size_t n = moments.weights.size();
  std::vector<bool> is_uu(n, false);
  for (Label u : uu_class_ids) {
    if (u < 0 || static_cast<std::size_t>(u) >= n)
      throw ValidationError("scatter: unknown-class id out of range");
    is_uu[static_cast<std::size_t>(u)] = true;
  }

  std::vector<Vector> known_means;
  std::vector<SquareMatrix> known_covs;
  std::vector<double> known_w;
  double uu_w = 0.0;
  const auto d = moments.means.empty() ? 0 : moments.means.front().size();
  Vector uu_first = Vector::Zero(d);
  SquareMatrix uu_second = SquareMatrix::Zero(d, d);
  for (std::size_t c = 0; c < n; ++c) {
    if (moments.weights[c] <= 0.0) continue;
    if (is_uu[c]) {
      // Pool the unknown classes as one mixture.
      uu_w += moments.weights[c];
      uu_first += moments.weights[c] * moments.means[c];
      uu_second += moments.weights[c] *
                   (moments.covs[c] + moments.means[c] * moments.means[c].transpose());
    } else {
      known_means.push_back(moments.means[c]);
      known_covs.push_back(moments.covs[c]);
      known_w.push_back(moments.weights[c]);
    }
  }
  if (known_means.empty()) throw ValidationError("scatter: no known classes");
  double total = 0.0;
  for (double w : known_w) total += w;
  for (double& w : known_w) w /= total;

  ScatterSummary s;
  s.mode = mode;
  if (mode == ScatterMode::KnownVsKnown) {
    Vector mu0 = Vector::Zero(d);
    for (const auto& mu : known_means) mu0 += mu;
    mu0 /= static_cast<double>(known_means.size());
    s.s_b = between_scatter(known_means, known_w, mu0);
    s.s_w = within_scatter(known_covs, known_w);
  } else {
    if (!(uu_w > 0.0)) throw ValidationError("scatter: known-vs-uu mode needs an unknown class");
    const Vector mu_u = uu_first / uu_w;
    s.s_b = between_scatter(known_means, known_w, mu_u);
    s.s_w = uu_second / uu_w - mu_u * mu_u.transpose();
  }
  s.j1 = j1(s.s_b, s.s_w);
  return s;
}

GaussianMixtureSpec apply_level(const SeparabilitySweep& sweep, double level) {
  if (!(level > 0.0)) throw ValidationError("sweep levels must be > 0");
  auto is_uu = [&](Label id) {
    return std::find(sweep.uu_class_ids.begin(), sweep.uu_class_ids.end(), id) !=
           sweep.uu_class_ids.end();
  };
  GaussianMixtureSpec spec = sweep.base;
  Vector centroid = Vector::Zero(static_cast<Eigen::Index>(spec.dim()));
  int n_known = 0;
  for (const auto& c : spec.components)
    if (!is_uu(c.class_id)) centroid += c.mean, ++n_known;
  if (n_known == 0) throw ValidationError("sweep: base spec has no known components");
  centroid /= n_known;

  const bool target_uu = sweep.mode == ScatterMode::KnownVsUu;
  for (auto& c : spec.components) {
    if (is_uu(c.class_id) != target_uu) continue;
    if (sweep.axis == SweepAxis::Spread)
      c.mean = centroid + level * (c.mean - centroid);
    else
      c.variance *= level;
  }
  return spec;
}

std::vector<SeparabilityPoint> sweep_separability(const SeparabilitySweep& sweep,
                                                  const ClassifierFactory& factory,
                                                  const RtscvConfig& cfg) {
  if (sweep.levels.empty()) throw ValidationError("separability sweep needs levels");
  if (sweep.mode == ScatterMode::KnownVsUu && sweep.uu_class_ids.empty())
    throw ValidationError("known-vs-uu sweep needs unknown classes");
  cfg.validate();
  std::vector<SeparabilityPoint> out(sweep.levels.size());
  parallel_for(sweep.levels.size(), [&](std::size_t i) {
    SeparabilityPoint& p = out[i];
    p.level = sweep.levels[i];
    const auto spec = apply_level(sweep, p.level);
    const Dataset full = generate_gaussian(spec, sweep.n_per_component);
    try {
      p.j1 = scatter_summary(empirical_moments(full), sweep.uu_class_ids, sweep.mode).j1;
    } catch (const SingularScatterError& e) {
      p.skipped = true;
      p.note = e.what();
      return;
    }
    auto sc = make_scenario(full, sweep.uu_class_ids, sweep.split_fraction, derive_seed(spec.seed, 7));
    auto outcome = rectify(sc.train, sc.test, factory, cfg);
    const auto pred = outcome.rectified_model->predict(outcome.sample.remainder.features);
    p.accuracy = overall_accuracy(outcome.sample.remainder.labels, pred);
  });
  return out;
}

}  // namespace openrect
