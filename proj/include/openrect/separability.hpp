#pragma once

#include <span>
#include <string>
#include <vector>

#include "openrect/classifiers.hpp"
#include "openrect/dataset.hpp"
#include "openrect/rtscv.hpp"

namespace openrect {

/// KnownVsKnown: mu_0 is the unweighted mean of the known class means and
/// S_w the weighted sum of known covariances. KnownVsUu: mu_0 = mu_u and
/// S_w = Sigma_u. Known-class weights are renormalized over the known classes
/// in both modes.
enum class ScatterMode { KnownVsKnown, KnownVsUu };

using SquareMatrix = Eigen::MatrixXd;

struct ScatterSummary {
  SquareMatrix s_b;
  SquareMatrix s_w;
  double j1 = 1.0;
  ScatterMode mode = ScatterMode::KnownVsKnown;
};

SquareMatrix between_scatter(std::span<const Vector> class_means, std::span<const double> weights,
                             const Vector& reference);
SquareMatrix within_scatter(std::span<const SquareMatrix> class_covs,
                            std::span<const double> weights);
/// 1 + trace(s_b) / trace(s_w). Throws SingularScatterError when trace(s_w) is 0.
double j1(const SquareMatrix& s_b, const SquareMatrix& s_w);

/// Per-class weights, means and (population) covariances.
struct ClassMoments {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<SquareMatrix> covs;
};

ClassMoments empirical_moments(const Dataset& data);
/// Components sharing a class id are merged into one class (mixture moments).
ClassMoments spec_moments(const GaussianMixtureSpec& spec);

/// uu_class_ids must be non-empty in KnownVsUu mode; those classes are pooled into one X_u.
ScatterSummary scatter_summary(const ClassMoments& moments, std::span<const Label> uu_class_ids,
                               ScatterMode mode);

enum class SweepAxis { Spread, Variance };

struct SeparabilitySweep {
  GaussianMixtureSpec base;
  std::vector<Label> uu_class_ids;
  /// KnownVsKnown varies the known classes, KnownVsUu varies the unknown ones.
  ScatterMode mode = ScatterMode::KnownVsKnown;
  /// Spread scales mean offsets from the known centroid; Variance scales variances.
  SweepAxis axis = SweepAxis::Spread;
  std::vector<double> levels;
  std::size_t n_per_component = 200;
  double split_fraction = 0.5;
};

struct SeparabilityPoint {
  double level = 0.0;
  double j1 = 0.0;
  double accuracy = 0.0;
  bool skipped = false;
  std::string note;
};

/// Applies one sweep level to the base spec.
GaussianMixtureSpec apply_level(const SeparabilitySweep& sweep, double level);

std::vector<SeparabilityPoint> sweep_separability(const SeparabilitySweep& sweep,
                                                  const ClassifierFactory& factory,
                                                  const RtscvConfig& cfg);

}  // namespace openrect
