#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "openrect/types.hpp"

namespace openrect {

/// Isotropic Gaussian class N(mean, variance * I).
struct GaussianClassSpec {
  Vector mean;
  double variance = 1.0;
  double mixture_weight = 0.0;  // P(X_i): share of the test set
  double train_prior = 0.0;     // P'(X_i): share of the augmented training set

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

/// Gaussian with a diagonal covariance.
struct DiagonalGaussian {
  Vector mean;
  Vector variances;
};

struct TheoremVerdict {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double margin = 0.0;
  /// The inequality is undefined (non-positive log argument) and holds trivially.
  bool vacuous = false;
};

double likelihood(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x);
double log_likelihood(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x);
double likelihood(const DiagonalGaussian& spec, const Eigen::Ref<const Vector>& x);
double log_likelihood(const DiagonalGaussian& spec, const Eigen::Ref<const Vector>& x);

/// sum_i P(X_i) L_i(x). Weights must sum to 1.
double mixture_likelihood(std::span<const GaussianClassSpec> specs,
                          const Eigen::Ref<const Vector>& x);

double mahalanobis_sq(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x);

/// E_{x ~ source}[L_target(x)]: the density of N(mu_s, (sigma_s^2 + sigma_t^2) I) at mu_t.
double expected_cross_likelihood(const GaussianClassSpec& source, const GaussianClassSpec& target);

/// E_{x ~ source}[mahalanobis_sq(target, x)].
double mmd_expected(const GaussianClassSpec& source, const GaussianClassSpec& target);

// Sufficient conditions. d is taken from the mean vectors.

TheoremVerdict mle_condition(const GaussianClassSpec& known_k, const GaussianClassSpec& other_i);
TheoremVerdict mle_condition_uu(const GaussianClassSpec& known_k, const GaussianClassSpec& uu);
TheoremVerdict bayes_condition(const GaussianClassSpec& known_k, const GaussianClassSpec& other_i,
                               double sample_prior, double known_prior);
TheoremVerdict bayes_condition_uu(const GaussianClassSpec& known_k, const GaussianClassSpec& uu,
                                  double sample_prior, double known_prior);
TheoremVerdict mmd_condition(const GaussianClassSpec& known_k, const GaussianClassSpec& sample_s);
TheoremVerdict mmd_condition_uu(const GaussianClassSpec& uu, const GaussianClassSpec& known_k,
                                const GaussianClassSpec& sample_s);

/// Moment-matched isotropic summary of the test mixture (known classes plus uu).
GaussianClassSpec fit_sample_mixture(std::span<const GaussianClassSpec> known,
                                     const GaussianClassSpec& uu);

// ---------------------------------------------------------------------------
// Spec families and Monte-Carlo checks

/// m known classes, one uu class and the training prior of the sample class.
struct SpecFamily {
  std::vector<GaussianClassSpec> known;
  GaussianClassSpec uu;
  double sample_prior = 0.1;  // P'(X_s)

  std::size_t dim() const { return uu.dim(); }
  /// Test shares (known + uu) and training priors (known + sample) must each sum to 1.
  void validate() const;
  /// Known classes followed by uu.
  std::vector<GaussianClassSpec> components() const;
};

void to_json(nlohmann::json& j, const GaussianClassSpec& spec);
void from_json(const nlohmann::json& j, GaussianClassSpec& spec);
void to_json(nlohmann::json& j, const SpecFamily& family);
void from_json(const nlohmann::json& j, SpecFamily& family);

/// Reads {"families": [...]} or a bare array.
std::vector<SpecFamily> families_from_json(const nlohmann::json& doc);
nlohmann::json families_to_json(const std::vector<SpecFamily>& families);

/// Random family in dimension d with m known classes.
SpecFamily random_family(Rng& rng, int d, int m);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error of f(x) over n draws from source.
McEstimate monte_carlo(const GaussianClassSpec& source, std::size_t n, Seed seed,
                       const std::function<double(const Vector&)>& f);

enum class Theorem { Mle = 1, Bayes = 2, Mmd = 3 };
enum class Case { Known, Uu };

/// One condition and its conclusion for known class k.
struct TheoremCheck {
  std::size_t family = 0;
  Theorem theorem = Theorem::Mle;
  Case which = Case::Known;
  int k = 0;
  TheoremVerdict verdict;
  /// Estimate of (winning side - losing side) of the conclusion; should be >= 0.
  McEstimate conclusion;
  /// Satisfied condition whose conclusion estimate falls below -3 standard errors.
  bool violation = false;
};

/// Violation threshold in standard errors.
inline constexpr double kViolationSe = 3.0;

/// Draws n samples from every class of the family once and evaluates all
/// three theorems' conclusions on them. Known-case verdicts combine the
/// pairwise condition over every component (k itself included).
std::vector<TheoremCheck> check_family(const SpecFamily& family, std::size_t family_index,
                                       std::size_t n_samples, Seed seed);

std::vector<TheoremCheck> verify_families(const std::vector<SpecFamily>& families,
                                          std::size_t n_samples, Seed seed);

std::string theorem_csv_header();
std::string theorem_csv_row(const TheoremCheck& check);

}  // namespace openrect
