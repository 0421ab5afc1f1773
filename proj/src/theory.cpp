#include "openrect/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/random/normal_distribution.hpp>

#include "openrect/error.hpp"
#include "openrect/parallel.hpp"

namespace openrect {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kWeightTol = 1e-9;

void check_variance(double v, const char* who) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(who) + ": variance must be positive and finite");
}

void check_same_dim(const GaussianClassSpec& a, const GaussianClassSpec& b, const char* who) {
  if (a.mean.size() != b.mean.size())
    throw DimensionError(std::string(who) + ": dimension mismatch (" +
                         std::to_string(a.mean.size()) + " vs " + std::to_string(b.mean.size()) +
                         ")");
  check_variance(a.variance, who);
  check_variance(b.variance, who);
}

TheoremVerdict make_verdict(double lhs, double rhs) {
  TheoremVerdict v;
  v.lhs = lhs;
  v.rhs = rhs;
  v.margin = lhs - rhs;
  v.satisfied = v.margin >= 0.0;
  return v;
}

// Log density of N(center, var I) in dimension d at squared distance dist2.
double iso_log_density(double dist2, double var, double d) {
  return -0.5 * d * (kLog2Pi + std::log(var)) - 0.5 * dist2 / var;
}

}  // namespace

double log_likelihood(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x) {
  if (x.size() != spec.mean.size()) throw DimensionError("likelihood: dimension mismatch");
  check_variance(spec.variance, "likelihood");
  return iso_log_density((x - spec.mean).squaredNorm(), spec.variance,
                         static_cast<double>(x.size()));
}

double likelihood(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x) {
  return std::exp(log_likelihood(spec, x));
}

double log_likelihood(const DiagonalGaussian& spec, const Eigen::Ref<const Vector>& x) {
  if (x.size() != spec.mean.size() || spec.variances.size() != spec.mean.size())
    throw DimensionError("likelihood: dimension mismatch");
  double out = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    check_variance(spec.variances[j], "likelihood");
    const double diff = x[j] - spec.mean[j];
    out += -0.5 * (kLog2Pi + std::log(spec.variances[j])) - 0.5 * diff * diff / spec.variances[j];
  }
  return out;
}

double likelihood(const DiagonalGaussian& spec, const Eigen::Ref<const Vector>& x) {
  return std::exp(log_likelihood(spec, x));
}

double mixture_likelihood(std::span<const GaussianClassSpec> specs,
                          const Eigen::Ref<const Vector>& x) {
  if (specs.empty()) throw ValidationError("mixture_likelihood: no components");
  double total_weight = 0.0;
  for (const auto& s : specs) {
    if (s.mixture_weight < 0.0) throw ValidationError("mixture weight must be >= 0");
    total_weight += s.mixture_weight;
  }
  if (std::abs(total_weight - 1.0) > kWeightTol)
    throw ValidationError("mixture weights sum to " + std::to_string(total_weight) + ", not 1");
  double out = 0.0;
  for (const auto& s : specs) out += s.mixture_weight * likelihood(s, x);
  return out;
}

double mahalanobis_sq(const GaussianClassSpec& spec, const Eigen::Ref<const Vector>& x) {
  if (x.size() != spec.mean.size()) throw DimensionError("mahalanobis_sq: dimension mismatch");
  check_variance(spec.variance, "mahalanobis_sq");
  return (x - spec.mean).squaredNorm() / spec.variance;
}

double expected_cross_likelihood(const GaussianClassSpec& source, const GaussianClassSpec& target) {
  check_same_dim(source, target, "expected_cross_likelihood");
  return std::exp(iso_log_density((source.mean - target.mean).squaredNorm(),
                                   source.variance + target.variance,
                                   static_cast<double>(source.dim())));
}

double mmd_expected(const GaussianClassSpec& source, const GaussianClassSpec& target) {
  check_same_dim(source, target, "mmd_expected");
  const double d = static_cast<double>(source.dim());
  return d * source.variance / target.variance +
         (source.mean - target.mean).squaredNorm() / target.variance;
}

TheoremVerdict mle_condition(const GaussianClassSpec& k, const GaussianClassSpec& i) {
  check_same_dim(k, i, "mle_condition");
  const double d = static_cast<double>(k.dim());
  const double sum = k.variance + i.variance;
  return make_verdict((k.mean - i.mean).squaredNorm(),
                      d * sum * std::log(2.0 * k.variance / sum));
}

TheoremVerdict mle_condition_uu(const GaussianClassSpec& k, const GaussianClassSpec& u) {
  check_same_dim(k, u, "mle_condition_uu");
  if (!(u.mixture_weight > 0.0)) throw ValidationError("mle_condition_uu: P(X_u) must be > 0");
  if (!(k.mixture_weight < 1.0)) throw ValidationError("mle_condition_uu: P(X_k) must be < 1");
  const double d = static_cast<double>(k.dim());
  const double sum = k.variance + u.variance;
  return make_verdict((k.mean - u.mean).squaredNorm() / sum,
                      2.0 * std::log((1.0 - k.mixture_weight) / u.mixture_weight) +
                          d * std::log(2.0 * u.variance / sum));
}

namespace {

void check_prior(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

TheoremVerdict bayes_condition(const GaussianClassSpec& k, const GaussianClassSpec& i,
                               double sample_prior, double known_prior) {
  check_same_dim(k, i, "bayes_condition");
  check_prior(sample_prior, "P'(X_s)");
  check_prior(known_prior, "P'(X_k)");
  const double d = static_cast<double>(k.dim());
  const double sum = k.variance + i.variance;
  return make_verdict((k.mean - i.mean).squaredNorm() / sum,
                      2.0 * std::log(sample_prior / known_prior) +
                          d * std::log(2.0 * k.variance / sum));
}

TheoremVerdict bayes_condition_uu(const GaussianClassSpec& k, const GaussianClassSpec& u,
                                  double sample_prior, double known_prior) {
  check_same_dim(k, u, "bayes_condition_uu");
  check_prior(sample_prior, "P'(X_s)");
  check_prior(known_prior, "P'(X_k)");
  if (!(u.mixture_weight > 0.0)) throw ValidationError("bayes_condition_uu: P(X_u) must be > 0");
  const double d = static_cast<double>(k.dim());
  const double sum = k.variance + u.variance;
  const double lhs = (k.mean - u.mean).squaredNorm() / sum;
  const double numerator = known_prior - sample_prior * k.mixture_weight;
  if (numerator <= 0.0) {
    TheoremVerdict v;
    v.lhs = lhs;
    v.rhs = -std::numeric_limits<double>::infinity();
    v.margin = std::numeric_limits<double>::infinity();
    v.satisfied = true;
    v.vacuous = true;
    return v;
  }
  return make_verdict(lhs, 2.0 * std::log(numerator / (sample_prior * u.mixture_weight)) +
                               d * std::log(2.0 * u.variance / sum));
}

TheoremVerdict mmd_condition(const GaussianClassSpec& k, const GaussianClassSpec& s) {
  check_same_dim(k, s, "mmd_condition");
  const double d = static_cast<double>(k.dim());
  return make_verdict((k.mean - s.mean).squaredNorm(),
                      d * s.variance * (1.0 - k.variance / s.variance));
}

TheoremVerdict mmd_condition_uu(const GaussianClassSpec& u, const GaussianClassSpec& k,
                                const GaussianClassSpec& s) {
  check_same_dim(u, k, "mmd_condition_uu");
  check_same_dim(u, s, "mmd_condition_uu");
  const double d = static_cast<double>(u.dim());
  return make_verdict(
      (u.mean - k.mean).squaredNorm() / k.variance - (u.mean - s.mean).squaredNorm() / s.variance,
      d * (u.variance / s.variance - u.variance / k.variance));
}

GaussianClassSpec fit_sample_mixture(std::span<const GaussianClassSpec> known,
                                     const GaussianClassSpec& uu) {
  std::vector<GaussianClassSpec> all(known.begin(), known.end());
  all.push_back(uu);
  double total = 0.0;
  for (const auto& c : all) {
    check_same_dim(c, uu, "fit_sample_mixture");
    if (c.mixture_weight < 0.0) throw ValidationError("mixture weight must be >= 0");
    total += c.mixture_weight;
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw ValidationError("mixture weights sum to " + std::to_string(total) + ", not 1");

  const double d = static_cast<double>(uu.dim());
  GaussianClassSpec s;
  s.mean = Vector::Zero(uu.mean.size());
  double second = 0.0;  // E||x||^2 over the mixture
  for (const auto& c : all) {
    s.mean += c.mixture_weight * c.mean;
    second += c.mixture_weight * (d * c.variance + c.mean.squaredNorm());
  }
  s.variance = (second - s.mean.squaredNorm()) / d;
  s.mixture_weight = 1.0;
  return s;
}

// ---------------------------------------------------------------------------

void SpecFamily::validate() const {
  if (known.empty()) throw ValidationError("spec family needs at least one known class");
  double test_total = uu.mixture_weight, train_total = sample_prior;
  for (const auto& k : known) {
    check_same_dim(k, uu, "spec family");
    if (k.mixture_weight < 0.0 || k.train_prior < 0.0)
      throw ValidationError("spec family: negative weight");
    test_total += k.mixture_weight;
    train_total += k.train_prior;
  }
  check_variance(uu.variance, "spec family");
  if (!(uu.mixture_weight > 0.0)) throw ValidationError("spec family: P(X_u) must be > 0");
  if (!(sample_prior > 0.0 && sample_prior < 1.0))
    throw ValidationError("spec family: sample_prior must lie in (0, 1)");
  if (std::abs(test_total - 1.0) > kWeightTol)
    throw ValidationError("spec family: mixture weights sum to " + std::to_string(test_total));
  if (std::abs(train_total - 1.0) > kWeightTol)
    throw ValidationError("spec family: training priors sum to " + std::to_string(train_total));
}

std::vector<GaussianClassSpec> SpecFamily::components() const {
  auto out = known;
  out.push_back(uu);
  return out;
}

void to_json(nlohmann::json& j, const GaussianClassSpec& spec) {
  j = {{"mean", std::vector<double>(spec.mean.data(), spec.mean.data() + spec.mean.size())},
       {"variance", spec.variance},
       {"mixture_weight", spec.mixture_weight},
       {"train_prior", spec.train_prior}};
}

void from_json(const nlohmann::json& j, GaussianClassSpec& spec) {
  try {
    auto mean = j.at("mean").get<std::vector<double>>();
    spec.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    spec.variance = j.at("variance").get<double>();
    spec.mixture_weight = j.value("mixture_weight", 0.0);
    spec.train_prior = j.value("train_prior", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("class spec: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const SpecFamily& family) {
  j = {{"known", family.known}, {"uu", family.uu}, {"sample_prior", family.sample_prior}};
}

void from_json(const nlohmann::json& j, SpecFamily& family) {
  try {
    family.known = j.at("known").get<std::vector<GaussianClassSpec>>();
    family.uu = j.at("uu").get<GaussianClassSpec>();
    family.sample_prior = j.at("sample_prior").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("spec family: ") + e.what());
  }
  family.validate();
}

std::vector<SpecFamily> families_from_json(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("families")) throw ValidationError("expected a 'families' array");
    list = &doc.at("families");
  }
  if (!list->is_array()) throw ValidationError("'families' must be an array");
  std::vector<SpecFamily> out;
  for (const auto& item : *list) out.push_back(item.get<SpecFamily>());
  return out;
}

nlohmann::json families_to_json(const std::vector<SpecFamily>& families) {
  return {{"families", families}};
}

namespace {

// Normalized shifted Exp(1) draws; the shift keeps every weight away from 0.
std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = e(rng) + 0.05);
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

SpecFamily random_family(Rng& rng, int d, int m) {
  if (d < 1 || m < 1) throw ValidationError("random_family: need d >= 1 and m >= 1");
  std::uniform_real_distribution<double> var_dist(0.5, 2.0);
  std::uniform_real_distribution<double> spread_dist(0.5, 4.0);
  std::uniform_real_distribution<double> prior_dist(0.05, 0.4);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Mean offsets are scaled so that squared separations are comparable to
  // d times the variances, which puts conditions on both sides of their thresholds.
  const double spread = spread_dist(rng);
  auto draw_mean = [&] {
    Vector v(d);
    for (int j = 0; j < d; ++j) v[j] = spread * normal(rng);
    return v;
  };

  SpecFamily f;
  auto test_w = dirichlet(rng, static_cast<std::size_t>(m) + 1);
  f.sample_prior = prior_dist(rng);
  auto train_w = dirichlet(rng, static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    GaussianClassSpec c;
    c.mean = draw_mean();
    c.variance = var_dist(rng);
    c.mixture_weight = test_w[static_cast<std::size_t>(i)];
    c.train_prior = (1.0 - f.sample_prior) * train_w[static_cast<std::size_t>(i)];
    f.known.push_back(std::move(c));
  }
  f.uu.mean = draw_mean();
  f.uu.variance = var_dist(rng);
  f.uu.mixture_weight = test_w.back();
  return f;
}

namespace {

// Sums shifted by the first value, which keeps the variance numerically stable
// without a division per sample.
struct Running {
  std::size_t n = 0;
  double shift = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    if (n == 0) shift = x;
    ++n;
    const double y = x - shift;
    sum += y;
    sum_sq += y * y;
  }
  McEstimate estimate() const {
    McEstimate e;
    e.n = n;
    if (n == 0) return e;
    const double nn = static_cast<double>(n);
    const double mean_y = sum / nn;
    e.mean = shift + mean_y;
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - nn * mean_y * mean_y) / (nn - 1.0));
      e.std_error = std::sqrt(var / nn);
    }
    return e;
  }
};

// Ziggurat sampler; the Monte-Carlo loops are dominated by normal draws.
using StdNormal = boost::random::normal_distribution<double>;

void draw(const GaussianClassSpec& source, Rng& rng, StdNormal& normal, Vector& x) {
  const double sd = std::sqrt(source.variance);
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = source.mean[j] + sd * normal(rng);
}

}  // namespace

McEstimate monte_carlo(const GaussianClassSpec& source, std::size_t n, Seed seed,
                       const std::function<double(const Vector&)>& f) {
  check_variance(source.variance, "monte_carlo");
  if (n == 0) throw ValidationError("monte_carlo: need at least one sample");
  Rng rng(seed);
  StdNormal normal(0.0, 1.0);
  Vector x(source.mean.size());
  Running acc;
  for (std::size_t i = 0; i < n; ++i) {
    draw(source, rng, normal, x);
    acc.add(f(x));
  }
  return acc.estimate();
}

namespace {

// Smallest-margin verdict over the pairwise condition against every component.
template <class Cond>
TheoremVerdict all_components(const std::vector<GaussianClassSpec>& comps, Cond cond) {
  TheoremVerdict worst;
  bool first = true;
  for (const auto& c : comps) {
    auto v = cond(c);
    if (first || v.margin < worst.margin) worst = v;
    first = false;
  }
  return worst;
}

}  // namespace

std::vector<TheoremCheck> check_family(const SpecFamily& family, std::size_t family_index,
                                       std::size_t n_samples, Seed seed) {
  family.validate();
  if (n_samples < 2) throw ValidationError("need at least two Monte-Carlo samples");
  const auto comps = family.components();
  const std::size_t m = family.known.size();
  const std::size_t n_comp = comps.size();
  const GaussianClassSpec s = fit_sample_mixture(family.known, family.uu);
  const double ps = family.sample_prior;

  // Running sums, indexed [theorem][k]: conclusions for known-class sources
  // (drawn from X_k) and for the uu source against each k.
  std::vector<std::array<Running, 3>> known_acc(m), uu_acc(m);
  Vector x(static_cast<Eigen::Index>(family.dim()));
  std::vector<double> lik(n_comp), md(n_comp);
  StdNormal normal(0.0, 1.0);

  const double d = static_cast<double>(family.dim());
  std::vector<double> log_norm(n_comp), inv_var(n_comp);
  for (std::size_t i = 0; i < n_comp; ++i) {
    log_norm[i] = iso_log_density(0.0, comps[i].variance, d);
    inv_var[i] = 1.0 / comps[i].variance;
  }
  auto evaluate = [&](const Vector& pt) {
    double ls = 0.0;
    for (std::size_t i = 0; i < n_comp; ++i) {
      md[i] = (pt - comps[i].mean).squaredNorm() * inv_var[i];
      lik[i] = std::exp(log_norm[i] - 0.5 * md[i]);
      ls += comps[i].mixture_weight * lik[i];
    }
    return std::pair{ls, (pt - s.mean).squaredNorm() / s.variance};
  };

  for (std::size_t src = 0; src < n_comp; ++src) {
    Rng rng(derive_seed(seed, src));
    for (std::size_t t = 0; t < n_samples; ++t) {
      draw(comps[src], rng, normal, x);
      const auto [ls, ds] = evaluate(x);
      if (src < m) {
        const std::size_t k = src;
        known_acc[k][0].add(lik[k] - ls);
        known_acc[k][1].add(comps[k].train_prior * lik[k] - ps * ls);
        known_acc[k][2].add(ds - md[k]);
      } else {
        for (std::size_t k = 0; k < m; ++k) {
          uu_acc[k][0].add(ls - lik[k]);
          uu_acc[k][1].add(ps * ls - comps[k].train_prior * lik[k]);
          uu_acc[k][2].add(md[k] - ds);
        }
      }
    }
  }

  std::vector<TheoremCheck> out;
  auto push = [&](Theorem th, Case c, std::size_t k, TheoremVerdict v, McEstimate e) {
    TheoremCheck chk;
    chk.family = family_index;
    chk.theorem = th;
    chk.which = c;
    chk.k = static_cast<int>(k);
    chk.verdict = v;
    chk.conclusion = e;
    chk.violation = v.satisfied && e.mean < -kViolationSe * e.std_error;
    out.push_back(chk);
  };
  for (std::size_t k = 0; k < m; ++k) {
    const auto& kc = family.known[k];
    push(Theorem::Mle, Case::Known, k,
         all_components(comps, [&](const GaussianClassSpec& i) { return mle_condition(kc, i); }),
         known_acc[k][0].estimate());
    push(Theorem::Mle, Case::Uu, k, mle_condition_uu(kc, family.uu), uu_acc[k][0].estimate());
    push(Theorem::Bayes, Case::Known, k, all_components(comps, [&](const GaussianClassSpec& i) {
           return bayes_condition(kc, i, ps, kc.train_prior);
         }),
         known_acc[k][1].estimate());
    push(Theorem::Bayes, Case::Uu, k, bayes_condition_uu(kc, family.uu, ps, kc.train_prior),
         uu_acc[k][1].estimate());
    push(Theorem::Mmd, Case::Known, k, mmd_condition(kc, s), known_acc[k][2].estimate());
    push(Theorem::Mmd, Case::Uu, k, mmd_condition_uu(family.uu, kc, s), uu_acc[k][2].estimate());
  }
  return out;
}

std::vector<TheoremCheck> verify_families(const std::vector<SpecFamily>& families,
                                          std::size_t n_samples, Seed seed) {
  std::vector<std::vector<TheoremCheck>> per(families.size());
  parallel_for(families.size(), [&](std::size_t f) {
    per[f] = check_family(families[f], f, n_samples, derive_seed(seed, f));
  });
  std::vector<TheoremCheck> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string theorem_csv_header() {
  return "family,theorem,k,satisfied,vacuous,lhs,rhs,margin,mc_mean,mc_se,mc_n,violation,case";
}

namespace {

std::string fmt(double v) {
  // Infinite bounds (vacuous conditions) are left empty.
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string theorem_csv_row(const TheoremCheck& c) {
  return std::to_string(c.family) + "," + std::to_string(static_cast<int>(c.theorem)) + "," +
         std::to_string(c.k) + "," +
         (c.verdict.satisfied ? "1" : "0") + "," + (c.verdict.vacuous ? "1" : "0") + "," +
         fmt(c.verdict.lhs) + "," + fmt(c.verdict.rhs) + "," + fmt(c.verdict.margin) + "," +
         fmt(c.conclusion.mean) + "," + fmt(c.conclusion.std_error) + "," +
         std::to_string(c.conclusion.n) + "," + (c.violation ? "1" : "0") + "," + (c.which == Case::Known ? "known" : "uu");
}

}  // namespace openrect
