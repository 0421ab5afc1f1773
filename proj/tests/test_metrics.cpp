#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "openrect/error.hpp"
#include "openrect/metrics.hpp"

using namespace openrect;

namespace {

double pair_count_auroc(const std::vector<double>& s, const std::vector<char>& uu) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (uu[i] && !uu[j]) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

double auroc_of(const std::vector<double>& s, const std::vector<char>& uu) {
  auto flags = std::make_unique<bool[]>(uu.size());
  for (std::size_t i = 0; i < uu.size(); ++i) flags[i] = uu[i];
  return auroc(s, std::span<const bool>(flags.get(), uu.size()));
}

}  // namespace

TEST_CASE("openness: closed set and table values") {
  CHECK(openness(10, 10, 10).value == 0.0);
  CHECK(openness(7, 10, 7).value == doctest::Approx(0.0925).epsilon(1e-3));
  // One decimal of the percentages in the tabular results.
  auto pct = [](int a, int b, int c) { return std::round(1000.0 * openness(a, b, c).value) / 10.0; };
  CHECK(pct(7, 10, 7) == 9.3);
  CHECK(pct(5, 10, 5) == 18.4);
  CHECK(pct(6, 10, 6) == 13.4);
  CHECK(pct(4, 10, 4) == 24.4);
  CHECK(pct(2, 10, 2) == 42.3);
  CHECK(pct(15, 26, 15) == 14.5);
  CHECK(pct(10, 26, 10) == 25.5);
  CHECK(pct(14, 20, 14) == 9.3);
  CHECK(pct(10, 20, 10) == 18.4);

  auto c = openness(10, 5, 5);
  CHECK(c.clamped);
  CHECK(c.value == 0.0);
  for (int m = 1; m < 10; ++m) CHECK(openness(m, 10, 10).value > openness(m + 1, 10, 10).value);
  CHECK_THROWS_AS(openness(0, 10, 10), ValidationError);
}

TEST_CASE("macro F: hand-computed binary case and invariances") {
  std::vector<Label> truth = {0, 0, 1, 1};
  std::vector<Label> all0 = {0, 0, 0, 0};
  CHECK(macro_f_measure(truth, all0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(macro_f_measure(truth, truth, 2) == 1.0);

  std::vector<Label> t2 = {1, 0, 1, 0}, p2 = {0, 0, 0, 0};
  CHECK(macro_f_measure(t2, p2, 2) == macro_f_measure(truth, all0, 2));
  CHECK_THROWS_AS(macro_f_measure(std::vector<Label>{}, std::vector<Label>{}, 2), ValidationError);
}

TEST_CASE("accuracies: strata and sentinel") {
  std::vector<Label> truth = {0, 1, 2, 2};
  std::vector<Label> pred = {0, 1, 0, 1};
  CHECK(*classification_accuracy(truth, pred, 2) == 1.0);
  CHECK(*detection_accuracy(truth, pred, 2) == 0.0);
  std::vector<Label> known_only = {0, 1, 1};
  CHECK_FALSE(detection_accuracy(known_only, known_only, 2).has_value());
}

TEST_CASE("auroc: trivial cases and pair-count oracle") {
  CHECK(auroc_of({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}) == 1.0);
  CHECK(auroc_of({0.5, 0.5, 0.5}, {1, 0, 0}) == 0.5);
  CHECK_THROWS_AS(auroc_of({0.1, 0.2}, {1, 1}), ValidationError);

  Rng rng(17);
  std::uniform_int_distribution<int> coarse(0, 20);  // plenty of ties
  std::bernoulli_distribution coin(0.3);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> s(200);
    std::vector<char> uu(200);
    for (std::size_t i = 0; i < s.size(); ++i) {
      uu[i] = coin(rng);
      s[i] = coarse(rng) + (uu[i] ? 3 : 0);
    }
    const double a = auroc_of(s, uu);
    CHECK(a == doctest::Approx(pair_count_auroc(s, uu)).epsilon(1e-15));
    // Strictly monotone transform leaves the value unchanged.
    std::vector<double> t(s.size());
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(0.3 * v) - 7; });
    CHECK(auroc_of(t, uu) == a);
  }
}

TEST_CASE("evaluate: every figure recomputes from the confusion matrix") {
  Rng rng(3);
  const int m = 4;
  std::uniform_int_distribution<int> label(0, m);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Label> truth(500), pred(500);
  std::vector<double> score(500);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = label(rng);
    pred[i] = u(rng) < 0.7 ? truth[i] : label(rng);
    score[i] = u(rng) + (truth[i] == m ? 0.4 : 0.0);
  }
  auto r = evaluate(truth, pred, m, score, 0.25);
  const auto& cm = r.confusion;
  REQUIRE(cm.size() == m + 1);

  double f_sum = 0, known_ok = 0, known_n = 0;
  for (int c = 0; c <= m; ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    const double p = cm.col_sum(c) ? tp / static_cast<double>(cm.col_sum(c)) : 0.0;
    const double rc = cm.row_sum(c) ? tp / static_cast<double>(cm.row_sum(c)) : 0.0;
    f_sum += p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
    if (c < m) {
      known_ok += tp;
      known_n += static_cast<double>(cm.row_sum(c));
    }
  }
  double diag = 0;
  for (int c = 0; c <= m; ++c) diag += static_cast<double>(cm.at(c, c));
  CHECK(r.macro_f == doctest::Approx(f_sum / (m + 1)).epsilon(1e-14));
  CHECK(*r.classification_acc == doctest::Approx(known_ok / known_n).epsilon(1e-14));
  CHECK(*r.detection_acc ==
        doctest::Approx(static_cast<double>(cm.at(m, m)) / static_cast<double>(cm.row_sum(m)))
            .epsilon(1e-14));
  CHECK(r.overall_acc == doctest::Approx(diag / 500.0).epsilon(1e-14));
  CHECK(cm.total() == 500);
  for (int c = 0; c <= m; ++c)
    CHECK(cm.row_sum(c) == static_cast<std::size_t>(std::count(truth.begin(), truth.end(), c)));
  REQUIRE(r.auroc.has_value());
  CHECK(r.openness == 0.25);

  const auto classwise = classwise_f_measure(cm);
  CHECK(r.macro_f <= *std::max_element(classwise.begin(), classwise.end()));
  CHECK(r.macro_f >= *std::min_element(classwise.begin(), classwise.end()));
}

TEST_CASE("evaluate: absent metrics become empty CSV cells") {
  std::vector<Label> truth = {0, 1, 1}, pred = {0, 1, 0};
  auto r = evaluate(truth, pred, 2);
  CHECK_FALSE(r.detection_acc.has_value());
  CHECK_FALSE(r.auroc.has_value());
  const auto row = report_csv_row(r);
  const auto header = report_csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  CHECK(row.find(",,") != std::string::npos);
}

TEST_CASE("spearman: ranks with ties") {
  std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 4, 6, 8, 100};
  CHECK(spearman(a, b) == doctest::Approx(1.0));
  std::vector<double> c = {5, 4, 3, 2, 1};
  CHECK(spearman(a, c) == doctest::Approx(-1.0));
  // Average ranks: x -> (1, 2.5, 2.5, 4), y -> (1, 2, 3, 4); Pearson of the ranks.
  std::vector<double> x = {1, 2, 2, 3}, y = {10, 20, 30, 40};
  CHECK(spearman(x, y) == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)));
  std::vector<double> flat = {1, 1, 1, 1};
  CHECK(std::isnan(spearman(flat, y)));
}
