#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "causalsvm/causal_svm.hpp"
#include "causalsvm/evaluation.hpp"
#include "causalsvm/rng.hpp"
#include "doctest.h"

using namespace causalsvm;

namespace {

// Self-contained restatement of the pointwise rules.
int pointwise_oracle(PointwiseKind kind, double h, int y_t, int y_c, double theta) {
  const double m = kind == PointwiseKind::LTheta ? theta : 1.0;
  if (y_t == y_c) return (h >= m || h <= -m) ? 1 : 0;
  const bool positive_effect = y_t > y_c;
  if (kind == PointwiseKind::L01) return (positive_effect ? h <= 0.0 : h >= 0.0) ? 1 : 0;
  return (positive_effect ? h <= -m : h >= m) ? 1 : 0;
}

Dataset labeled_test_set(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Unit> us;
  for (int i = 0; i < n; ++i) {
    Unit u;
    u.x = Eigen::VectorXd(1);
    u.x[0] = rng.normal();
    u.group = i % 2 == 0 ? Group::Treatment : Group::Control;
    u.y_t = rng.bernoulli(0.5) ? 1 : -1;
    u.y_c = rng.bernoulli(0.5) ? 1 : -1;
    u.y_obs = u.group == Group::Treatment ? *u.y_t : *u.y_c;
    if (u.group == Group::Control) u.ratio = 1.0;
    us.push_back(u);
  }
  return make_dataset(us);
}

}  // namespace

TEST_CASE("pointwise_loss matches an exhaustive truth table") {
  const std::vector<double> hs = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> thetas = {0.5, 1.0, 2.0};
  for (int y_t : {-1, 1})
    for (int y_c : {-1, 1})
      for (double h : hs) {
        for (PointwiseKind kind : {PointwiseKind::L01, PointwiseKind::L1}) {
          CAPTURE(h);
          CAPTURE(y_t);
          CAPTURE(y_c);
          CHECK(pointwise_loss(kind, h, y_t, y_c) == pointwise_oracle(kind, h, y_t, y_c, 1.0));
        }
        for (double theta : thetas) {
          CAPTURE(h);
          CAPTURE(theta);
          CHECK(pointwise_loss(PointwiseKind::LTheta, h, y_t, y_c, theta) ==
                pointwise_oracle(PointwiseKind::LTheta, h, y_t, y_c, theta));
        }
        // A unit-margin miss is always a sign miss as well.
        CHECK(pointwise_loss(PointwiseKind::L1, h, y_t, y_c) <=
              pointwise_loss(PointwiseKind::L01, h, y_t, y_c));
      }
}

TEST_CASE("pointwise_loss rejects bad arguments") {
  CHECK_THROWS_AS(pointwise_loss(PointwiseKind::L01, 0.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(pointwise_loss(PointwiseKind::L01, 0.0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(
      pointwise_loss(PointwiseKind::L01, std::numeric_limits<double>::quiet_NaN(), 1, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(pointwise_loss(PointwiseKind::LTheta, 0.0, 1, 1, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(pointwise_loss(PointwiseKind::LTheta, 0.0, 1, 1, -2.0),
                  std::invalid_argument);
}

TEST_CASE("quantile loss on a worked four-point example") {
  const std::vector<double> h = {0.1, -0.5, 2.0, -3.0};
  const std::vector<TruthPair> truths = {{1, -1}, {1, 1}, {1, -1}, {-1, 1}};
  const EvaluationReport rep = quantile_neutral_loss(h, truths, 0.25);
  // One point is forced neutral; the cut lands on |0.1|.
  CHECK(rep.threshold_t == 0.1);
  CHECK(rep.counts.false_positive == 0);
  CHECK(rep.counts.false_negative == 0);
  CHECK(rep.counts.spurious_effect == 1);  // the truth-neutral unit at -0.5
  CHECK(rep.counts.n == 4);
  CHECK(rep.loss_percent == 25.0);
  CHECK(rep.fraction_neutral == 0.25);
}

TEST_CASE("fraction zero means a zero cut and strict comparisons") {
  const std::vector<TruthPair> neutral = {{1, 1}, {1, 1}};
  const EvaluationReport rep = quantile_neutral_loss({0.0, 0.5}, neutral, 0.0);
  CHECK(rep.threshold_t == 0.0);
  // h = 0 is not beyond a zero cut; h = 0.5 is.
  CHECK(rep.counts.spurious_effect == 1);
  CHECK(rep.loss_percent == 50.0);
}

TEST_CASE("ties at the cut stay neutral") {
  // cut = second smallest |h| = 1; both units at |h| = 1 are neutralized.
  const std::vector<double> h = {1.0, -1.0, 2.0};
  const std::vector<TruthPair> truths = {{-1, 1}, {1, -1}, {1, 1}};
  const EvaluationReport rep = quantile_neutral_loss(h, truths, 0.34);
  CHECK(rep.threshold_t == 1.0);
  CHECK(rep.counts.false_positive == 0);
  CHECK(rep.counts.false_negative == 0);
  CHECK(rep.counts.spurious_effect == 1);
}

TEST_CASE("neutral count comes from ceil without float overshoot") {
  // 0.1 * 10 is just above 1 in floating point; the cut must still be the
  // first order statistic, not the second.
  std::vector<double> h(10);
  std::vector<TruthPair> truths(10, TruthPair{1, 1});
  for (int i = 0; i < 10; ++i) h[static_cast<std::size_t>(i)] = i + 1.0;
  const EvaluationReport rep = quantile_neutral_loss(h, truths, 0.1);
  CHECK(rep.threshold_t == 1.0);
  CHECK(rep.counts.spurious_effect == 9);
}

TEST_CASE("loss is nonincreasing as more points are forced neutral") {
  Rng rng(5);
  const int n = 200;
  std::vector<double> h(n);
  std::vector<TruthPair> truths(n);
  for (int i = 0; i < n; ++i) {
    h[static_cast<std::size_t>(i)] = 2.0 * rng.normal();
    const int r = static_cast<int>(rng.uniform_int(3));
    truths[static_cast<std::size_t>(i)] =
        r == 0 ? TruthPair{1, -1} : (r == 1 ? TruthPair{-1, 1} : TruthPair{1, 1});
  }
  double prev = 101.0;
  for (double f = 0.0; f < 1.0; f += 0.05) {
    const EvaluationReport rep = quantile_neutral_loss(h, truths, f);
    CHECK(rep.loss_percent <= prev + 1e-12);
    prev = rep.loss_percent;
  }
}

TEST_CASE("quantile loss input validation") {
  const std::vector<TruthPair> t1 = {{1, 1}};
  CHECK_THROWS_AS(quantile_neutral_loss({}, {}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(quantile_neutral_loss({1.0, 2.0}, t1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(quantile_neutral_loss({1.0}, t1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_neutral_loss({1.0}, t1, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(
      quantile_neutral_loss({std::numeric_limits<double>::quiet_NaN()}, t1, 0.1),
      std::invalid_argument);
  CHECK_THROWS_AS(quantile_neutral_loss({1.0}, {{0, 1}}, 0.1), std::invalid_argument);
}

TEST_CASE("evaluate_model overloads agree and demand potential outcomes") {
  const Dataset fitting = labeled_test_set(30, 8);
  const CausalSvmModel model = train(fitting, LinearKernel{}, 0.5);
  const Dataset test = labeled_test_set(40, 9);
  const std::vector<double> fractions = {0.0, 0.1, 0.3};

  const auto via_model = evaluate_model(model, test, fractions);
  const auto via_lambda = evaluate_model(
      [&model](const Eigen::VectorXd& x) { return decision_value(model, x); }, test,
      fractions);
  REQUIRE(via_model.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(via_model[i].loss_percent == via_lambda[i].loss_percent);
    CHECK(via_model[i].threshold_t == via_lambda[i].threshold_t);
    CHECK(via_model[i].counts.n == 40);
  }

  Dataset missing = test;
  missing.units[0].y_c.reset();
  // Dropping y_c on a control unit also breaks validate_dataset, so drop it
  // on a treatment unit, where only the evaluation contract notices.
  REQUIRE(missing.units[0].group == Group::Treatment);
  CHECK_THROWS_AS(evaluate_model(model, missing, fractions), std::invalid_argument);
}

TEST_CASE("reports_to_csv prints one row per fraction") {
  const std::vector<double> h = {0.1, -0.5, 2.0, -3.0};
  const std::vector<TruthPair> truths = {{1, -1}, {1, 1}, {1, -1}, {-1, 1}};
  std::vector<EvaluationReport> reps;
  reps.push_back(quantile_neutral_loss(h, truths, 0.25));
  const std::string csv = reports_to_csv(reps);
  CHECK(csv ==
        "fraction,threshold,loss_percent,fp,fn,spurious,n\n"
        "0.25,0.1,25,0,0,1,4\n");
}
