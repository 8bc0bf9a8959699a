#include <cmath>
#include <stdexcept>
#include <vector>

#include "causalsvm/dataset.hpp"
#include "causalsvm/rng.hpp"
#include "causalsvm/weights.hpp"
#include "doctest.h"

using namespace causalsvm;

namespace {

// The fitted objective, written out again here so gradient checks do not
// share code with the implementation.
double penalized_nll_ref(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01,
                         const Eigen::VectorXd& coef, double intercept, double l2) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double z = X.row(i).dot(coef) + intercept;
    const double sp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    acc += sp - y01[i] * z;
  }
  return acc / static_cast<double>(X.rows()) + 0.5 * l2 * coef.squaredNorm();
}

Dataset propensity_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Unit> us;
  for (int i = 0; i < n; ++i) {
    Unit u;
    u.x = Eigen::VectorXd(1);
    u.x[0] = rng.normal();
    const double e = 1.0 / (1.0 + std::exp(-(2.0 * u.x[0] - 1.0)));
    u.group = rng.bernoulli(e) ? Group::Treatment : Group::Control;
    u.y_obs = 1;
    us.push_back(u);
  }
  return make_dataset(us);
}

}  // namespace

TEST_CASE("logistic_fit lands on a stationary point of its objective") {
  Rng rng(314);
  const int n = 60, d = 2;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-X(i, 0)))) ? 1.0 : 0.0;
  }
  const double l2 = 1e-3;
  const LogisticFit fit = logistic_fit(X, y, l2);
  CHECK(fit.converged);

  // Central differences on the reference objective; convexity makes a zero
  // gradient a proof of global optimality.
  const double h = 1e-5;
  for (int k = 0; k <= d; ++k) {
    Eigen::VectorXd cp = fit.coef, cm = fit.coef;
    double bp = fit.intercept, bm = fit.intercept;
    if (k < d) {
      cp[k] += h;
      cm[k] -= h;
    } else {
      bp += h;
      bm -= h;
    }
    const double g = (penalized_nll_ref(X, y, cp, bp, l2) -
                      penalized_nll_ref(X, y, cm, bm, l2)) /
                     (2.0 * h);
    CHECK(std::abs(g) < 1e-6);
  }
}

TEST_CASE("all-zero features reduce to the closed-form intercept") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(8, 2);
  Eigen::VectorXd y(8);
  y << 1, 1, 1, 1, 1, 1, 0, 0;  // mean 0.75
  const LogisticFit fit = logistic_fit(X, y);
  CHECK(fit.converged);
  CHECK(fit.coef.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-7));
}

TEST_CASE("sign symmetries of the logistic fit") {
  Rng rng(99);
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = rng.normal();
    y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  const LogisticFit a = logistic_fit(X, y);
  const LogisticFit b = logistic_fit(-X, y);
  CHECK(b.coef[0] == doctest::Approx(-a.coef[0]).epsilon(1e-8));
  CHECK(b.intercept == doctest::Approx(a.intercept).epsilon(1e-8));

  const LogisticFit c = logistic_fit(X, Eigen::VectorXd::Ones(40) - y);
  CHECK(c.coef[0] == doctest::Approx(-a.coef[0]).epsilon(1e-8));
  CHECK(c.intercept == doctest::Approx(-a.intercept).epsilon(1e-8));
}

TEST_CASE("logistic_fit rejects malformed input") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(4, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(logistic_fit(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(logistic_fit(X, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(logistic_fit(X, Eigen::VectorXd::Constant(4, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(logistic_fit(X, y, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(logistic_fit(X, y, 1e-4, 0), std::invalid_argument);
}

TEST_CASE("fit_propensity recovers a planted logistic mechanism") {
  const Dataset ds = propensity_dataset(2000, 2024);
  const PropensityModel m = fit_propensity(ds);
  CHECK(m.converged);
  CHECK(m.coefficients[0] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(m.intercept == doctest::Approx(-1.0).epsilon(0.25));

  // propensity() is the logistic link applied to the fitted index.
  Eigen::VectorXd x(1);
  x[0] = 0.4;
  const double z = m.intercept + m.coefficients[0] * 0.4;
  CHECK(m.propensity(x) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-12));
  Eigen::VectorXd wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS(m.propensity(wrong), std::invalid_argument);
}

TEST_CASE("constant_ratios sets exactly the control units") {
  Dataset ds = propensity_dataset(50, 1);
  ds.units.front().ratio = 7.0;  // treatment block head after canonicalization
  REQUIRE(ds.units.front().group == Group::Treatment);
  const Dataset out = constant_ratios(ds);
  for (const auto& u : out.units) {
    if (u.group == Group::Control)
      CHECK(u.ratio == 1.0);
  }
  CHECK(out.units.front().ratio == 7.0);
  CHECK(out.n_t == ds.n_t);
}

TEST_CASE("ratios_from_propensity applies the prior-odds identity") {
  // Three per group, constant propensity 0.75 everywhere.
  std::vector<Unit> us(6);
  for (int i = 0; i < 6; ++i) {
    us[static_cast<std::size_t>(i)].x = Eigen::VectorXd::Zero(1);
    us[static_cast<std::size_t>(i)].group = i < 3 ? Group::Treatment : Group::Control;
    us[static_cast<std::size_t>(i)].y_obs = 1;
  }
  const Dataset ds = make_dataset(us);
  PropensityModel m;
  m.coefficients = Eigen::VectorXd::Zero(1);
  m.intercept = std::log(3.0);  // e = 0.75

  const Dataset out = ratios_from_propensity(ds, m);
  for (int j = 0; j < out.n_c; ++j)
    CHECK(*out.control(j).ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  for (int i = 0; i < out.n_t; ++i) CHECK(!out.treatment(i).ratio.has_value());

  // Clipping in both directions.
  const Dataset lo = ratios_from_propensity(ds, m, 2.0);
  for (int j = 0; j < lo.n_c; ++j) CHECK(*lo.control(j).ratio == doctest::Approx(0.5));
  m.intercept = -std::log(99.0);  // e = 0.01, raw ratio 99
  const Dataset hi = ratios_from_propensity(ds, m);
  for (int j = 0; j < hi.n_c; ++j) CHECK(*hi.control(j).ratio == doctest::Approx(20.0));

  CHECK_THROWS_AS(ratios_from_propensity(ds, m, 0.5), std::invalid_argument);
  std::vector<Unit> only_c(2);
  for (auto& u : only_c) {
    u.x = Eigen::VectorXd::Zero(1);
    u.group = Group::Control;
    u.y_obs = 1;
  }
  CHECK_THROWS_AS(ratios_from_propensity(make_dataset(only_c), m), std::invalid_argument);
}
