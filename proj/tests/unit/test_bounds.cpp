#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "causalsvm/bounds.hpp"
#include "causalsvm/errors.hpp"
#include "doctest.h"

using namespace causalsvm;

namespace {

double normal_logpdf(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * z * z / var - 0.5 * std::log(2.0 * M_PI * var);
}

}  // namespace

TEST_CASE("treatment deviation term matches high precision evaluation") {
  // reference values computed with 40-digit arithmetic
  CHECK(delta_t(100, 0.05, 3.2) == doctest::Approx(0.77882098763060470633).epsilon(1e-12));
  CHECK(delta_t(50, 0.1, 1.0) == doctest::Approx(0.86615282292343180266).epsilon(1e-12));

  // growth_log 0 and delta = 4/e collapse the term to 2 sqrt(2/8) = 1
  CHECK(std::abs(delta_t(8, 4.0 / std::exp(1.0), 0.0) - 1.0) < 1e-12);

  CHECK(delta_t(400, 0.05, 3.2) < delta_t(100, 0.05, 3.2));
  CHECK(delta_t(100, 0.05, 3.2) < delta_t(100, 0.05, 6.4));
  CHECK(delta_t(100, 0.1, 3.2) < delta_t(100, 0.05, 3.2));
}

TEST_CASE("control deviation term matches high precision evaluation") {
  CHECK(delta_c(200, 0.05, 3, 1.5) == doctest::Approx(1.2743926214736406191).epsilon(1e-12));
  CHECK(delta_c(1000, 0.1, 5, 2.0) == doctest::Approx(0.99304184791795984624).epsilon(1e-12));

  // quadrupling d2 doubles the term
  CHECK(delta_c(200, 0.05, 3, 6.0) ==
        doctest::Approx(2.0 * delta_c(200, 0.05, 3, 1.5)).epsilon(1e-14));

  CHECK(delta_c(800, 0.05, 3, 1.5) < delta_c(200, 0.05, 3, 1.5));
  CHECK(delta_c(200, 0.05, 3, 1.5) < delta_c(200, 0.05, 3, 3.0));
}

TEST_CASE("assembled bound composes the pieces") {
  BoundInputs in;
  in.n_t = 100;
  in.n_c = 100;
  in.delta = 0.05;
  in.pdim = 3;
  in.growth_log = 2.0;
  in.d2 = 1.5;
  in.M = 2.0;

  const double direct = generalization_bound(0.1, 0.2, in);
  const double manual =
      2.0 * (std::max(0.1, 0.2) +
             std::max(delta_t(100, 0.025, 2.0), delta_c(100, 0.025, 3, 1.5)));
  CHECK(direct == doctest::Approx(manual).epsilon(1e-15));
  CHECK(direct == doctest::Approx(3.6258902561263477711).epsilon(1e-12));

  // only the larger empirical risk enters
  CHECK(generalization_bound(0.3, 0.1, in) == doctest::Approx(direct + 2.0 * 0.1).epsilon(1e-12));
  CHECK(generalization_bound(0.2, 0.05, in) == doctest::Approx(direct).epsilon(1e-15));

  BoundInputs big = in;
  big.n_t = 400;
  big.n_c = 400;
  CHECK(generalization_bound(0.1, 0.2, big) < direct);
}

TEST_CASE("sauer growth log") {
  CHECK(sauer_growth_log(7, 40) == doctest::Approx(19.200785135410360984).epsilon(1e-12));
  CHECK(sauer_growth_log(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sauer_growth_log(3, 50) < sauer_growth_log(3, 51));
  CHECK(sauer_growth_log(3, 50) < sauer_growth_log(4, 50));

  // feeds straight into the treatment term
  const double g = sauer_growth_log(3, 200);
  CHECK(delta_t(100, 0.05, g) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * (g + std::log(80.0)) / 100.0)).epsilon(1e-14));
}

TEST_CASE("deviation term domains") {
  CHECK_THROWS_AS(delta_t(0, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, 0.05, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, 0.05, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(delta_t(10, 0.05, std::nan("")), std::invalid_argument);
  CHECK(delta_t(10, 3.9, 0.0) > 0.0);  // the halved-delta form stays inside (0, 4)

  CHECK_THROWS_AS(delta_c(10, 0.05, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_c(2, 0.05, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_c(10, 0.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_c(10, 4.5, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_c(10, 0.05, 1, 0.999), std::invalid_argument);
  CHECK_THROWS_AS(delta_c(10, 0.05, 1, std::nan("")), std::invalid_argument);
  CHECK(delta_c(3, 0.05, 3, 1.0) > 0.0);  // n_c == pdim is allowed

  BoundInputs in;
  CHECK_THROWS_AS(generalization_bound(-0.1, 0.0, in), std::invalid_argument);
  CHECK_THROWS_AS(generalization_bound(0.0, -0.1, in), std::invalid_argument);
  BoundInputs bad_m = in;
  bad_m.M = 0.5;
  CHECK_THROWS_AS(generalization_bound(0.1, 0.1, bad_m), std::invalid_argument);
  BoundInputs bad_d = in;
  bad_d.delta = 1.0;
  CHECK_THROWS_AS(generalization_bound(0.1, 0.1, bad_d), std::invalid_argument);
  bad_d.delta = 0.0;
  CHECK_THROWS_AS(generalization_bound(0.1, 0.1, bad_d), std::invalid_argument);

  CHECK_THROWS_AS(sauer_growth_log(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(sauer_growth_log(3, 2), std::invalid_argument);
}

TEST_CASE("user supplied d2 passes through untouched") {
  const Eigen::MatrixXd empty(0, 0);
  CHECK(estimate_d2(empty, empty, UserSupplied{3.7}) == 3.7);
  CHECK(estimate_d2(empty, empty, UserSupplied{1.0}) == 1.0);
  CHECK_THROWS_AS(estimate_d2(empty, empty, UserSupplied{0.5}), std::invalid_argument);
}

TEST_CASE("identical groups give no separation") {
  Eigen::MatrixXd x(6, 2);
  x << 0.3, -1.1, 1.7, 0.4, -0.6, 0.9, 2.2, -0.5, -1.4, 1.2, 0.8, 0.1;
  CHECK(estimate_d2(x, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit shift at unit variance gives exp of one half") {
  // the sample variance of {-c, -c, c, c} is exactly 4c^2/3 = 1, and the
  // shift is sized so the mean term cancels the diagonal loading
  const double c = std::sqrt(3.0) / 2.0;
  const double shift = std::sqrt(1.0 + 1e-6);
  Eigen::MatrixXd t(4, 1), ctrl(4, 1);
  t << -c, -c, c, c;
  ctrl << -c + shift, -c + shift, c + shift, c + shift;
  CHECK(estimate_d2(t, ctrl) == doctest::Approx(1.6487212707001281468).epsilon(1e-9));
}

TEST_CASE("one dimensional estimate agrees with numerical integration") {
  Eigen::MatrixXd t(8, 1), ctrl(8, 1);
  t << 0.3, -1.2, 2.5, 0.9, 1.4, -0.5, 0.1, 1.9;
  ctrl << -0.7, 0.4, -1.8, 0.2, -1.1, 0.6, -0.3, -2.2;

  const auto moments = [](const Eigen::MatrixXd& x) {
    const double m = x.col(0).mean();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) ss += (x(i, 0) - m) * (x(i, 0) - m);
    return std::make_pair(m, ss / static_cast<double>(x.rows() - 1) + 1e-6);
  };
  const auto [mt, vt] = moments(t);
  const auto [mc, vc] = moments(ctrl);

  // trapezoid integral of p log(p/q); the integrand decays like a Gaussian,
  // so truncating at +-40 loses nothing at this precision
  const int steps = 160000;
  const double lo = -40.0, hi = 40.0;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / steps;
    const double lp = normal_logpdf(x, mt, vt);
    const double lq = normal_logpdf(x, mc, vc);
    const double term = std::exp(lp) * (lp - lq);
    acc += (i == 0 || i == steps) ? 0.5 * term : term;
  }
  const double kl = acc * (hi - lo) / steps;
  const double want = std::exp(std::max(0.0, kl));

  CHECK(estimate_d2(t, ctrl) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("two dimensional estimate matches an explicit computation") {
  Eigen::MatrixXd t(7, 2), ctrl(7, 2);
  t << 0.2, 1.1, -0.8, 0.4, 1.5, 2.0, 0.7, -0.3, -1.2, -0.9, 2.1, 1.6, 0.4, 0.8;
  ctrl << -0.5, 0.3, 1.0, -1.2, -1.7, 0.8, 0.6, 1.4, -0.2, -0.6, 1.3, 0.5, -0.9, -1.5;

  // plain loops and a hand 2x2 inverse, no shared linear algebra
  const auto fit = [](const Eigen::MatrixXd& x, double (&mu)[2], double (&s)[2][2]) {
    const int n = static_cast<int>(x.rows());
    mu[0] = mu[1] = 0.0;
    for (int i = 0; i < n; ++i) {
      mu[0] += x(i, 0);
      mu[1] += x(i, 1);
    }
    mu[0] /= n;
    mu[1] /= n;
    s[0][0] = s[0][1] = s[1][0] = s[1][1] = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = x(i, 0) - mu[0], b = x(i, 1) - mu[1];
      s[0][0] += a * a;
      s[0][1] += a * b;
      s[1][0] += b * a;
      s[1][1] += b * b;
    }
    for (auto& row : s)
      for (double& v : row) v /= n - 1;
    s[0][0] += 1e-6;
    s[1][1] += 1e-6;
  };

  double mu_t[2], mu_c[2], st[2][2], sc[2][2];
  fit(t, mu_t, st);
  fit(ctrl, mu_c, sc);

  const double det_c = sc[0][0] * sc[1][1] - sc[0][1] * sc[1][0];
  const double det_t = st[0][0] * st[1][1] - st[0][1] * st[1][0];
  const double inv_c[2][2] = {{sc[1][1] / det_c, -sc[0][1] / det_c},
                              {-sc[1][0] / det_c, sc[0][0] / det_c}};
  const double trace = inv_c[0][0] * st[0][0] + inv_c[0][1] * st[1][0] +
                       inv_c[1][0] * st[0][1] + inv_c[1][1] * st[1][1];
  const double d0 = mu_c[0] - mu_t[0], d1 = mu_c[1] - mu_t[1];
  const double quad = d0 * (inv_c[0][0] * d0 + inv_c[0][1] * d1) +
                      d1 * (inv_c[1][0] * d0 + inv_c[1][1] * d1);
  const double kl = 0.5 * (trace + quad - 2.0 + std::log(det_c) - std::log(det_t));
  const double want = std::exp(std::max(0.0, kl));

  CHECK(estimate_d2(t, ctrl) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("gaussian estimator input checks") {
  Eigen::MatrixXd ok(5, 2), wide(5, 3), scarce(3, 2);
  ok.setZero();
  wide.setZero();
  scarce.setZero();
  for (int i = 0; i < 5; ++i) ok(i, 0) = i;  // keep the covariance finite
  CHECK_THROWS_AS(estimate_d2(ok, wide), std::invalid_argument);
  CHECK_THROWS_AS(estimate_d2(scarce, scarce), std::invalid_argument);
}
