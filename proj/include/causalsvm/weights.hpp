#pragma once

#include <Eigen/Dense>

#include "causalsvm/dataset.hpp"

namespace causalsvm {

struct LogisticFit {
  Eigen::VectorXd coef;
  double intercept = 0.0;
  int iterations = 0;
  bool converged = true;
};

// Penalized logistic regression: mean negative log-likelihood plus
// (l2/2)||coef||^2 with the intercept unpenalized, minimized by damped
// Newton steps until the gradient max-norm drops to tol. y01 entries are
// 0 or 1. l2 must be strictly positive; it is what keeps separable data
// from sending the coefficients to infinity.
LogisticFit logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double l2 = 1e-4,
                         int max_iter = 100, double tol = 1e-8);

// Logistic model for e(x) = P(treatment | x).
struct PropensityModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  int iterations = 0;
  bool converged = true;  // false means the Newton budget ran out

  double propensity(const Eigen::VectorXd& x) const;
};

// ratio = 1 on every control unit; treatment units untouched.
Dataset constant_ratios(const Dataset& ds);

PropensityModel fit_propensity(const Dataset& ds, double l2 = 1e-4, int max_iter = 100);

// Bayes identity: mu_{X|C}/mu_{X|T} = (P(C|x)/P(T|x)) * (P(T)/P(C)), with
// the prior odds taken from the sample as n_t/n_c. Each control unit gets
// ratio = ((1 - e)/e) * (n_t/n_c) clipped into [1/clip, clip].
Dataset ratios_from_propensity(const Dataset& ds, const PropensityModel& model,
                               double clip = 20.0);

}  // namespace causalsvm
