#pragma once

#include <Eigen/Core>
#include <variant>

namespace causalsvm {

// Inputs to the finite-sample deviation bound. growth_log is ln S(2 n_t)
// for the hypothesis class (sauer_growth_log derives one from a capacity
// dimension); pdim is the pseudo-dimension entering the control-side term;
// d2 is the exponentiated KL divergence between the treatment and control
// covariate distributions; M rescales the surrogate to [0, 1].
struct BoundInputs {
  int n_t = 1;
  int n_c = 1;
  double delta = 0.05;
  int pdim = 1;
  double growth_log = 0.0;
  double d2 = 1.0;
  double M = 1.0;
};

// 2 sqrt(2 (growth_log + ln(4/delta)) / n_t)
double delta_t(int n_t, double delta, double growth_log);

// 2^{5/4} sqrt(d2) ((pdim ln(2 n_c e / pdim) + ln(4/delta)) / n_c)^{3/8}
double delta_c(int n_c, double delta, int pdim, double d2);

// M (max(r_hat_t, r_hat_c) + max(delta_t at delta/2, delta_c at delta/2)),
// with the empirical risks computed under the M-rescaled loss.
double generalization_bound(double r_hat_t, double r_hat_c, const BoundInputs& in);

// Sauer bound d ln(e m / d) on the log growth function of a class with
// capacity dimension d evaluated at sample size m.
double sauer_growth_log(int d, int m);

struct GaussianParametric {};
struct UserSupplied {
  double value = 1.0;
};
using D2Estimator = std::variant<GaussianParametric, UserSupplied>;

// GaussianParametric fits a multivariate normal to each group's rows
// (unbiased covariance + 1e-6 I) and returns exp of their KL divergence in
// nats, i.e. 2^{KL in bits}. Needs at least d + 2 rows per group.
double estimate_d2(const Eigen::MatrixXd& treatment_features,
                   const Eigen::MatrixXd& control_features,
                   const D2Estimator& estimator = GaussianParametric{});

}  // namespace causalsvm
