#include "causalsvm/bounds.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "causalsvm/errors.hpp"

namespace causalsvm {

namespace {

// The deviation terms are evaluated at delta/2 and in arranged test
// identities at delta > 1, so the calculators accept any delta that keeps
// ln(4/delta) positive; the (0,1) probability-range check applies to the
// assembled bound.
void check_delta_formula(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 4.0))
    throw std::invalid_argument(std::string(who) + ": delta must be in (0, 4)");
}

}  // namespace

double delta_t(int n_t, double delta, double growth_log) {
  if (n_t < 1) throw std::invalid_argument("delta_t: n_t must be >= 1");
  check_delta_formula(delta, "delta_t");
  if (!(growth_log >= 0.0) || !std::isfinite(growth_log))
    throw std::invalid_argument("delta_t: growth_log must be finite and >= 0");
  return 2.0 * std::sqrt(2.0 * (growth_log + std::log(4.0 / delta)) / n_t);
}

double delta_c(int n_c, double delta, int pdim, double d2) {
  if (pdim < 1) throw std::invalid_argument("delta_c: pdim must be >= 1");
  if (n_c < pdim) throw std::invalid_argument("delta_c: n_c must be >= pdim");
  check_delta_formula(delta, "delta_c");
  if (!(d2 >= 1.0) || !std::isfinite(d2))
    throw std::invalid_argument("delta_c: d2 must be finite and >= 1");
  const double inner =
      (pdim * std::log(2.0 * n_c * std::exp(1.0) / pdim) + std::log(4.0 / delta)) / n_c;
  return std::pow(2.0, 1.25) * std::sqrt(d2) * std::pow(inner, 0.375);
}

double generalization_bound(double r_hat_t, double r_hat_c, const BoundInputs& in) {
  if (!(r_hat_t >= 0.0) || !(r_hat_c >= 0.0))
    throw std::invalid_argument("generalization_bound: empirical risks must be >= 0");
  if (!(in.M >= 1.0)) throw std::invalid_argument("generalization_bound: M must be >= 1");
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw std::invalid_argument("generalization_bound: delta must be in (0, 1)");
  const double dt = delta_t(in.n_t, in.delta / 2.0, in.growth_log);
  const double dc = delta_c(in.n_c, in.delta / 2.0, in.pdim, in.d2);
  return in.M * (std::max(r_hat_t, r_hat_c) + std::max(dt, dc));
}

double sauer_growth_log(int d, int m) {
  if (d < 1) throw std::invalid_argument("sauer_growth_log: d must be >= 1");
  if (m < d) throw std::invalid_argument("sauer_growth_log: m must be >= d");
  return d * std::log(std::exp(1.0) * m / d);
}

double estimate_d2(const Eigen::MatrixXd& treatment_features,
                   const Eigen::MatrixXd& control_features, const D2Estimator& estimator) {
  if (const auto* u = std::get_if<UserSupplied>(&estimator)) {
    if (!(u->value >= 1.0))
      throw std::invalid_argument("estimate_d2: supplied d2 must be >= 1");
    return u->value;
  }
  const Eigen::Index d = treatment_features.cols();
  if (control_features.cols() != d)
    throw std::invalid_argument("estimate_d2: feature dimensions differ");
  if (treatment_features.rows() < d + 2 || control_features.rows() < d + 2)
    throw std::invalid_argument("estimate_d2: need at least d + 2 rows per group");

  const auto fit = [d](const Eigen::MatrixXd& X) {
    const Eigen::VectorXd mu = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - mu.transpose();
    Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(X.rows() - 1);
    cov.diagonal().array() += 1e-6;
    return std::make_pair(mu, cov);
  };
  const auto [mu_t, cov_t] = fit(treatment_features);
  const auto [mu_c, cov_c] = fit(control_features);

  const Eigen::LLT<Eigen::MatrixXd> llt_c(cov_c);
  const Eigen::LLT<Eigen::MatrixXd> llt_t(cov_t);
  if (llt_c.info() != Eigen::Success || llt_t.info() != Eigen::Success)
    throw numerical_error("estimate_d2: covariance is not positive definite");

  const Eigen::MatrixXd cinv_t = llt_c.solve(cov_t);
  const Eigen::VectorXd diff = mu_c - mu_t;
  const Eigen::MatrixXd lt = llt_t.matrixL();
  const Eigen::MatrixXd lc = llt_c.matrixL();
  double logdet_t = 0.0, logdet_c = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    logdet_t += 2.0 * std::log(lt(i, i));
    logdet_c += 2.0 * std::log(lc(i, i));
  }
  const double kl_nats = 0.5 * (cinv_t.trace() + diff.dot(llt_c.solve(diff)) -
                                static_cast<double>(d) + logdet_c - logdet_t);
  if (!std::isfinite(kl_nats)) throw numerical_error("estimate_d2: divergence is not finite");
  // 2^{KL in bits} = e^{KL in nats}; clamp tiny negative round-off.
  return std::exp(std::max(0.0, kl_nats));
}

}  // namespace causalsvm
