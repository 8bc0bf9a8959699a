#include "causalsvm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causalsvm {

namespace {

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double penalized_nll(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& coef, double l2) {
  double nll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) nll += softplus(z[i]) - y[i] * z[i];
  return nll / static_cast<double>(z.size()) + 0.5 * l2 * coef.squaredNorm();
}

}  // namespace

LogisticFit logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double l2,
                         int max_iter, double tol) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n == 0) throw std::invalid_argument("logistic_fit: empty design matrix");
  if (y01.size() != n) throw std::invalid_argument("logistic_fit: label length mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y01[i] != 0.0 && y01[i] != 1.0)
      throw std::invalid_argument("logistic_fit: labels must be 0 or 1");
  if (!(l2 > 0.0)) throw std::invalid_argument("logistic_fit: l2 must be positive");
  if (max_iter < 1) throw std::invalid_argument("logistic_fit: max_iter must be >= 1");

  LogisticFit fit;
  fit.coef = Eigen::VectorXd::Zero(d);
  fit.intercept = 0.0;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  double nll = penalized_nll(z, y01, fit.coef, l2);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd p = z.unaryExpr([](double v) { return sigmoid(v); });
    const Eigen::VectorXd resid = (p - y01) / static_cast<double>(n);
    Eigen::VectorXd grad(d + 1);
    grad.head(d) = X.transpose() * resid + l2 * fit.coef;
    grad[d] = resid.sum();
    fit.iterations = it;
    if (grad.cwiseAbs().maxCoeff() <= tol) {
      fit.converged = true;
      return fit;
    }

    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).matrix() / static_cast<double>(n);
    Eigen::MatrixXd H(d + 1, d + 1);
    H.topLeftCorner(d, d) = X.transpose() * w.asDiagonal() * X;
    H.topLeftCorner(d, d).diagonal().array() += l2;
    H.block(0, d, d, 1) = X.transpose() * w;
    H.block(d, 0, 1, d) = H.block(0, d, d, 1).transpose();
    H(d, d) = w.sum();
    H.diagonal().array() += 1e-12;

    const Eigen::VectorXd step = H.ldlt().solve(-grad);
    double scale = 1.0;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd coef_try = fit.coef + scale * step.head(d);
      const double b_try = fit.intercept + scale * step[d];
      const Eigen::VectorXd z_try = (X * coef_try).array() + b_try;
      const double nll_try = penalized_nll(z_try, y01, coef_try, l2);
      if (nll_try <= nll + 1e-14 * std::abs(nll)) {
        fit.coef = coef_try;
        fit.intercept = b_try;
        z = z_try;
        nll = nll_try;
        break;
      }
      scale *= 0.5;
    }
  }
  fit.iterations = max_iter;
  {
    const Eigen::VectorXd p = z.unaryExpr([](double v) { return sigmoid(v); });
    const Eigen::VectorXd resid = (p - y01) / static_cast<double>(n);
    Eigen::VectorXd grad(d + 1);
    grad.head(d) = X.transpose() * resid + l2 * fit.coef;
    grad[d] = resid.sum();
    fit.converged = grad.cwiseAbs().maxCoeff() <= tol;
  }
  return fit;
}

double PropensityModel::propensity(const Eigen::VectorXd& x) const {
  if (x.size() != coefficients.size())
    throw std::invalid_argument("PropensityModel: dimension mismatch");
  return sigmoid(intercept + coefficients.dot(x));
}

Dataset constant_ratios(const Dataset& ds) {
  Dataset out = ds;
  for (auto& u : out.units)
    if (u.group == Group::Control) u.ratio = 1.0;
  return out;
}

PropensityModel fit_propensity(const Dataset& ds, double l2, int max_iter) {
  require_valid(ds, "fit_propensity");
  const int n = ds.n();
  Eigen::MatrixXd X(n, ds.dim);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) = ds.units[i].x.transpose();
    y[i] = ds.units[i].group == Group::Treatment ? 1.0 : 0.0;
  }
  const LogisticFit fit = logistic_fit(X, y, l2, max_iter);
  PropensityModel m;
  m.coefficients = fit.coef;
  m.intercept = fit.intercept;
  m.iterations = fit.iterations;
  m.converged = fit.converged;
  return m;
}

Dataset ratios_from_propensity(const Dataset& ds, const PropensityModel& model, double clip) {
  if (!(clip >= 1.0)) throw std::invalid_argument("ratios_from_propensity: clip must be >= 1");
  if (ds.n_t < 1 || ds.n_c < 1)
    throw std::invalid_argument("ratios_from_propensity: needs both groups");
  const double prior_odds = static_cast<double>(ds.n_t) / static_cast<double>(ds.n_c);
  Dataset out = ds;
  for (auto& u : out.units) {
    if (u.group != Group::Control) continue;
    const double e = model.propensity(u.x);
    const double raw = (1.0 - e) / e * prior_odds;
    u.ratio = std::clamp(raw, 1.0 / clip, clip);
  }
  return out;
}

}  // namespace causalsvm
