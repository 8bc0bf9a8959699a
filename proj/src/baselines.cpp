#include "causalsvm/baselines.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/errors.hpp"
#include "causalsvm/qp.hpp"
#include "causalsvm/weights.hpp"

namespace causalsvm {

namespace {

Eigen::MatrixXd stack_features(const std::vector<Unit>& units) {
  const auto n = static_cast<Eigen::Index>(units.size());
  Eigen::MatrixXd X(n, units.empty() ? 0 : units.front().x.size());
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) = units[i].x.transpose();
  return X;
}

Eigen::MatrixXd gram_of(const KernelSpec& k, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = X.row(i);
    for (Eigen::Index j = 0; j <= i; ++j) {
      G(i, j) = eval_kernel(k, xi, X.row(j));
      G(j, i) = G(i, j);
    }
  }
  return G;
}

BaseLearner constant_model(double value) {
  BaseLearner m;
  m.form = BaseLearner::Form::Constant;
  m.bias = value;
  return m;
}

// Classical soft-margin dual: minimize (1/2) a'(yy' o K)a - sum a subject
// to 0 <= a <= C, sum a_i y_i = 0. Decision value sum a_i y_i K(x_i, .) + b.
BaseLearner fit_svm(const SvmLearner& cfg, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  if (!(cfg.cost > 0.0)) throw std::invalid_argument("train_base_learner: svm cost must be > 0");
  const Eigen::MatrixXd K = gram_of(cfg.kernel, X);

  QpProblem qp;
  qp.P = (y * y.transpose()).cwiseProduct(K);
  qp.P = 0.5 * (qp.P + qp.P.transpose());
  qp.q = Eigen::VectorXd::Constant(n, -1.0);
  qp.A = Eigen::MatrixXd::Zero(2 * n, n);
  qp.b = Eigen::VectorXd::Zero(2 * n);
  qp.A.topLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  qp.A.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  qp.b.tail(n).setConstant(cfg.cost);
  qp.E = y.transpose();
  qp.d = Eigen::VectorXd::Zero(1);
  const QpSolution sol = solve_qp(qp, 1e-8);
  if (sol.status != QpStatus::Optimal)
    throw numerical_error("train_base_learner: svm dual solve did not reach optimality");

  const Eigen::VectorXd a = sol.x.cwiseMax(0.0).cwiseMin(cfg.cost);
  const Eigen::VectorXd coef = a.cwiseProduct(y);
  const Eigen::VectorXd f0 = K * coef;

  // Intercept from margin support vectors; any support vector as fallback.
  double bias = 0.0;
  int interior = 0;
  const double lo = 1e-6 * cfg.cost;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] > lo && a[i] < cfg.cost - lo) {
      bias += y[i] - f0[i];
      ++interior;
    }
  }
  if (interior > 0) {
    bias /= interior;
  } else {
    int support = 0;
    bias = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a[i] > lo) {
        bias += y[i] - f0[i];
        ++support;
      }
    }
    bias = support > 0 ? bias / support : 0.0;
  }

  BaseLearner m;
  m.form = BaseLearner::Form::KernelExpansion;
  m.kernel = cfg.kernel;
  m.points = X;
  m.coef = coef;
  m.bias = bias;
  return m;
}

BaseLearner fit_ridge(const RidgeLearner& cfg, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y) {
  if (!(cfg.l2 > 0.0)) throw std::invalid_argument("train_base_learner: ridge l2 must be > 0");
  Eigen::MatrixXd K = gram_of(cfg.kernel, X);
  K.diagonal().array() += cfg.l2;
  BaseLearner m;
  m.form = BaseLearner::Form::KernelExpansion;
  m.kernel = cfg.kernel;
  m.points = X;
  m.coef = K.ldlt().solve(y);
  m.bias = 0.0;
  if (!m.coef.allFinite())
    throw numerical_error("train_base_learner: ridge system is singular");
  return m;
}

BaseLearner fit_logistic(const LogisticLearner& cfg, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& y) {
  Eigen::VectorXd y01 = (y.array() + 1.0) / 2.0;
  const LogisticFit fit = logistic_fit(X, y01, cfg.l2);
  BaseLearner m;
  m.form = BaseLearner::Form::Linear;
  m.weights = fit.coef;
  m.bias = fit.intercept;
  return m;
}

}  // namespace

double predict_value(const BaseLearner& m, const Eigen::VectorXd& x) {
  switch (m.form) {
    case BaseLearner::Form::Constant:
      return m.bias;
    case BaseLearner::Form::Linear:
      return m.bias + m.weights.dot(x);
    case BaseLearner::Form::KernelExpansion: {
      double acc = m.bias;
      for (Eigen::Index i = 0; i < m.points.rows(); ++i)
        if (m.coef[i] != 0.0) acc += m.coef[i] * eval_kernel(m.kernel, m.points.row(i), x);
      return acc;
    }
  }
  return m.bias;
}

BaseLearner train_base_learner(const LearnerKind& kind, const std::vector<Unit>& units,
                               std::uint64_t) {
  if (units.size() < 2)
    throw std::invalid_argument("train_base_learner: need at least 2 units");
  Eigen::VectorXd y(static_cast<Eigen::Index>(units.size()));
  for (std::size_t i = 0; i < units.size(); ++i) y[static_cast<Eigen::Index>(i)] = units[i].y_obs;
  const bool one_class = y.minCoeff() == y.maxCoeff();
  if (one_class) return constant_model(y[0]);

  const Eigen::MatrixXd X = stack_features(units);
  if (const auto* s = std::get_if<SvmLearner>(&kind)) return fit_svm(*s, X, y);
  if (const auto* r = std::get_if<RidgeLearner>(&kind)) return fit_ridge(*r, X, y);
  return fit_logistic(std::get<LogisticLearner>(kind), X, y);
}

TwoModelPredictor fit_two_model(const Dataset& ds, const LearnerKind& kind, std::uint64_t seed) {
  require_valid(ds, "fit_two_model");
  std::vector<Unit> treat(ds.units.begin(), ds.units.begin() + ds.n_t);
  std::vector<Unit> ctrl(ds.units.begin() + ds.n_t, ds.units.end());
  TwoModelPredictor p;
  p.kind = kind;
  p.model_t = train_base_learner(kind, treat, seed);
  p.model_c = train_base_learner(kind, ctrl, seed);
  return p;
}

double predict_difference(const TwoModelPredictor& p, const Eigen::VectorXd& x) {
  return predict_value(p.model_t, x) - predict_value(p.model_c, x);
}

std::string learner_name(const LearnerKind& kind) {
  std::ostringstream out;
  if (const auto* s = std::get_if<SvmLearner>(&kind)) {
    out << "svm(" << kernel_name(s->kernel) << ")";
  } else if (const auto* r = std::get_if<RidgeLearner>(&kind)) {
    out << "ridge(" << kernel_name(r->kernel) << ")";
  } else {
    out << "logistic";
  }
  return out.str();
}

}  // namespace causalsvm
