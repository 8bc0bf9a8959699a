#include "causalsvm/causal_svm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/errors.hpp"
#include "pl_min.hpp"

namespace causalsvm {

std::string effect_label_name(EffectLabel l) {
  switch (l) {
    case EffectLabel::Positive: return "positive";
    case EffectLabel::Neutral: return "neutral";
    case EffectLabel::Negative: return "negative";
  }
  return "neutral";
}

EffectLabel effect_label(double h, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("effect_label: theta must be >= 0");
  if (h >= theta) return EffectLabel::Positive;
  if (h <= -theta) return EffectLabel::Negative;
  return EffectLabel::Neutral;
}

namespace {

void require_ratios(const Dataset& ds, const char* who) {
  for (int j = 0; j < ds.n_c; ++j)
    if (!ds.control(j).ratio)
      throw std::invalid_argument(std::string(who) + ": control unit " + std::to_string(j) +
                                  " has no density ratio; run a weights pass first");
}

// Signed expansion coefficients: lambda_i y_i on the treatment block,
// -eta_j y_j on the control block.
Eigen::VectorXd signed_coefficients(const Dataset& ds, const Eigen::VectorXd& lambda,
                                    const Eigen::VectorXd& eta) {
  Eigen::VectorXd c(ds.n());
  for (int i = 0; i < ds.n_t; ++i) c[i] = lambda[i] * ds.treatment(i).y_obs;
  for (int j = 0; j < ds.n_c; ++j) c[ds.n_t + j] = -eta[j] * ds.control(j).y_obs;
  return c;
}

}  // namespace

QpProblem assemble_dual(const Dataset& ds, const Eigen::MatrixXd& gram, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("assemble_dual: gamma must be positive and finite");
  if (gram.rows() != ds.n() || gram.cols() != ds.n())
    throw std::invalid_argument("assemble_dual: gram size does not match dataset");
  require_ratios(ds, "assemble_dual");
  const int n = ds.n();
  const int nt = ds.n_t;
  const int nc = ds.n_c;
  const int nv = n + 1;  // (lambda, eta, alpha)

  QpProblem qp;
  qp.P = Eigen::MatrixXd::Zero(nv, nv);
  qp.P.topLeftCorner(n, n) = signed_gram(gram, ds) / (2.0 * gamma);
  qp.P = 0.5 * (qp.P + qp.P.transpose());
  qp.q = Eigen::VectorXd::Zero(nv);
  qp.q.head(n).setConstant(-1.0);

  const int m = 2 * n + 2;
  qp.A = Eigen::MatrixXd::Zero(m, nv);
  qp.b = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < n; ++k) qp.A(k, k) = -1.0;  // lower bounds
  for (int i = 0; i < nt; ++i) {                  // lambda_i <= alpha / n_t
    qp.A(n + i, i) = 1.0;
    qp.A(n + i, n) = -1.0 / nt;
  }
  for (int j = 0; j < nc; ++j) {  // eta_j <= (1 - alpha) / (n_c r_j)
    const double cap = 1.0 / (nc * *ds.control(j).ratio);
    qp.A(n + nt + j, nt + j) = 1.0;
    qp.A(n + nt + j, n) = cap;
    qp.b(n + nt + j) = cap;
  }
  qp.A(2 * n, n) = -1.0;  // alpha >= 0
  qp.A(2 * n + 1, n) = 1.0;
  qp.b(2 * n + 1) = 1.0;  // alpha <= 1

  qp.E = Eigen::MatrixXd::Zero(1, nv);
  qp.E.row(0).head(n) = signed_labels(ds);
  qp.d = Eigen::VectorXd::Zero(1);
  return qp;
}

QpProblem assemble_dual(const Dataset& ds, const KernelSpec& kernel, double gamma) {
  validate_kernel(kernel);
  return assemble_dual(ds, gram_matrix(kernel, ds), gamma);
}

InterceptResult recover_intercept(const Dataset& ds, const Eigen::MatrixXd& gram,
                                  const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta,
                                  double alpha, double beta, double gamma,
                                  double interior_rel_tol) {
  const int nt = ds.n_t;
  const int nc = ds.n_c;
  const Eigen::VectorXd coef = signed_coefficients(ds, lambda, eta);
  const Eigen::VectorXd kw = gram * coef / (2.0 * gamma);  // K(w, x_k) at training points

  // When alpha pins to an end of [0, 1] the other side's caps collapse to
  // solver noise; multipliers hugging such a box look interior in relative
  // terms but carry no slackness information, so narrow boxes are skipped.
  constexpr double kCapFloor = 1e-6;
  std::vector<double> cands;
  const double cap_t = alpha / nt;
  for (int i = 0; i < nt; ++i) {
    if (cap_t > kCapFloor && lambda[i] > interior_rel_tol * cap_t &&
        lambda[i] < (1.0 - interior_rel_tol) * cap_t)
      cands.push_back(ds.treatment(i).y_obs - kw[i]);
  }
  for (int j = 0; j < nc; ++j) {
    const double cap_c = beta / (nc * *ds.control(j).ratio);
    if (cap_c > kCapFloor && eta[j] > interior_rel_tol * cap_c &&
        eta[j] < (1.0 - interior_rel_tol) * cap_c)
      cands.push_back(-ds.control(j).y_obs - kw[nt + j]);
  }
  if (!cands.empty()) {
    double sum = 0.0;
    for (double c : cands) sum += c;
    return {sum / static_cast<double>(cands.size()), "complementary-slackness"};
  }

  // Exact minimization of the primal over w0 with K(w, .) held fixed.
  detail::HingeFamily treat, ctrl;
  for (int i = 0; i < nt; ++i)
    treat.push_back({static_cast<double>(ds.treatment(i).y_obs), kw[i], 1.0 / nt});
  for (int j = 0; j < nc; ++j)
    ctrl.push_back({static_cast<double>(-ds.control(j).y_obs), kw[nt + j],
                    1.0 / (nc * *ds.control(j).ratio)});
  const auto res = detail::pl_minimize({treat, ctrl});
  return {res.b, "primal-line-search"};
}

InterceptResult recover_intercept(const QpSolution& dual, const Dataset& ds,
                                  const KernelSpec& kernel, double gamma,
                                  double interior_rel_tol) {
  const int n = ds.n();
  if (dual.x.size() != n + 1)
    throw std::invalid_argument("recover_intercept: solution length does not match dataset");
  const Eigen::VectorXd lambda = dual.x.head(ds.n_t).cwiseMax(0.0);
  const Eigen::VectorXd eta = dual.x.segment(ds.n_t, ds.n_c).cwiseMax(0.0);
  const double alpha = std::clamp(dual.x[n], 0.0, 1.0);
  return recover_intercept(ds, gram_matrix(kernel, ds), lambda, eta, alpha, 1.0 - alpha, gamma,
                           interior_rel_tol);
}

double primal_objective(const Dataset& ds, const Eigen::MatrixXd& gram, double gamma,
                        const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta, double w0) {
  const int nt = ds.n_t;
  const int nc = ds.n_c;
  const Eigen::VectorXd coef = signed_coefficients(ds, lambda, eta);
  const Eigen::VectorXd kw = gram * coef / (2.0 * gamma);

  double treat = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double margin = 1.0 - (w0 + kw[i]) * ds.treatment(i).y_obs;
    if (margin > 0.0) treat += margin;
  }
  treat /= nt;
  double ctrl = 0.0;
  for (int j = 0; j < nc; ++j) {
    const double margin = 1.0 + (w0 + kw[nt + j]) * ds.control(j).y_obs;
    if (margin > 0.0) ctrl += margin / *ds.control(j).ratio;
  }
  ctrl /= nc;
  const double kww = coef.dot(gram * coef) / (4.0 * gamma * gamma);
  return std::max(treat, ctrl) + gamma * kww;
}

double primal_objective(const Dataset& ds, const KernelSpec& kernel, double gamma,
                        const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta, double w0) {
  return primal_objective(ds, gram_matrix(kernel, ds), gamma, lambda, eta, w0);
}

CausalSvmModel train(const Dataset& ds, const KernelSpec& kernel, double gamma, double tol) {
  require_valid(ds, "train");
  require_ratios(ds, "train");
  validate_kernel(kernel);
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("train: gamma must be positive and finite");
  if (!(tol > 0.0)) throw std::invalid_argument("train: tol must be positive");

  const Eigen::MatrixXd gram = gram_matrix(kernel, ds);
  const QpProblem qp = assemble_dual(ds, gram, gamma);
  QpSolution dual = solve_qp(qp, tol);
  // Extreme gamma can stall the interior-point iterations just short of a
  // tight tolerance. A looser solve that still clears the duality-gap
  // certificate below is equally valid, so escalate before giving up.
  for (double t = tol; dual.status != QpStatus::Optimal && t < 9e-6; t *= 10.0) {
    dual = solve_qp(qp, t * 10.0);
  }
  if (dual.status != QpStatus::Optimal) {
    std::ostringstream msg;
    msg << "train: dual solve failed (status "
        << (dual.status == QpStatus::MaxIter ? "MaxIter" : "Infeasible") << ", worst residual "
        << dual.kkt.worst() << ")";
    throw numerical_error(msg.str());
  }

  const int n = ds.n();
  CausalSvmModel m;
  m.kernel = kernel;
  m.gamma = gamma;
  m.lambda = dual.x.head(ds.n_t).cwiseMax(0.0);
  m.eta = dual.x.segment(ds.n_t, ds.n_c).cwiseMax(0.0);
  m.alpha = std::clamp(dual.x[n], 0.0, 1.0);
  m.beta = 1.0 - m.alpha;
  m.data = ds;

  const auto ic = recover_intercept(ds, gram, m.lambda, m.eta, m.alpha, m.beta, gamma);
  m.w0 = ic.w0;
  m.intercept_provenance = ic.provenance;
  m.dual_objective_value = -dual.objective;
  m.primal_objective_value = primal_objective(ds, gram, gamma, m.lambda, m.eta, m.w0);
  m.duality_gap = m.primal_objective_value - m.dual_objective_value;

  const double gap_cap = std::max(1e-4, 10.0 * tol);
  if (m.duality_gap > gap_cap && ic.provenance == "complementary-slackness") {
    // The averaged intercept can sit slightly off the primal minimizer;
    // retry with the exact line search before giving up.
    const auto ls = recover_intercept(ds, gram, m.lambda, m.eta, m.alpha, m.beta, gamma, 2.0);
    const double p2 = primal_objective(ds, gram, gamma, m.lambda, m.eta, ls.w0);
    if (p2 < m.primal_objective_value) {
      m.w0 = ls.w0;
      m.intercept_provenance = ls.provenance;
      m.primal_objective_value = p2;
      m.duality_gap = p2 - m.dual_objective_value;
    }
  }
  if (m.duality_gap < -1e-6) {
    std::ostringstream msg;
    msg << "train: weak duality violated (primal " << m.primal_objective_value << " < dual "
        << m.dual_objective_value << ")";
    throw numerical_error(msg.str());
  }
  if (m.duality_gap > gap_cap) {
    std::ostringstream msg;
    msg << "train: duality gap " << m.duality_gap << " exceeds " << gap_cap << " (primal "
        << m.primal_objective_value << ", dual " << m.dual_objective_value << ")";
    throw numerical_error(msg.str());
  }
  return m;
}

double decision_value(const CausalSvmModel& m, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (int i = 0; i < m.data.n_t; ++i) {
    if (m.lambda[i] != 0.0)
      acc += m.lambda[i] * m.data.treatment(i).y_obs * eval_kernel(m.kernel, m.data.treatment(i).x, x);
  }
  for (int j = 0; j < m.data.n_c; ++j) {
    if (m.eta[j] != 0.0)
      acc -= m.eta[j] * m.data.control(j).y_obs * eval_kernel(m.kernel, m.data.control(j).x, x);
  }
  return m.w0 + acc / (2.0 * m.gamma);
}

std::vector<double> decision_values(const CausalSvmModel& m,
                                    const std::vector<Eigen::VectorXd>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(decision_value(m, x));
  return out;
}

Eigen::VectorXd training_decision_values(const CausalSvmModel& m, const Eigen::MatrixXd& gram) {
  const Eigen::VectorXd coef = signed_coefficients(m.data, m.lambda, m.eta);
  return (gram * coef / (2.0 * m.gamma)).array() + m.w0;
}

EffectLabel predict_effect(const CausalSvmModel& m, const Eigen::VectorXd& x, double theta) {
  return effect_label(decision_value(m, x), theta);
}

SupportVectors support_vectors(const CausalSvmModel& m, double rel_tol) {
  double cmax = 0.0;
  if (m.lambda.size() > 0) cmax = std::max(cmax, m.lambda.maxCoeff());
  if (m.eta.size() > 0) cmax = std::max(cmax, m.eta.maxCoeff());
  const double thr = rel_tol * cmax;
  SupportVectors sv;
  for (int i = 0; i < m.lambda.size(); ++i)
    if (m.lambda[i] > thr) sv.treatment.push_back(i);
  for (int j = 0; j < m.eta.size(); ++j)
    if (m.eta[j] > thr) sv.control.push_back(j);
  return sv;
}

std::vector<std::string> validate_model(const CausalSvmModel& m) {
  std::vector<std::string> out;
  const int nt = m.data.n_t;
  const int nc = m.data.n_c;
  if (m.lambda.size() != nt || m.eta.size() != nc)
    out.push_back("multiplier lengths do not match the retained data");
  if (std::abs(m.alpha + m.beta - 1.0) > 1e-9) out.push_back("alpha + beta != 1");
  if (!(m.gamma > 0.0)) out.push_back("gamma must be positive");
  for (int i = 0; i < nt && i < m.lambda.size(); ++i) {
    if (m.lambda[i] < 0.0 || m.lambda[i] > m.alpha / nt + 1e-9) {
      out.push_back("lambda outside [0, alpha/n_t]");
      break;
    }
  }
  for (int j = 0; j < nc && j < m.eta.size(); ++j) {
    const auto& r = m.data.control(j).ratio;
    if (!r) {
      out.push_back("control unit lost its ratio");
      break;
    }
    if (m.eta[j] < 0.0 || m.eta[j] > m.beta / (nc * *r) + 1e-9) {
      out.push_back("eta outside [0, beta/(n_c ratio)]");
      break;
    }
  }
  if (m.lambda.size() == nt && m.eta.size() == nc) {
    double bal = 0.0;
    for (int i = 0; i < nt; ++i) bal += m.lambda[i] * m.data.treatment(i).y_obs;
    for (int j = 0; j < nc; ++j) bal -= m.eta[j] * m.data.control(j).y_obs;
    if (std::abs(bal) > 1e-6) out.push_back("balance equality violated");
  }
  if (m.duality_gap < -1e-6) out.push_back("negative duality gap");
  return out;
}

}  // namespace causalsvm
