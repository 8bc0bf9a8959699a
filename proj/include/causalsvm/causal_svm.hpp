#pragma once

#include <string>
#include <vector>

#include "causalsvm/dataset.hpp"
#include "causalsvm/kernels.hpp"
#include "causalsvm/qp.hpp"

namespace causalsvm {

enum class EffectLabel { Positive, Neutral, Negative };

std::string effect_label_name(EffectLabel l);

// h >= theta -> Positive, h <= -theta -> Negative, else Neutral.
// Boundary values are decided, not neutral.
EffectLabel effect_label(double h, double theta);

// Fitted minimax effect-sign model. The decision function is
//   h(x) = w0 + (1/2 gamma) (sum_T lambda_i y_i K(x_i, x)
//                            - sum_C eta_j y_j K(x_j, x)),
// the kernel expansion of the stationarity condition of the training
// Lagrangian. Training units are retained for prediction.
struct CausalSvmModel {
  KernelSpec kernel;
  double gamma = 0.0;
  double w0 = 0.0;
  double alpha = 0.0;  // weight of the treatment risk term; beta = 1 - alpha
  double beta = 0.0;
  Eigen::VectorXd lambda;  // treatment multipliers, in [0, alpha/n_t]
  Eigen::VectorXd eta;     // control multipliers, in [0, beta/(n_c ratio_j)]
  Dataset data;
  double primal_objective_value = 0.0;
  double dual_objective_value = 0.0;
  double duality_gap = 0.0;
  std::string intercept_provenance;  // complementary-slackness | primal-line-search
};

// Dual of the minimax hinge problem, as a minimization QP over (lambda,
// eta, alpha). The quadratic block is signed_gram / (2 gamma) (so the
// 1/(4 gamma) dual curvature appears through the 1/2 x'Px convention),
// the linear term is -1 on (lambda, eta), and the constraints are the
// boxes 0 <= lambda_i <= alpha/n_t, 0 <= eta_j <= (1-alpha)/(n_c r_j)
// written as linear inequalities, 0 <= alpha <= 1, and the balance
// equality sum_T lambda_i y_i = sum_C eta_j y_j.
QpProblem assemble_dual(const Dataset& ds, const Eigen::MatrixXd& gram, double gamma);
QpProblem assemble_dual(const Dataset& ds, const KernelSpec& kernel, double gamma);

struct InterceptResult {
  double w0 = 0.0;
  std::string provenance;
};

// Complementary slackness first: every strictly interior multiplier pins
// w0 (y_i - K(w, x_i) on the treatment side, -y_j - K(w, x_j) on the
// control side); candidates are averaged. interior_rel_tol is relative to
// each coefficient's box cap. With no interior candidates, falls back to
// the exact piecewise-linear minimization of the primal over w0.
InterceptResult recover_intercept(const Dataset& ds, const Eigen::MatrixXd& gram,
                                  const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta,
                                  double alpha, double beta, double gamma,
                                  double interior_rel_tol = 1e-5);
// Same recovery straight from a dual solve.
InterceptResult recover_intercept(const QpSolution& dual, const Dataset& ds,
                                  const KernelSpec& kernel, double gamma,
                                  double interior_rel_tol = 1e-5);

// max(treatment hinge mean, ratio-weighted control hinge mean) + gamma K(w,w).
double primal_objective(const Dataset& ds, const Eigen::MatrixXd& gram, double gamma,
                        const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta, double w0);
double primal_objective(const Dataset& ds, const KernelSpec& kernel, double gamma,
                        const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta, double w0);

// Solves the dual, recovers the intercept, and certifies weak duality and
// duality_gap <= max(1e-4, 10 tol). Throws numerical_error on solver
// failure or a failed certificate, std::invalid_argument on bad inputs
// (including missing control ratios).
CausalSvmModel train(const Dataset& ds, const KernelSpec& kernel, double gamma,
                     double tol = 1e-8);

double decision_value(const CausalSvmModel& m, const Eigen::VectorXd& x);
std::vector<double> decision_values(const CausalSvmModel& m,
                                    const std::vector<Eigen::VectorXd>& xs);
// Decision values at the training units via a precomputed gram matrix.
Eigen::VectorXd training_decision_values(const CausalSvmModel& m, const Eigen::MatrixXd& gram);

EffectLabel predict_effect(const CausalSvmModel& m, const Eigen::VectorXd& x,
                           double theta = 1.0);

struct SupportVectors {
  std::vector<int> treatment;  // indices into the treatment block
  std::vector<int> control;    // indices into the control block
};

// Multipliers above rel_tol * max coefficient.
SupportVectors support_vectors(const CausalSvmModel& m, double rel_tol = 1e-7);

// Model invariant diagnostics (box bounds, alpha + beta = 1, balance
// equality, weak duality); empty means healthy.
std::vector<std::string> validate_model(const CausalSvmModel& m);

}  // namespace causalsvm
