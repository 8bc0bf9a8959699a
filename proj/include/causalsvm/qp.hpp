#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace causalsvm {

// min 1/2 x'Px + q'x  subject to  Ax <= b,  Ex = d.
// P must be symmetric PSD within tolerance; A and E may have zero rows.
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd d;
};

// Shape and symmetry diagnostics; empty result means well-formed.
std::vector<std::string> validate_qp(const QpProblem& qp);

enum class QpStatus { Optimal, MaxIter, Infeasible };

struct KktResiduals {
  double stationarity = 0.0;     // ||Px + q + A'mu + E'nu||_inf
  double primal = 0.0;           // max((Ax-b)_+, |Ex-d|)
  double dual = 0.0;             // max(0, -min mu)
  double complementarity = 0.0;  // max_i |mu_i (Ax-b)_i|
  double worst() const;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
  double objective = 0.0;
  KktResiduals kkt;
  int iterations = 0;
  QpStatus status = QpStatus::MaxIter;
  std::string metadata;  // algorithm + scaling identifier
};

// Recomputed from scratch on the given data; the certification path used by
// tests and by solve_qp's own exit check.
KktResiduals kkt_residuals(const QpProblem& qp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& mu, const Eigen::VectorXd& nu);

// Primal-dual interior point (Mehrotra predictor-corrector) with Ruiz
// equilibration. Status Optimal certifies all four KKT residuals <= tol on
// the original (unscaled) data. When progress stalls with the absolute
// criterion out of reach (data scales push the residual rounding floor past
// tol), a componentwise backward-error certificate may accept instead; that
// is recorded as ";certificate:relative" in metadata.
QpSolution solve_qp(const QpProblem& qp, double tol = 1e-8, int max_iter = 100000);

}  // namespace causalsvm
