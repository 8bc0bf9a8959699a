#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "causalsvm/dataset.hpp"
#include "causalsvm/kernels.hpp"

namespace causalsvm {

// Comparators that fit one model per group and score x by the difference
// f_T(x) - f_C(x).
struct SvmLearner {
  KernelSpec kernel;
  double cost = 1.0;  // box bound C of the soft-margin dual
};
struct RidgeLearner {
  KernelSpec kernel;
  double l2 = 1e-6;
};
struct LogisticLearner {
  double l2 = 1e-4;
};
using LearnerKind = std::variant<SvmLearner, RidgeLearner, LogisticLearner>;

// A fitted per-group scorer in one of three shapes: a kernel expansion
// bias + sum_i coef_i K(points_i, x), a linear score bias + weights.x
// (logistic log-odds), or a constant (one-outcome-class training sets).
struct BaseLearner {
  enum class Form { KernelExpansion, Linear, Constant } form = Form::Constant;
  KernelSpec kernel;
  Eigen::MatrixXd points;  // one training point per row
  Eigen::VectorXd coef;
  Eigen::VectorXd weights;
  double bias = 0.0;
};

double predict_value(const BaseLearner& m, const Eigen::VectorXd& x);

// units: one group's slice. Classifier kinds degrade to a constant +-1
// model when only one outcome class is present.
BaseLearner train_base_learner(const LearnerKind& kind, const std::vector<Unit>& units,
                               std::uint64_t seed = 0);

struct TwoModelPredictor {
  LearnerKind kind;
  BaseLearner model_t;
  BaseLearner model_c;
};

TwoModelPredictor fit_two_model(const Dataset& ds, const LearnerKind& kind,
                                std::uint64_t seed = 0);

// f_T(x) - f_C(x).
double predict_difference(const TwoModelPredictor& p, const Eigen::VectorXd& x);

std::string learner_name(const LearnerKind& kind);  // e.g. svm(rbf(0.1)), ridge(linear), logistic

}  // namespace causalsvm
