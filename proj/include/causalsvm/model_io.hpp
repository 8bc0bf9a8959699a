#pragma once

#include <string>
#include <variant>

#include "causalsvm/baselines.hpp"
#include "causalsvm/causal_svm.hpp"

namespace causalsvm {

// Model files are single JSON documents with format_version 1. A minimax
// model stores the kernel, gamma, w0, alpha/beta, the multipliers, the
// training units (features, observed labels, groups, ratios), and the
// objective triple; reloading reproduces decision_value to full precision.
// Two-model baselines wrap their two fitted scorers under a "two_model"
// key in the same file format.
void save_model(const CausalSvmModel& m, const std::string& path);
CausalSvmModel load_model(const std::string& path);

void save_two_model(const TwoModelPredictor& p, const std::string& path);
TwoModelPredictor load_two_model(const std::string& path);

using AnyModel = std::variant<CausalSvmModel, TwoModelPredictor>;
AnyModel load_any_model(const std::string& path);

// Decision value of either model kind.
double any_decision_value(const AnyModel& m, const Eigen::VectorXd& x);

}  // namespace causalsvm
