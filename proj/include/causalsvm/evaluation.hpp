#pragma once

#include <functional>
#include <string>
#include <vector>

#include "causalsvm/causal_svm.hpp"
#include "causalsvm/dataset.hpp"

namespace causalsvm {

// Ground-truth pointwise losses. All three agree when the potential
// outcomes coincide (penalize any decided effect); they differ in how a
// real effect must be missed to count:
//   L1:     wrong side of the unit margin (h <= -1 resp. h >= 1)
//   LTheta: same with a configurable margin theta > 0
//   L01:    wrong sign, boundary included (h <= 0 resp. h >= 0)
enum class PointwiseKind { L01, LTheta, L1 };

int pointwise_loss(PointwiseKind kind, double h, int y_t, int y_c, double theta = 1.0);

struct TruthPair {
  int y_t = 0;
  int y_c = 0;
};

struct EvaluationCounts {
  int false_positive = 0;
  int false_negative = 0;
  int spurious_effect = 0;
  int n = 0;
};

struct EvaluationReport {
  double fraction_neutral = 0.0;
  double threshold_t = 0.0;  // realized quantile cut on |h|
  double loss_percent = 0.0;
  EvaluationCounts counts;
};

// Benchmark protocol: the `fraction` of points with smallest |h| is forced
// neutral. The cut c is the ceil(fraction*n)-th smallest absolute value
// (c = 0 when that count is zero) and errors are counted strictly beyond
// it: truth-positive with h < -c, truth-negative with h > c, truth-neutral
// with |h| > c. Ties at the cut are neutral, and a neutral prediction on a
// non-neutral truth is not an error.
EvaluationReport quantile_neutral_loss(const std::vector<double>& h_values,
                                       const std::vector<TruthPair>& truths, double fraction);

using Predictor = std::function<double(const Eigen::VectorXd&)>;

// One report per fraction. Every test unit must carry both potential
// outcomes.
std::vector<EvaluationReport> evaluate_model(const Predictor& predict, const Dataset& test,
                                             const std::vector<double>& fractions);
std::vector<EvaluationReport> evaluate_model(const CausalSvmModel& model, const Dataset& test,
                                             const std::vector<double>& fractions);

// CSV rows: fraction,threshold,loss_percent,fp,fn,spurious,n (with header).
std::string reports_to_csv(const std::vector<EvaluationReport>& reports);

}  // namespace causalsvm
