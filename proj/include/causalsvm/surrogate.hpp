#pragma once

#include <functional>
#include <vector>

#include "causalsvm/dataset.hpp"

namespace causalsvm {

// Surrogate losses for the minimax risk. Every member dominates the step
// pair 1_{z>=0} + 1_{z>=1}, which is what makes the minimax objective an
// upper bound on the unit-margin effect-sign error.
enum class SurrogateLoss {
  DoubleIndicator,  // 1_{z>=0} + 1_{z>=1}
  Hinge,            // max(0, 1 + z)
  Squared,          // (1 + z)^2
  ScaledLogistic,   // 2 ln(1 + e^z) / ln(1 + e)
  Exponential,      // e^z (overflows to +inf past z ~ 709; by design)
};

double surrogate_value(SurrogateLoss loss, double z);

// True when e^z no longer fits a double and the value saturates to +inf.
bool surrogate_saturates(SurrogateLoss loss, double z);

struct ValidityReport {
  bool pass = true;
  double z_fail = 0.0;   // first grid point where the bound fails
  double value = 0.0;    // loss value there
  double required = 0.0; // step-pair value there
};

// Checks loss(z) >= 1_{z>=0} + 1_{z>=1} on the grid z_min, z_min+step, ...
// plus the exact points 0 and 1.
ValidityReport check_surrogate_validity(const std::function<double(double)>& loss,
                                        double z_min, double z_max, double step);
ValidityReport check_surrogate_validity(SurrogateLoss loss, double z_min = -10.0,
                                        double z_max = 10.0, double step = 1e-3);

struct RiskPair {
  double treatment_risk = 0.0;
  double control_risk = 0.0;
  double minimax = 0.0;
};

// treatment_risk = mean over treatment units of loss(-h_i y_i),
// control_risk  = mean over control units of loss(h_j y_j) / ratio_j,
// minimax = max of the two. h is aligned with the canonical unit order.
RiskPair minimax_risk(const std::vector<double>& h, const Dataset& ds, SurrogateLoss loss);

}  // namespace causalsvm
