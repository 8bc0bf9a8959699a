#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "causalsvm/baselines.hpp"
#include "causalsvm/causal_svm.hpp"
#include "causalsvm/synthetic.hpp"

namespace causalsvm {

enum class WeightMode { Constant, Propensity, Column };

struct CausalConfig {
  KernelSpec kernel;
  double gamma = 1e-8;
};

struct MethodSpec {
  std::string name;  // row label in the results table
  std::variant<CausalConfig, LearnerKind> method;
};

struct MatrixConfig {
  GeneratorSpec generator;  // used when data_path is empty
  std::string data_path;    // load this CSV instead of generating
  double test_fraction = 0.5;
  std::vector<std::uint64_t> seeds;
  std::vector<double> fractions;
  WeightMode weights = WeightMode::Constant;
  double clip = 20.0;
  double propensity_l2 = 1e-4;
  double tol = 1e-8;
  std::vector<MethodSpec> methods;
};

struct MatrixCell {
  double mean = 0.0;
  double stddev = 0.0;               // sample std over successful seeds
  int failures = 0;                  // seeds whose run threw
  std::vector<double> values;        // loss_percent per successful seed
};

struct MatrixResult {
  std::vector<std::string> method_names;
  std::vector<double> fractions;
  std::vector<std::vector<MatrixCell>> cells;  // [method][fraction]
};

// Per seed: generate or load, split, fill ratios on the training half,
// fit every method, evaluate on the held-out half at every fraction.
// A method failing on one seed marks that seed failed in all of the
// method's cells; other methods and seeds are unaffected.
MatrixResult run_experiment_matrix(const MatrixConfig& config);

// Table with one "mean(std)" cell per method x fraction; cells with
// failures get a "[k failed]" suffix, all-failed cells read "failed".
std::string matrix_to_csv(const MatrixResult& r);

// CSV over a resolution x resolution lattice: x,y,h,label,kind with kind
// "grid", then one row per support vector (kind "sv_t" / "sv_c"). The
// model must have 2-D features.
std::string emit_decision_grid(const CausalSvmModel& model, double xmin, double xmax,
                               double ymin, double ymax, int resolution, double theta = 1.0);

}  // namespace causalsvm
