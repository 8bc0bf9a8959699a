#pragma once

#include <cstdint>
#include <vector>

#include "causalsvm/dataset.hpp"
#include "causalsvm/kernels.hpp"
#include "causalsvm/surrogate.hpp"

namespace causalsvm {

struct CvGrid {
  std::vector<KernelSpec> kernels;
  std::vector<double> gammas;
  int folds = 5;
  std::uint64_t seed = 0;
};

struct CvConfigScore {
  KernelSpec kernel;
  double gamma = 0.0;
  double score = 0.0;  // mean held-out minimax risk; +inf if a fold failed
  std::vector<double> fold_scores;
};

struct CvResult {
  KernelSpec best_kernel;
  double best_gamma = 0.0;
  double best_score = 0.0;
  std::vector<CvConfigScore> scores;  // grid order
};

// Group-stratified k-fold selection over the grid, scored by the held-out
// minimax surrogate risk, so picking hyperparameters needs no potential
// outcomes. Fold assignment hashes each unit (features, group, observed
// label), sorts by the hash, shuffles with the grid seed, and deals
// round-robin per group; the folds therefore do not depend on input order.
// Ties: smaller score, then larger gamma, then the simpler kernel (linear,
// then polynomial by degree, then rbf by larger width).
CvResult nested_cv_select(const Dataset& ds, const CvGrid& grid,
                          SurrogateLoss loss = SurrogateLoss::Hinge);

// CSV rows kernel,gamma,score (with header), grid order.
std::string cv_scores_to_csv(const CvResult& result);

// Fold labels per canonical unit index; exposed for tests.
std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed);

}  // namespace causalsvm
