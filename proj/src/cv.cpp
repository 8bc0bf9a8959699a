#include "causalsvm/cv.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "causalsvm/causal_svm.hpp"
#include "causalsvm/csv.hpp"
#include "causalsvm/errors.hpp"
#include "causalsvm/rng.hpp"

namespace causalsvm {

namespace {

std::uint64_t fnv1a_add(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

// Content hash of what identifies a unit for fold purposes. Ratios are
// left out on purpose: fold membership must not move when a weights pass
// fills them in.
std::uint64_t unit_fingerprint(const Unit& u) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index k = 0; k < u.x.size(); ++k) {
    const double v = u.x[k];
    h = fnv1a_add(h, &v, sizeof(v));
  }
  const unsigned char g = u.group == Group::Treatment ? 'T' : 'C';
  h = fnv1a_add(h, &g, 1);
  const signed char y = static_cast<signed char>(u.y_obs);
  h = fnv1a_add(h, &y, 1);
  return h;
}

// Kernel complexity order for tie-breaks.
std::pair<int, double> kernel_rank(const KernelSpec& k) {
  if (std::holds_alternative<LinearKernel>(k)) return {0, 0.0};
  if (const auto* p = std::get_if<PolynomialKernel>(&k)) return {1, static_cast<double>(p->degree)};
  return {2, std::get<RbfKernel>(k).inv_width};
}

}  // namespace

std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: folds must be >= 2");
  if (folds > std::min(ds.n_t, ds.n_c))
    throw std::invalid_argument("stratified_folds: folds exceed the smaller group");

  std::vector<int> label(ds.units.size(), 0);
  for (int pass = 0; pass < 2; ++pass) {
    const bool treat = pass == 0;
    std::vector<std::pair<std::uint64_t, int>> order;
    for (int i = 0; i < ds.n(); ++i) {
      if ((ds.units[i].group == Group::Treatment) == treat)
        order.emplace_back(unit_fingerprint(ds.units[i]), i);
    }
    std::sort(order.begin(), order.end());
    Rng rng(mix_seed(seed, treat ? 11 : 12));
    rng.shuffle(order);
    for (std::size_t k = 0; k < order.size(); ++k)
      label[order[k].second] = static_cast<int>(k % folds);
  }
  return label;
}

CvResult nested_cv_select(const Dataset& ds, const CvGrid& grid, SurrogateLoss loss) {
  require_valid(ds, "nested_cv_select");
  if (grid.kernels.empty() || grid.gammas.empty())
    throw std::invalid_argument("nested_cv_select: empty grid");
  for (const auto& k : grid.kernels) validate_kernel(k);
  for (double g : grid.gammas)
    if (!(g > 0.0)) throw std::invalid_argument("nested_cv_select: gammas must be positive");

  const std::vector<int> fold_of = stratified_folds(ds, grid.folds, grid.seed);

  std::vector<Dataset> train_sets(grid.folds), held_sets(grid.folds);
  for (int f = 0; f < grid.folds; ++f) {
    std::vector<Unit> tr, ho;
    for (int i = 0; i < ds.n(); ++i)
      (fold_of[i] == f ? ho : tr).push_back(ds.units[i]);
    train_sets[f] = make_dataset(std::move(tr), ds.meta);
    held_sets[f] = make_dataset(std::move(ho), ds.meta);
  }

  CvResult result;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& kernel : grid.kernels) {
    for (double gamma : grid.gammas) {
      CvConfigScore cs;
      cs.kernel = kernel;
      cs.gamma = gamma;
      double sum = 0.0;
      bool failed = false;
      for (int f = 0; f < grid.folds && !failed; ++f) {
        try {
          const CausalSvmModel model = train(train_sets[f], kernel, gamma);
          std::vector<double> h;
          h.reserve(held_sets[f].units.size());
          for (const auto& u : held_sets[f].units) h.push_back(decision_value(model, u.x));
          const RiskPair risk = minimax_risk(h, held_sets[f], loss);
          cs.fold_scores.push_back(risk.minimax);
          sum += risk.minimax;
        } catch (const numerical_error&) {
          failed = true;
        }
      }
      cs.score = failed ? inf : sum / grid.folds;
      result.scores.push_back(std::move(cs));
    }
  }

  const CvConfigScore* best = nullptr;
  for (const auto& cs : result.scores) {
    if (!best) {
      best = &cs;
      continue;
    }
    if (cs.score < best->score) {
      best = &cs;
    } else if (cs.score == best->score) {
      if (cs.gamma > best->gamma) {
        best = &cs;
      } else if (cs.gamma == best->gamma && kernel_rank(cs.kernel) < kernel_rank(best->kernel)) {
        best = &cs;
      }
    }
  }
  if (!best || best->score == inf)
    throw numerical_error("nested_cv_select: every configuration failed to train");
  result.best_kernel = best->kernel;
  result.best_gamma = best->gamma;
  result.best_score = best->score;
  return result;
}

std::string cv_scores_to_csv(const CvResult& result) {
  std::ostringstream out;
  out << "kernel,gamma,score\n";
  for (const auto& cs : result.scores)
    out << kernel_name(cs.kernel) << ',' << format_double(cs.gamma) << ','
        << format_double(cs.score) << '\n';
  return out.str();
}

}  // namespace causalsvm
