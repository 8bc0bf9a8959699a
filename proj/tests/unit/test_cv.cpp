#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "causalsvm/csv.hpp"
#include "causalsvm/cv.hpp"
#include "causalsvm/dataset.hpp"
#include "causalsvm/errors.hpp"
#include "causalsvm/rng.hpp"
#include "causalsvm/synthetic.hpp"
#include "causalsvm/weights.hpp"
#include "doctest.h"

using namespace causalsvm;

namespace {

Dataset fold_fixture(int n_t, int n_c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Unit> us;
  for (int i = 0; i < n_t + n_c; ++i) {
    Unit u;
    u.x = Eigen::VectorXd(2);
    u.x << rng.normal(), rng.normal();
    u.group = i < n_t ? Group::Treatment : Group::Control;
    u.y_obs = rng.bernoulli(0.5) ? 1 : -1;
    us.push_back(u);
  }
  return make_dataset(us);
}

// two tight clusters per group, labels arranged so that h(x) = x scores
// every unit correctly on both sides
Dataset cluster_fixture() {
  std::vector<Unit> us;
  for (int i = 0; i < 6; ++i) {
    const double step = 0.1 * i;
    Unit a;
    a.x = Eigen::VectorXd(1);
    a.x << -3.0 - step;
    a.group = Group::Treatment;
    a.y_obs = -1;
    us.push_back(a);
    Unit b;
    b.x = Eigen::VectorXd(1);
    b.x << 3.0 + step;
    b.group = Group::Treatment;
    b.y_obs = 1;
    us.push_back(b);
    Unit c;
    c.x = Eigen::VectorXd(1);
    c.x << -3.05 - step;
    c.group = Group::Control;
    c.y_obs = 1;
    c.ratio = 1.0;
    us.push_back(c);
    Unit d;
    d.x = Eigen::VectorXd(1);
    d.x << 3.05 + step;
    d.group = Group::Control;
    d.y_obs = -1;
    d.ratio = 1.0;
    us.push_back(d);
  }
  return make_dataset(us);
}

std::vector<int> group_counts(const Dataset& ds, const std::vector<int>& label, Group g,
                              int folds) {
  std::vector<int> c(folds, 0);
  for (int i = 0; i < ds.n(); ++i)
    if (ds.units[i].group == g) ++c[static_cast<std::size_t>(label[i])];
  return c;
}

}  // namespace

TEST_CASE("stratified folds are deterministic and balanced per group") {
  const Dataset ds = fold_fixture(17, 20, 3);
  const int folds = 4;
  const std::vector<int> a = stratified_folds(ds, folds, 9);
  const std::vector<int> b = stratified_folds(ds, folds, 9);
  CHECK(a == b);
  CHECK(a.size() == static_cast<std::size_t>(ds.n()));
  CHECK(*std::min_element(a.begin(), a.end()) == 0);
  CHECK(*std::max_element(a.begin(), a.end()) == folds - 1);

  const std::vector<int> other = stratified_folds(ds, folds, 10);
  CHECK(a != other);

  for (Group g : {Group::Treatment, Group::Control}) {
    const std::vector<int> c = group_counts(ds, a, g, folds);
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("fold membership ignores input order and ratios") {
  const Dataset ds = fold_fixture(15, 15, 4);

  // rebuild the same units in a scrambled order
  std::vector<Unit> shuffled = ds.units;
  Rng(123).shuffle(shuffled);
  const Dataset perm = make_dataset(shuffled);

  const std::vector<int> fa = stratified_folds(ds, 3, 5);
  const std::vector<int> fb = stratified_folds(perm, 3, 5);

  // features are random doubles, so the first coordinate identifies a unit
  std::map<double, int> by_unit;
  for (int i = 0; i < ds.n(); ++i) by_unit[ds.units[i].x[0]] = fa[i];
  for (int i = 0; i < perm.n(); ++i) {
    REQUIRE(by_unit.count(perm.units[i].x[0]) == 1);
    CHECK(by_unit[perm.units[i].x[0]] == fb[i]);
  }

  // filling in ratios must not move anyone
  const Dataset weighted = constant_ratios(ds);
  CHECK(stratified_folds(weighted, 3, 5) == fa);
}

TEST_CASE("fold count limits") {
  const Dataset ds = fold_fixture(12, 9, 6);
  CHECK_THROWS_AS(stratified_folds(ds, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(stratified_folds(ds, 10, 0), std::invalid_argument);

  // folds equal to the smaller group: singleton control folds
  const std::vector<int> label = stratified_folds(ds, 9, 0);
  const std::vector<int> c = group_counts(ds, label, Group::Control, 9);
  for (int v : c) CHECK(v == 1);
}

TEST_CASE("model selection prefers the bending kernel on spiral data") {
  const Dataset ds = constant_ratios(generate(GeneratorSpec{SpiralsSpec{120, 0.0, 5}, {}}));

  CvGrid grid;
  grid.kernels = {LinearKernel{}, RbfKernel{0.1}};
  grid.gammas = {1e-8};
  grid.folds = 3;
  grid.seed = 0;

  const CvResult res = nested_cv_select(ds, grid);
  CHECK(std::holds_alternative<RbfKernel>(res.best_kernel));
  CHECK(res.best_gamma == 1e-8);
  REQUIRE(res.scores.size() == 2);
  CHECK(std::holds_alternative<LinearKernel>(res.scores[0].kernel));
  CHECK(res.scores[1].score < res.scores[0].score);
  CHECK(res.best_score == res.scores[1].score);

  for (const auto& cs : res.scores) {
    REQUIRE(cs.fold_scores.size() == 3);
    double sum = 0.0;
    for (double f : cs.fold_scores) sum += f;
    CHECK(cs.score == doctest::Approx(sum / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("score ties prefer stronger regularization then the plainer kernel") {
  // every configuration separates this data perfectly, so all four counted
  // scores are exactly zero and only the tie rules decide
  const Dataset ds = cluster_fixture();

  CvGrid grid;
  grid.kernels = {RbfKernel{0.1}, LinearKernel{}};
  grid.gammas = {1e-6, 1e-3};
  grid.folds = 3;
  grid.seed = 7;

  const CvResult res = nested_cv_select(ds, grid, SurrogateLoss::DoubleIndicator);
  REQUIRE(res.scores.size() == 4);
  for (const auto& cs : res.scores) CHECK(cs.score == 0.0);
  CHECK(std::holds_alternative<LinearKernel>(res.best_kernel));
  CHECK(res.best_gamma == 1e-3);
  CHECK(res.best_score == 0.0);

  const std::string expected = std::string("kernel,gamma,score\n") +          //
                               "rbf(0.1)," + format_double(1e-6) + ",0\n" +   //
                               "rbf(0.1)," + format_double(1e-3) + ",0\n" +   //
                               "linear," + format_double(1e-6) + ",0\n" +     //
                               "linear," + format_double(1e-3) + ",0\n";
  CHECK(cv_scores_to_csv(res) == expected);
}

TEST_CASE("grid validation") {
  const Dataset ds = cluster_fixture();
  CvGrid grid;
  grid.kernels = {LinearKernel{}};
  grid.gammas = {0.1};
  grid.folds = 3;

  CvGrid empty_k = grid;
  empty_k.kernels.clear();
  CHECK_THROWS_AS(nested_cv_select(ds, empty_k), std::invalid_argument);

  CvGrid empty_g = grid;
  empty_g.gammas.clear();
  CHECK_THROWS_AS(nested_cv_select(ds, empty_g), std::invalid_argument);

  CvGrid bad_g = grid;
  bad_g.gammas = {0.1, 0.0};
  CHECK_THROWS_AS(nested_cv_select(ds, bad_g), std::invalid_argument);

  CvGrid bad_k = grid;
  bad_k.kernels = {RbfKernel{0.0}};
  CHECK_THROWS_AS(nested_cv_select(ds, bad_k), std::invalid_argument);

  // training inside the folds still insists on control ratios
  Dataset bare = cluster_fixture();
  for (auto& u : bare.units) u.ratio.reset();
  CHECK_THROWS_AS(nested_cv_select(bare, grid), std::invalid_argument);
}
