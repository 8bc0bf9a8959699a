#include <Eigen/Core>
#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "causalsvm/dataset.hpp"
#include "doctest.h"

using namespace causalsvm;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Unit unit(double a, double b, Group g, int y) {
  Unit u;
  u.x = vec2(a, b);
  u.group = g;
  u.y_obs = y;
  return u;
}

Dataset small_valid() {
  std::vector<Unit> us;
  us.push_back(unit(0.0, 1.0, Group::Control, -1));
  us.push_back(unit(1.0, 0.0, Group::Treatment, 1));
  us.push_back(unit(2.0, 2.0, Group::Control, 1));
  us.push_back(unit(3.0, 1.0, Group::Treatment, -1));
  for (auto& u : us)
    if (u.group == Group::Control) u.ratio = 1.0;
  return make_dataset(std::move(us));
}

}  // namespace

TEST_CASE("make_dataset partitions treatment first, stable within blocks") {
  Dataset ds = small_valid();
  CHECK(ds.n_t == 2);
  CHECK(ds.n_c == 2);
  CHECK(ds.n() == 4);
  CHECK(ds.dim == 2);
  // Construction order within each block survives the partition.
  CHECK(ds.treatment(0).x[0] == 1.0);
  CHECK(ds.treatment(1).x[0] == 3.0);
  CHECK(ds.control(0).x[0] == 0.0);
  CHECK(ds.control(1).x[0] == 2.0);
  CHECK(validate_dataset(ds).empty());
}

TEST_CASE("canonicalize repairs order after group edits") {
  Dataset ds = small_valid();
  ds.treatment(0).group = Group::Control;
  ds.treatment(0).ratio = 1.0;
  canonicalize(ds);
  CHECK(ds.n_t == 1);
  CHECK(ds.n_c == 3);
  CHECK(validate_dataset(ds).empty());
}

TEST_CASE("validate_dataset flags structural problems") {
  SUBCASE("one group empty") {
    std::vector<Unit> us{unit(0, 0, Group::Treatment, 1), unit(1, 1, Group::Treatment, -1)};
    Dataset ds = make_dataset(us);
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("dimension mismatch") {
    Dataset ds = small_valid();
    ds.units[1].x = Eigen::VectorXd::Zero(3);
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("label outside {-1, 1}") {
    Dataset ds = small_valid();
    ds.units[0].y_obs = 0;
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("observed label contradicts its potential outcome") {
    Dataset ds = small_valid();
    ds.treatment(0).y_t = -ds.treatment(0).y_obs;
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("nonpositive ratio") {
    Dataset ds = small_valid();
    ds.control(0).ratio = 0.0;
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("control before treatment breaks canonical order") {
    Dataset ds = small_valid();
    std::swap(ds.units[0], ds.units[2]);
    CHECK(!validate_dataset(ds).empty());
  }
  SUBCASE("violations name the unit") {
    Dataset ds = small_valid();
    ds.units[3].y_obs = 7;
    auto v = validate_dataset(ds);
    REQUIRE(!v.empty());
    CHECK(v[0].unit == 3);
  }
}

TEST_CASE("require_valid throws with the caller's context") {
  Dataset ds = small_valid();
  ds.units[0].y_obs = 0;
  CHECK_THROWS_AS(require_valid(ds, "train"), std::invalid_argument);
  CHECK_NOTHROW(require_valid(small_valid(), "train"));
}

TEST_CASE("split_train_test sizes, disjointness, determinism") {
  std::vector<Unit> us;
  for (int i = 0; i < 40; ++i) {
    Unit u = unit(i, -i, i % 3 == 0 ? Group::Control : Group::Treatment, i % 2 == 0 ? 1 : -1);
    if (u.group == Group::Control) u.ratio = 1.0;
    us.push_back(u);
  }
  Dataset ds = make_dataset(us, {{"origin", "test"}});

  auto [train, test] = split_train_test(ds, 0.25, 7);
  CHECK(test.n() == 10);  // round(0.25 * 40)
  CHECK(train.n() == 30);
  CHECK(validate_dataset(train).empty());
  CHECK(validate_dataset(test).empty());
  CHECK(train.meta.at("origin") == "test");

  // Union of the halves is the original multiset of units.
  auto key = [](const Unit& u) { return std::make_pair(u.x[0], u.x[1]); };
  std::multiset<std::pair<double, double>> all, parts;
  for (const auto& u : ds.units) all.insert(key(u));
  for (const auto& u : train.units) parts.insert(key(u));
  for (const auto& u : test.units) parts.insert(key(u));
  CHECK(all == parts);

  // Same seed reproduces the split; a different seed moves it.
  auto [train2, test2] = split_train_test(ds, 0.25, 7);
  CHECK(train2.n() == train.n());
  bool same = true;
  for (int i = 0; i < train.n(); ++i)
    same = same && (train.units[static_cast<std::size_t>(i)].x.array() ==
                    train2.units[static_cast<std::size_t>(i)].x.array())
                       .all();
  CHECK(same);
  auto [train3, test3] = split_train_test(ds, 0.25, 8);
  bool moved = train3.n() != train.n();
  for (int i = 0; !moved && i < train.n(); ++i)
    moved = (train.units[static_cast<std::size_t>(i)].x.array() !=
             train3.units[static_cast<std::size_t>(i)].x.array())
                .any();
  CHECK(moved);
}

TEST_CASE("split_train_test clamps the test side into [1, n-1]") {
  Dataset ds = small_valid();
  auto [tr_lo, te_lo] = split_train_test(ds, 0.0, 1);
  CHECK(te_lo.n() == 1);
  auto [tr_hi, te_hi] = split_train_test(ds, 1.0, 1);
  CHECK(te_hi.n() == 3);
  CHECK_THROWS_AS(split_train_test(ds, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_test(ds, 1.1, 1), std::invalid_argument);
}
