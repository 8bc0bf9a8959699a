#include "causalsvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/rng.hpp"

namespace causalsvm {

Dataset make_dataset(std::vector<Unit> units, std::map<std::string, std::string> meta) {
  Dataset ds;
  ds.units = std::move(units);
  ds.meta = std::move(meta);
  canonicalize(ds);
  return ds;
}

void canonicalize(Dataset& ds) {
  std::stable_partition(ds.units.begin(), ds.units.end(),
                        [](const Unit& u) { return u.group == Group::Treatment; });
  ds.n_t = static_cast<int>(std::count_if(ds.units.begin(), ds.units.end(), [](const Unit& u) {
    return u.group == Group::Treatment;
  }));
  ds.n_c = static_cast<int>(ds.units.size()) - ds.n_t;
  ds.dim = ds.units.empty() ? 0 : static_cast<int>(ds.units.front().x.size());
}

namespace {

bool finite_vec(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& ds) {
  std::vector<Violation> out;
  if (ds.n_t < 1) out.push_back({-1, "needs at least one treatment unit"});
  if (ds.n_c < 1) out.push_back({-1, "needs at least one control unit"});
  if (ds.n_t + ds.n_c != static_cast<int>(ds.units.size()))
    out.push_back({-1, "stored group counts disagree with the unit list"});

  bool seen_control = false;
  for (std::size_t i = 0; i < ds.units.size(); ++i) {
    const Unit& u = ds.units[i];
    const auto idx = static_cast<std::ptrdiff_t>(i);
    if (u.group == Group::Control) {
      seen_control = true;
    } else if (seen_control) {
      out.push_back({idx, "treatment unit after a control unit breaks canonical order"});
      seen_control = false;  // report once
    }
    if (static_cast<int>(u.x.size()) != ds.dim)
      out.push_back({idx, "feature dimension differs from the dataset dimension"});
    if (!finite_vec(u.x)) out.push_back({idx, "non-finite feature value"});
    if (u.y_obs != 1 && u.y_obs != -1) out.push_back({idx, "y_obs must be -1 or +1"});
    if (u.y_t && *u.y_t != 1 && *u.y_t != -1) out.push_back({idx, "y_t must be -1 or +1"});
    if (u.y_c && *u.y_c != 1 && *u.y_c != -1) out.push_back({idx, "y_c must be -1 or +1"});
    if (u.group == Group::Treatment && u.y_t && *u.y_t != u.y_obs)
      out.push_back({idx, "treatment unit has y_obs != y_t"});
    if (u.group == Group::Control && u.y_c && *u.y_c != u.y_obs)
      out.push_back({idx, "control unit has y_obs != y_c"});
    if (u.ratio && !(std::isfinite(*u.ratio) && *u.ratio > 0.0))
      out.push_back({idx, "ratio must be finite and positive"});
  }
  return out;
}

void require_valid(const Dataset& ds, const std::string& context) {
  const auto v = validate_dataset(ds);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << context << ": invalid dataset:";
  for (std::size_t i = 0; i < v.size() && i < 8; ++i)
    msg << " [unit " << v[i].unit << "] " << v[i].reason << ";";
  if (v.size() > 8) msg << " (+" << v.size() - 8 << " more)";
  throw std::invalid_argument(msg.str());
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
  const int n = static_cast<int>(ds.units.size());
  if (n < 2) throw std::invalid_argument("split_train_test: need at least 2 units");
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
    throw std::invalid_argument("split_train_test: fraction must lie in [0, 1]");

  int n_test = static_cast<int>(std::llround(test_fraction * n));
  n_test = std::clamp(n_test, 1, n - 1);

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<Unit> test_units, train_units;
  test_units.reserve(static_cast<std::size_t>(n_test));
  train_units.reserve(static_cast<std::size_t>(n - n_test));
  for (int k = 0; k < n; ++k) {
    const Unit& u = ds.units[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    (k < n_test ? test_units : train_units).push_back(u);
  }
  return {make_dataset(std::move(train_units), ds.meta),
          make_dataset(std::move(test_units), ds.meta)};
}

}  // namespace causalsvm
