#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace causalsvm {

enum class Group { Treatment, Control };

// One experimental unit. y values live in {-1, +1}. y_t / y_c are the
// potential outcomes, known only for synthetic data; ratio is the density
// ratio weight, meaningful on control units.
struct Unit {
  Eigen::VectorXd x;
  Group group = Group::Treatment;
  int y_obs = 1;
  std::optional<int> y_t;
  std::optional<int> y_c;
  std::optional<double> ratio;
};

struct Violation {
  std::ptrdiff_t unit;  // -1 for dataset-level problems
  std::string reason;
};

// Units are kept in canonical order: all treatment units first, then all
// control units, each block preserving construction order. Kernel code and
// the dual assembly index into this layout directly.
struct Dataset {
  std::vector<Unit> units;
  int n_t = 0;
  int n_c = 0;
  int dim = 0;
  std::map<std::string, std::string> meta;

  int n() const { return n_t + n_c; }
  const Unit& treatment(int i) const { return units[static_cast<std::size_t>(i)]; }
  const Unit& control(int j) const { return units[static_cast<std::size_t>(n_t + j)]; }
  Unit& treatment(int i) { return units[static_cast<std::size_t>(i)]; }
  Unit& control(int j) { return units[static_cast<std::size_t>(n_t + j)]; }
};

// Stable-partitions into canonical order and fills the counts.
Dataset make_dataset(std::vector<Unit> units,
                     std::map<std::string, std::string> meta = {});

// Re-canonicalize in place after group labels changed.
void canonicalize(Dataset& ds);

// Returns all invariant violations; an empty list means the dataset is fit
// for training. Checks group counts, dimension consistency, label domains,
// y_obs consistency with the matching potential outcome, ratio positivity,
// and canonical ordering.
std::vector<Violation> validate_dataset(const Dataset& ds);

// Throws std::invalid_argument with a joined message if validation fails.
void require_valid(const Dataset& ds, const std::string& context);

// Disjoint uniform random partition; test side gets round(fraction * n)
// units clamped to [1, n-1]. Returns {train, test}.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

}  // namespace causalsvm
