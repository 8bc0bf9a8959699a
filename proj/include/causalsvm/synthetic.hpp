#pragma once

#include <cstdint>
#include <variant>

#include "causalsvm/dataset.hpp"

namespace causalsvm {

// Assignment mechanisms. CovariateSigmoid treats a unit with probability
// scale * (1 - exp(-x_k^2)) / (1 + exp(-x_k^2)); the factor lives in
// [0, 1), so scale in (0, 1] keeps the probability in [0, 1).
struct Balanced {};
struct BernoulliP {
  double p = 0.5;
};
struct CovariateSigmoid {
  double scale = 0.75;
  int feature_index = 0;
};
using Assignment = std::variant<Balanced, BernoulliP, CovariateSigmoid>;

// Draws groups and sets y_obs from the matching potential outcome. The
// population (features and potential outcomes) is untouched. If a draw
// leaves one group empty the whole assignment is redrawn from the next
// sub-stream, so the result always passes validate_dataset.
Dataset apply_assignment(const Dataset& ds, const Assignment& mechanism, std::uint64_t seed);

// Two interleaved spiral arms at natural scale: angle t ~ Uniform[pi/4,
// 4pi], point (t cos(t + a pi), t sin(t + a pi)) for arm a. The first
// half of the units is arm 0 with (y_t, y_c) = (+1, -1), the second half
// arm 1 with (-1, +1); with probability noise_prob both potential
// outcomes are swapped. Balanced assignment.
Dataset generate_spirals(int n, double noise_prob, std::uint64_t seed);

// x ~ Uniform[0,1]^2; the first coordinate sets the outcome rates:
// x0 < 0.6 -> P(y_t=1)=0.4, P(y_c=1)=0.6; x0 in [0.6, 0.8) -> 0.3 / 0.7;
// x0 >= 0.8 -> 0.8 / 0.2. Outcomes drawn independently. Balanced.
Dataset generate_threshold_2d(int n, std::uint64_t seed);

// 30 features: 20 Normal(0,1) then 10 Uniform(-1,1). ||x|| > 3 ->
// P(y_t=1)=0.8, else 0.2; P(y_c=1)=0.2 always. Treated with probability
// 0.7 (control with 0.3).
Dataset generate_imbalanced_30(int n, std::uint64_t seed);

// 120 features: 60 Normal(0,1) then 60 Uniform(-1,1). ||x|| < 3 ->
// P(y_t=1)=0.4, P(y_c=1)=0.6; ||x|| in [3,4) -> 0.3 / 0.7; else 0.2 /
// 0.2. Balanced.
Dataset generate_highdim_120(int n, std::uint64_t seed);

struct SpiralsSpec {
  int n = 400;
  double noise_prob = 0.0;
  std::uint64_t seed = 0;
};
struct Threshold2DSpec {
  int n = 1000;
  std::uint64_t seed = 0;
};
struct Imbalanced30Spec {
  int n = 1000;
  std::uint64_t seed = 0;
};
struct HighDim120Spec {
  int n = 1000;
  std::uint64_t seed = 0;
};

struct GeneratorSpec {
  std::variant<SpiralsSpec, Threshold2DSpec, Imbalanced30Spec, HighDim120Spec> population;
  // Overrides the population's canonical mechanism (Balanced everywhere
  // except Imbalanced30's Bernoulli 0.7) when set.
  std::optional<Assignment> assignment;
};

Dataset generate(const GeneratorSpec& spec);

std::string assignment_name(const Assignment& a);

}  // namespace causalsvm
