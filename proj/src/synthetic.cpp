#include "causalsvm/synthetic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/csv.hpp"
#include "causalsvm/rng.hpp"

namespace causalsvm {

namespace {

constexpr std::uint64_t kPopulationTag = 1;
constexpr std::uint64_t kAssignmentTag = 2;

double treat_probability(const Assignment& a, const Eigen::VectorXd& x) {
  if (std::holds_alternative<Balanced>(a)) return 0.5;
  if (const auto* b = std::get_if<BernoulliP>(&a)) return b->p;
  const auto& s = std::get<CovariateSigmoid>(a);
  const double e = std::exp(-x[s.feature_index] * x[s.feature_index]);
  return s.scale * (1.0 - e) / (1.0 + e);
}

void validate_assignment(const Assignment& a, int dim) {
  if (const auto* b = std::get_if<BernoulliP>(&a)) {
    if (!(b->p > 0.0 && b->p < 1.0))
      throw std::invalid_argument("apply_assignment: p must be in (0, 1)");
  } else if (const auto* s = std::get_if<CovariateSigmoid>(&a)) {
    if (!(s->scale > 0.0 && s->scale <= 1.0))
      throw std::invalid_argument("apply_assignment: scale must be in (0, 1]");
    if (s->feature_index < 0 || s->feature_index >= dim)
      throw std::invalid_argument("apply_assignment: feature_index out of range");
  }
}

int sign_from(bool positive) { return positive ? 1 : -1; }

Dataset finish_population(std::vector<Unit> units, std::map<std::string, std::string> meta,
                          const Assignment& mech, std::uint64_t seed) {
  Dataset pop;
  pop.units = std::move(units);
  pop.n_t = 0;
  pop.n_c = static_cast<int>(pop.units.size());
  pop.dim = pop.units.empty() ? 0 : static_cast<int>(pop.units.front().x.size());
  pop.meta = std::move(meta);
  for (auto& u : pop.units) {
    u.group = Group::Control;  // placeholder until assignment
    u.y_obs = u.y_c.value();
  }
  return apply_assignment(pop, mech, seed);
}

}  // namespace

std::string assignment_name(const Assignment& a) {
  if (std::holds_alternative<Balanced>(a)) return "balanced";
  std::ostringstream out;
  if (const auto* b = std::get_if<BernoulliP>(&a)) {
    out << "bernoulli(" << format_double(b->p) << ")";
  } else {
    const auto& s = std::get<CovariateSigmoid>(a);
    out << "sigmoid(" << format_double(s.scale) << ",f" << s.feature_index << ")";
  }
  return out.str();
}

Dataset apply_assignment(const Dataset& ds, const Assignment& mechanism, std::uint64_t seed) {
  if (ds.units.empty()) throw std::invalid_argument("apply_assignment: empty dataset");
  validate_assignment(mechanism, ds.dim);
  for (const auto& u : ds.units)
    if (!u.y_t || !u.y_c)
      throw std::invalid_argument("apply_assignment: potential outcomes required");

  Dataset out = ds;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(mix_seed(mix_seed(seed, kAssignmentTag), attempt));
    int nt = 0;
    for (auto& u : out.units) {
      const bool treated = rng.bernoulli(treat_probability(mechanism, u.x));
      u.group = treated ? Group::Treatment : Group::Control;
      u.y_obs = treated ? *u.y_t : *u.y_c;
      nt += treated ? 1 : 0;
    }
    if (nt > 0 && nt < static_cast<int>(out.units.size())) break;
  }
  canonicalize(out);
  out.meta["assignment"] = assignment_name(mechanism);
  out.meta["assignment_seed"] = std::to_string(seed);
  out.meta["rng"] = kRngId;
  return out;
}

Dataset generate_spirals(int n, double noise_prob, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("generate_spirals: n must be >= 4");
  if (n % 2 != 0) throw std::invalid_argument("generate_spirals: n must be even");
  if (!(noise_prob >= 0.0 && noise_prob < 1.0))
    throw std::invalid_argument("generate_spirals: noise_prob must be in [0, 1)");

  Rng rng(mix_seed(seed, kPopulationTag));
  const double pi = std::acos(-1.0);
  // Radius = 0.6 * angle. The rbf(0.1) length scale sqrt(10) then spans a
  // couple dozen in-arm neighbors at n = 400, so modest label noise gets
  // outvoted during training instead of memorized.
  const double scale = 0.6;
  std::vector<Unit> units(n);
  for (int i = 0; i < n; ++i) {
    const int arm = i < n / 2 ? 0 : 1;
    const double t = rng.uniform(pi / 4.0, 4.0 * pi);
    const double phase = t + arm * pi;
    Unit& u = units[i];
    u.x = Eigen::Vector2d(scale * t * std::cos(phase), scale * t * std::sin(phase));
    int y_t = arm == 0 ? 1 : -1;
    if (rng.bernoulli(noise_prob)) y_t = -y_t;
    u.y_t = y_t;
    u.y_c = -y_t;
  }
  std::map<std::string, std::string> meta{{"generator", "spirals"},
                                          {"n", std::to_string(n)},
                                          {"noise_prob", format_double(noise_prob)},
                                          {"seed", std::to_string(seed)}};
  return finish_population(std::move(units), std::move(meta), Balanced{}, seed);
}

Dataset generate_threshold_2d(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_threshold_2d: n must be >= 1");
  Rng rng(mix_seed(seed, kPopulationTag));
  std::vector<Unit> units(n);
  for (int i = 0; i < n; ++i) {
    Unit& u = units[i];
    u.x = Eigen::Vector2d(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
    double pt, pc;
    if (u.x[0] < 0.6) {
      pt = 0.4;
      pc = 0.6;
    } else if (u.x[0] < 0.8) {
      pt = 0.3;
      pc = 0.7;
    } else {
      pt = 0.8;
      pc = 0.2;
    }
    u.y_t = sign_from(rng.bernoulli(pt));
    u.y_c = sign_from(rng.bernoulli(pc));
  }
  std::map<std::string, std::string> meta{{"generator", "threshold2d"},
                                          {"n", std::to_string(n)},
                                          {"seed", std::to_string(seed)}};
  return finish_population(std::move(units), std::move(meta), Balanced{}, seed);
}

namespace {

Dataset generate_norm_regions(int n, std::uint64_t seed, int n_normal, int n_uniform,
                              const char* name, const Assignment& mech,
                              double (*pt)(double), double (*pc)(double)) {
  if (n < 1) throw std::invalid_argument(std::string(name) + ": n must be >= 1");
  Rng rng(mix_seed(seed, kPopulationTag));
  const int d = n_normal + n_uniform;
  std::vector<Unit> units(n);
  for (int i = 0; i < n; ++i) {
    Unit& u = units[i];
    u.x = Eigen::VectorXd(d);
    for (int k = 0; k < n_normal; ++k) u.x[k] = rng.normal();
    for (int k = n_normal; k < d; ++k) u.x[k] = rng.uniform(-1.0, 1.0);
    const double r = u.x.norm();
    u.y_t = sign_from(rng.bernoulli(pt(r)));
    u.y_c = sign_from(rng.bernoulli(pc(r)));
  }
  std::map<std::string, std::string> meta{
      {"generator", name}, {"n", std::to_string(n)}, {"seed", std::to_string(seed)}};
  return finish_population(std::move(units), std::move(meta), mech, seed);
}

}  // namespace

Dataset generate_imbalanced_30(int n, std::uint64_t seed) {
  return generate_norm_regions(
      n, seed, 20, 10, "imbalanced30", BernoulliP{0.7},
      [](double r) { return r > 3.0 ? 0.8 : 0.2; }, [](double) { return 0.2; });
}

Dataset generate_highdim_120(int n, std::uint64_t seed) {
  return generate_norm_regions(
      n, seed, 60, 60, "highdim120", Balanced{},
      [](double r) { return r < 3.0 ? 0.4 : (r < 4.0 ? 0.3 : 0.2); },
      [](double r) { return r < 3.0 ? 0.6 : (r < 4.0 ? 0.7 : 0.2); });
}

Dataset generate(const GeneratorSpec& spec) {
  Dataset ds;
  Assignment canonical = Balanced{};
  std::uint64_t seed = 0;
  if (const auto* s = std::get_if<SpiralsSpec>(&spec.population)) {
    ds = generate_spirals(s->n, s->noise_prob, s->seed);
    seed = s->seed;
  } else if (const auto* s = std::get_if<Threshold2DSpec>(&spec.population)) {
    ds = generate_threshold_2d(s->n, s->seed);
    seed = s->seed;
  } else if (const auto* s = std::get_if<Imbalanced30Spec>(&spec.population)) {
    ds = generate_imbalanced_30(s->n, s->seed);
    canonical = BernoulliP{0.7};
    seed = s->seed;
  } else {
    const auto& h = std::get<HighDim120Spec>(spec.population);
    ds = generate_highdim_120(h.n, h.seed);
    seed = h.seed;
  }
  if (spec.assignment && assignment_name(*spec.assignment) != assignment_name(canonical))
    ds = apply_assignment(ds, *spec.assignment, seed);
  return ds;
}

}  // namespace causalsvm
