#include "causalsvm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "causalsvm/csv.hpp"
#include "causalsvm/errors.hpp"
#include "causalsvm/evaluation.hpp"
#include "causalsvm/rng.hpp"
#include "causalsvm/weights.hpp"

namespace causalsvm {

namespace {

constexpr std::uint64_t kSplitTag = 21;

GeneratorSpec reseeded(GeneratorSpec spec, std::uint64_t seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, spec.population);
  return spec;
}

Dataset weighted_train(const Dataset& train, const MatrixConfig& cfg) {
  switch (cfg.weights) {
    case WeightMode::Constant:
      return constant_ratios(train);
    case WeightMode::Propensity:
      return ratios_from_propensity(train, fit_propensity(train, cfg.propensity_l2), cfg.clip);
    case WeightMode::Column:
      for (int j = 0; j < train.n_c; ++j)
        if (!train.control(j).ratio)
          throw std::invalid_argument(
              "run_experiment_matrix: weight mode 'column' needs a ratio on every control unit");
      return train;
  }
  throw std::invalid_argument("run_experiment_matrix: unknown weight mode");
}

std::vector<double> method_losses(const MethodSpec& method, const Dataset& train_ds,
                                  const Dataset& test, const MatrixConfig& cfg) {
  Predictor predict;
  CausalSvmModel model;  // keeps the causal model alive for the lambda
  TwoModelPredictor two;
  if (const auto* c = std::get_if<CausalConfig>(&method.method)) {
    model = train(train_ds, c->kernel, c->gamma, cfg.tol);
    predict = [&model](const Eigen::VectorXd& x) { return decision_value(model, x); };
  } else {
    two = fit_two_model(train_ds, std::get<LearnerKind>(method.method));
    predict = [&two](const Eigen::VectorXd& x) { return predict_difference(two, x); };
  }
  const auto reports = evaluate_model(predict, test, cfg.fractions);
  std::vector<double> losses;
  losses.reserve(reports.size());
  for (const auto& r : reports) losses.push_back(r.loss_percent);
  return losses;
}

void finalize(MatrixCell& cell) {
  const auto k = cell.values.size();
  if (k == 0) return;
  double sum = 0.0;
  for (double v : cell.values) sum += v;
  cell.mean = sum / static_cast<double>(k);
  if (k > 1) {
    double ss = 0.0;
    for (double v : cell.values) ss += (v - cell.mean) * (v - cell.mean);
    cell.stddev = std::sqrt(ss / static_cast<double>(k - 1));
  }
}

}  // namespace

MatrixResult run_experiment_matrix(const MatrixConfig& cfg) {
  if (cfg.seeds.empty()) throw std::invalid_argument("run_experiment_matrix: no seeds");
  if (cfg.fractions.empty()) throw std::invalid_argument("run_experiment_matrix: no fractions");
  if (cfg.methods.empty()) throw std::invalid_argument("run_experiment_matrix: no methods");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw std::invalid_argument("run_experiment_matrix: test_fraction must be in (0, 1)");

  Dataset loaded;
  if (!cfg.data_path.empty()) loaded = read_dataset_csv(cfg.data_path);

  MatrixResult result;
  result.fractions = cfg.fractions;
  for (const auto& m : cfg.methods) result.method_names.push_back(m.name);
  result.cells.assign(cfg.methods.size(), std::vector<MatrixCell>(cfg.fractions.size()));

  for (std::uint64_t seed : cfg.seeds) {
    Dataset full = cfg.data_path.empty() ? generate(reseeded(cfg.generator, seed)) : loaded;
    auto [train_raw, test] = split_train_test(full, cfg.test_fraction, mix_seed(seed, kSplitTag));
    const Dataset train_set = weighted_train(train_raw, cfg);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      try {
        const std::vector<double> losses = method_losses(cfg.methods[mi], train_set, test, cfg);
        for (std::size_t fi = 0; fi < losses.size(); ++fi)
          result.cells[mi][fi].values.push_back(losses[fi]);
      } catch (const std::exception&) {
        for (auto& cell : result.cells[mi]) ++cell.failures;
      }
    }
  }
  for (auto& row : result.cells)
    for (auto& cell : row) finalize(cell);
  return result;
}

std::string matrix_to_csv(const MatrixResult& r) {
  std::ostringstream out;
  out << "method";
  for (double f : r.fractions) out << ",l_" << format_double(f);
  out << '\n';
  char buf[64];
  for (std::size_t mi = 0; mi < r.method_names.size(); ++mi) {
    out << r.method_names[mi];
    for (const auto& cell : r.cells[mi]) {
      out << ',';
      if (cell.values.empty()) {
        out << "failed";
      } else {
        std::snprintf(buf, sizeof(buf), "%.2f(%.2f)", cell.mean, cell.stddev);
        out << buf;
        if (cell.failures > 0) out << '[' << cell.failures << " failed]";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string emit_decision_grid(const CausalSvmModel& model, double xmin, double xmax,
                               double ymin, double ymax, int resolution, double theta) {
  if (model.data.dim != 2)
    throw std::invalid_argument("emit_decision_grid: model features must be 2-D");
  if (resolution < 2) throw std::invalid_argument("emit_decision_grid: resolution must be >= 2");
  if (!(xmax > xmin) || !(ymax > ymin))
    throw std::invalid_argument("emit_decision_grid: empty plot window");

  std::ostringstream out;
  out << "x,y,h,label,kind\n";
  const double dx = (xmax - xmin) / (resolution - 1);
  const double dy = (ymax - ymin) / (resolution - 1);
  Eigen::Vector2d p;
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      p << xmin + ix * dx, ymin + iy * dy;
      const double h = decision_value(model, p);
      out << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(h) << ','
          << effect_label_name(effect_label(h, theta)) << ",grid\n";
    }
  }
  const SupportVectors sv = support_vectors(model);
  const auto emit_sv = [&](const std::vector<int>& idx, bool treat) {
    for (int i : idx) {
      const Unit& u = treat ? model.data.treatment(i) : model.data.control(i);
      const double h = decision_value(model, u.x);
      out << format_double(u.x[0]) << ',' << format_double(u.x[1]) << ',' << format_double(h)
          << ',' << effect_label_name(effect_label(h, theta)) << (treat ? ",sv_t\n" : ",sv_c\n");
    }
  };
  emit_sv(sv.treatment, true);
  emit_sv(sv.control, false);
  return out.str();
}

}  // namespace causalsvm
