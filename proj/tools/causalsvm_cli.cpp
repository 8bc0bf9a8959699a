#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causalsvm/bounds.hpp"
#include "causalsvm/csv.hpp"
#include "causalsvm/cv.hpp"
#include "causalsvm/errors.hpp"
#include "causalsvm/evaluation.hpp"
#include "causalsvm/experiment.hpp"
#include "causalsvm/model_io.hpp"
#include "causalsvm/rng.hpp"
#include "causalsvm/weights.hpp"
#include "json.hpp"

namespace {

using namespace causalsvm;
using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("failed writing '" + path + "'");
}

void write_json_file(const json& j, const std::string& path) {
  write_text_file(path, j.dump(2) + "\n");
}

// Reproducibility record written next to every output.
void write_manifest(const std::string& out_path, const std::string& command, json config,
                    std::vector<std::string> outputs) {
  json m;
  m["format_version"] = 1;
  m["command"] = command;
  m["config"] = std::move(config);
  m["rng"] = kRngId;
  m["outputs"] = std::move(outputs);
  write_json_file(m, out_path + ".manifest.json");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, what));
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split_list(s)) {
    try {
      out.push_back(std::stoull(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("--seeds: '" + tok + "' is not an integer");
    }
  }
  if (out.empty()) throw std::invalid_argument("--seeds: empty list");
  return out;
}

KernelSpec parse_kernel(const std::string& name, double inv_width) {
  if (name == "linear") return LinearKernel{};
  if (name == "poly2") return PolynomialKernel{2};
  if (name == "poly3") return PolynomialKernel{3};
  if (name == "rbf") return RbfKernel{inv_width};
  throw std::invalid_argument("--kernel must be one of linear, poly2, poly3, rbf");
}

// Grid tokens also allow an explicit rbf width: rbf:0.05.
KernelSpec parse_kernel_token(const std::string& tok) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos) return parse_kernel(tok, 0.1);
  const std::string head = tok.substr(0, colon);
  if (head != "rbf")
    throw std::invalid_argument("--kernels: only rbf takes a parameter, got '" + tok + "'");
  return RbfKernel{parse_double(tok.substr(colon + 1), "--kernels rbf width")};
}

SurrogateLoss parse_loss(const std::string& name) {
  if (name == "double_indicator") return SurrogateLoss::DoubleIndicator;
  if (name == "hinge") return SurrogateLoss::Hinge;
  if (name == "squared") return SurrogateLoss::Squared;
  if (name == "scaled_logistic") return SurrogateLoss::ScaledLogistic;
  if (name == "exponential") return SurrogateLoss::Exponential;
  throw std::invalid_argument(
      "--loss must be one of double_indicator, hinge, squared, scaled_logistic, exponential");
}

Assignment parse_assignment(const std::string& s) {
  if (s == "balanced") return Balanced{};
  const auto parts = split_list(s);
  std::vector<std::string> fields;
  {
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ':')) fields.push_back(item);
  }
  if (fields.size() == 2 && fields[0] == "bernoulli")
    return BernoulliP{parse_double(fields[1], "--assignment bernoulli p")};
  if (fields.size() == 3 && fields[0] == "sigmoid") {
    CovariateSigmoid cs;
    cs.scale = parse_double(fields[1], "--assignment sigmoid scale");
    try {
      cs.feature_index = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("--assignment sigmoid feature index must be an integer");
    }
    return cs;
  }
  throw std::invalid_argument(
      "--assignment must be balanced, bernoulli:<p>, or sigmoid:<scale>:<feature>");
}

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "constant") return WeightMode::Constant;
  if (s == "propensity") return WeightMode::Propensity;
  if (s == "column") return WeightMode::Column;
  throw std::invalid_argument("--weights must be constant, propensity, or column");
}

Dataset apply_weight_mode(const Dataset& ds, WeightMode mode, double clip, double l2) {
  switch (mode) {
    case WeightMode::Constant:
      return constant_ratios(ds);
    case WeightMode::Propensity:
      return ratios_from_propensity(ds, fit_propensity(ds, l2), clip);
    case WeightMode::Column:
      for (int j = 0; j < ds.n_c; ++j)
        if (!ds.control(j).ratio)
          throw std::invalid_argument(
              "weight mode 'column' needs a ratio value on every control unit");
      return ds;
  }
  throw std::invalid_argument("unknown weight mode");
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  std::string generator;
  int n = 400;
  double noise_prob = 0.0;
  std::uint64_t seed = 0;
  std::string assignment;
  std::string out;
};

void run_generate(const GenerateArgs& a) {
  GeneratorSpec spec;
  if (a.generator == "spirals") {
    spec.population = SpiralsSpec{a.n, a.noise_prob, a.seed};
  } else if (a.generator == "threshold2d") {
    spec.population = Threshold2DSpec{a.n, a.seed};
  } else if (a.generator == "imbalanced30") {
    spec.population = Imbalanced30Spec{a.n, a.seed};
  } else if (a.generator == "highdim120") {
    spec.population = HighDim120Spec{a.n, a.seed};
  } else {
    throw std::invalid_argument(
        "--generator must be spirals, threshold2d, imbalanced30, or highdim120");
  }
  if (!a.assignment.empty()) spec.assignment = parse_assignment(a.assignment);

  const Dataset ds = generate(spec);
  write_dataset_csv(ds, a.out);

  json meta;
  meta["format_version"] = 1;
  for (const auto& [k, v] : ds.meta) meta[k] = v;
  write_json_file(meta, a.out + ".meta.json");

  json cfg{{"generator", a.generator}, {"n", a.n},       {"noise_prob", a.noise_prob},
           {"seed", a.seed},           {"out", a.out},   {"assignment", a.assignment}};
  write_manifest(a.out, "generate", cfg, {a.out, a.out + ".meta.json"});
  std::cout << "wrote " << ds.n() << " units (" << ds.n_t << " treated, " << ds.n_c
            << " control) to " << a.out << "\n";
}

// ---- weights -----------------------------------------------------------

struct WeightsArgs {
  std::string data;
  std::string mode = "constant";
  double clip = 20.0;
  double l2 = 1e-4;
  std::string out;
};

void run_weights(const WeightsArgs& a) {
  const Dataset ds = read_dataset_csv(a.data);
  require_valid(ds, "weights");
  const WeightMode mode = parse_weight_mode(a.mode);
  if (!(a.clip >= 1.0)) throw std::invalid_argument("--clip must be >= 1");
  Dataset out = apply_weight_mode(ds, mode, a.clip, a.l2);
  if (mode == WeightMode::Propensity) {
    const PropensityModel pm = fit_propensity(ds, a.l2);
    std::cout << "propensity fit: " << (pm.converged ? "converged" : "did not converge")
              << " after " << pm.iterations << " iterations\n";
  }
  write_dataset_csv(out, a.out);
  json cfg{{"data", a.data}, {"weights", a.mode}, {"clip", a.clip}, {"l2", a.l2}, {"out", a.out}};
  write_manifest(a.out, "weights", cfg, {a.out});
  std::cout << "wrote " << a.out << "\n";
}

// ---- train -------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string kernel = "rbf";
  double inv_width = 0.1;
  double gamma = 1e-8;
  double tol = 1e-8;
  std::string out;
};

void run_train(const TrainArgs& a) {
  const Dataset ds = read_dataset_csv(a.data);
  const KernelSpec kernel = parse_kernel(a.kernel, a.inv_width);
  const CausalSvmModel model = train(ds, kernel, a.gamma, a.tol);
  save_model(model, a.out);
  const SupportVectors sv = support_vectors(model);
  json cfg{{"data", a.data},   {"kernel", a.kernel}, {"inv_width", a.inv_width},
           {"gamma", a.gamma}, {"tol", a.tol},       {"out", a.out}};
  write_manifest(a.out, "train", cfg, {a.out});
  std::cout << "trained " << kernel_name(kernel) << " gamma " << format_double(a.gamma)
            << ": primal " << format_double(model.primal_objective_value) << ", dual "
            << format_double(model.dual_objective_value) << ", gap "
            << format_double(model.duality_gap) << ", w0 " << format_double(model.w0) << " ("
            << model.intercept_provenance << "), support vectors " << sv.treatment.size()
            << "T/" << sv.control.size() << "C\n";
}

// ---- predict -----------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  double theta = 1.0;
  std::string out;
};

void run_predict(const PredictArgs& a) {
  const AnyModel model = load_any_model(a.model);
  const Eigen::MatrixXd X = read_features_csv(a.data);
  std::ostringstream csv;
  csv << "h,label\n";
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double h = any_decision_value(model, X.row(i));
    csv << format_double(h) << ',' << effect_label_name(effect_label(h, a.theta)) << '\n';
  }
  write_text_file(a.out, csv.str());
  json cfg{{"model", a.model}, {"data", a.data}, {"theta", a.theta}, {"out", a.out}};
  write_manifest(a.out, "predict", cfg, {a.out});
  std::cout << "wrote " << X.rows() << " predictions to " << a.out << "\n";
}

// ---- evaluate ----------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string fractions = "0.01,0.1";
  std::string out;
};

void run_evaluate(const EvaluateArgs& a) {
  const AnyModel model = load_any_model(a.model);
  const Dataset test = read_dataset_csv(a.data);
  const std::vector<double> fractions = parse_double_list(a.fractions, "--fractions");
  const auto reports = evaluate_model(
      [&model](const Eigen::VectorXd& x) { return any_decision_value(model, x); }, test,
      fractions);
  write_text_file(a.out, reports_to_csv(reports));
  json cfg{{"model", a.model}, {"data", a.data}, {"fractions", a.fractions}, {"out", a.out}};
  write_manifest(a.out, "evaluate", cfg, {a.out});
  for (const auto& r : reports)
    std::cout << "fraction " << format_double(r.fraction_neutral) << ": loss "
              << format_double(r.loss_percent) << "%\n";
}

// ---- matrix ------------------------------------------------------------

struct MatrixArgs {
  std::string generator = "spirals";
  int n = 800;
  double noise_prob = 0.0;
  std::string assignment;
  std::string data;
  std::string seeds = "1,2,3,4,5,6,7,8,9,10";
  double test_fraction = 0.5;
  std::string kernel = "rbf";
  double inv_width = 0.1;
  double gamma = 1e-8;
  std::string baselines;
  std::string fractions = "0.01,0.1";
  std::string weights = "constant";
  double clip = 20.0;
  double tol = 1e-8;
  std::string out;
};

void run_matrix(const MatrixArgs& a) {
  MatrixConfig cfg;
  if (a.data.empty()) {
    GenerateArgs g;
    g.generator = a.generator;
    g.n = a.n;
    g.noise_prob = a.noise_prob;
    if (a.generator == "spirals") {
      cfg.generator.population = SpiralsSpec{a.n, a.noise_prob, 0};
    } else if (a.generator == "threshold2d") {
      cfg.generator.population = Threshold2DSpec{a.n, 0};
    } else if (a.generator == "imbalanced30") {
      cfg.generator.population = Imbalanced30Spec{a.n, 0};
    } else if (a.generator == "highdim120") {
      cfg.generator.population = HighDim120Spec{a.n, 0};
    } else {
      throw std::invalid_argument(
          "--generator must be spirals, threshold2d, imbalanced30, or highdim120");
    }
    if (!a.assignment.empty()) cfg.generator.assignment = parse_assignment(a.assignment);
  } else {
    cfg.data_path = a.data;
  }
  cfg.test_fraction = a.test_fraction;
  cfg.seeds = parse_seed_list(a.seeds);
  cfg.fractions = parse_double_list(a.fractions, "--fractions");
  cfg.weights = parse_weight_mode(a.weights);
  cfg.clip = a.clip;
  cfg.tol = a.tol;

  const KernelSpec kernel = parse_kernel(a.kernel, a.inv_width);
  cfg.methods.push_back({"causal(" + kernel_name(kernel) + "," + format_double(a.gamma) + ")",
                         CausalConfig{kernel, a.gamma}});
  for (const auto& tok : split_list(a.baselines)) {
    if (tok == "2svm") {
      cfg.methods.push_back(
          {"2svm(" + kernel_name(kernel) + ")", SvmLearner{kernel, 1.0 / (2.0 * a.gamma)}});
    } else if (tok == "2ridge") {
      cfg.methods.push_back({"2ridge(" + kernel_name(kernel) + ")", RidgeLearner{kernel, 1e-6}});
    } else if (tok == "2logistic") {
      cfg.methods.push_back({"2logistic", LogisticLearner{}});
    } else {
      throw std::invalid_argument("--baselines tokens must be 2svm, 2ridge, or 2logistic");
    }
  }

  const MatrixResult result = run_experiment_matrix(cfg);
  const std::string csv = matrix_to_csv(result);
  write_text_file(a.out, csv);
  json jc{{"generator", a.generator},
          {"n", a.n},
          {"noise_prob", a.noise_prob},
          {"assignment", a.assignment},
          {"data", a.data},
          {"seeds", a.seeds},
          {"test_fraction", a.test_fraction},
          {"kernel", a.kernel},
          {"inv_width", a.inv_width},
          {"gamma", a.gamma},
          {"baselines", a.baselines},
          {"fractions", a.fractions},
          {"weights", a.weights},
          {"clip", a.clip},
          {"tol", a.tol},
          {"out", a.out}};
  write_manifest(a.out, "matrix", jc, {a.out});
  std::cout << csv;
}

// ---- cv ----------------------------------------------------------------

struct CvArgs {
  std::string data;
  std::string kernels = "linear,poly2,poly3,rbf:0.05,rbf:0.1";
  std::string gammas = "1e-8,1e-6,1e-4";
  int folds = 5;
  std::uint64_t seed = 0;
  std::string loss = "hinge";
  std::string out;
};

void run_cv(const CvArgs& a) {
  const Dataset ds = read_dataset_csv(a.data);
  CvGrid grid;
  for (const auto& tok : split_list(a.kernels)) grid.kernels.push_back(parse_kernel_token(tok));
  grid.gammas = parse_double_list(a.gammas, "--gammas");
  grid.folds = a.folds;
  grid.seed = a.seed;
  const CvResult result = nested_cv_select(ds, grid, parse_loss(a.loss));
  write_text_file(a.out, cv_scores_to_csv(result));
  json cfg{{"data", a.data}, {"kernels", a.kernels}, {"gammas", a.gammas}, {"folds", a.folds},
           {"seed", a.seed}, {"loss", a.loss},       {"out", a.out}};
  write_manifest(a.out, "cv", cfg, {a.out});
  std::cout << "selected " << kernel_name(result.best_kernel) << " gamma "
            << format_double(result.best_gamma) << " (score "
            << format_double(result.best_score) << ")\n";
}

// ---- bound -------------------------------------------------------------

struct BoundArgs {
  int n_t = 0;
  int n_c = 0;
  double delta = 0.05;
  int pdim = 1;
  double growth_log = -1.0;
  int sauer_d = 0;
  double d2 = 0.0;
  std::string data;
  double cap = 1.0;
  double r_hat_t = 0.0;
  double r_hat_c = 0.0;
  std::string out;
};

void run_bound(const BoundArgs& a) {
  BoundInputs in;
  in.n_t = a.n_t;
  in.n_c = a.n_c;
  in.delta = a.delta;
  in.pdim = a.pdim;
  in.M = a.cap;
  if (a.growth_log >= 0.0 && a.sauer_d > 0)
    throw std::invalid_argument("give either --growth-log or --sauer-d, not both");
  if (a.sauer_d > 0) {
    in.growth_log = sauer_growth_log(a.sauer_d, 2 * a.n_t);
  } else if (a.growth_log >= 0.0) {
    in.growth_log = a.growth_log;
  } else {
    throw std::invalid_argument("one of --growth-log or --sauer-d is required");
  }
  if (a.d2 > 0.0 && !a.data.empty())
    throw std::invalid_argument("give either --d2 or --data, not both");
  if (!a.data.empty()) {
    const Dataset ds = read_dataset_csv(a.data);
    require_valid(ds, "bound");
    Eigen::MatrixXd xt(ds.n_t, ds.dim), xc(ds.n_c, ds.dim);
    for (int i = 0; i < ds.n_t; ++i) xt.row(i) = ds.treatment(i).x.transpose();
    for (int j = 0; j < ds.n_c; ++j) xc.row(j) = ds.control(j).x.transpose();
    in.d2 = estimate_d2(xt, xc);
  } else if (a.d2 > 0.0) {
    in.d2 = a.d2;
  } else {
    throw std::invalid_argument("one of --d2 or --data is required");
  }

  const double dt = delta_t(in.n_t, in.delta / 2.0, in.growth_log);
  const double dc = delta_c(in.n_c, in.delta / 2.0, in.pdim, in.d2);
  const double bound = generalization_bound(a.r_hat_t, a.r_hat_c, in);
  json rec{{"format_version", 1},
           {"n_t", in.n_t},
           {"n_c", in.n_c},
           {"delta", in.delta},
           {"pdim", in.pdim},
           {"growth_log", in.growth_log},
           {"d2", in.d2},
           {"M", in.M},
           {"r_hat_t", a.r_hat_t},
           {"r_hat_c", a.r_hat_c},
           {"delta_t", dt},
           {"delta_c", dc},
           {"bound", bound}};
  write_json_file(rec, a.out);
  json cfg{{"n_t", a.n_t},           {"n_c", a.n_c}, {"delta", a.delta},
           {"pdim", a.pdim},         {"growth_log", a.growth_log}, {"sauer_d", a.sauer_d},
           {"d2", a.d2},             {"data", a.data},             {"M", a.cap},
           {"r_hat_t", a.r_hat_t},   {"r_hat_c", a.r_hat_c},       {"out", a.out}};
  write_manifest(a.out, "bound", cfg, {a.out});
  std::cout << rec.dump(2) << "\n";
}

// ---- grid --------------------------------------------------------------

struct GridArgs {
  std::string model;
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  int resolution = 100;
  double theta = 1.0;
  std::string out;
};

void run_grid(const GridArgs& a) {
  const CausalSvmModel model = load_model(a.model);
  const std::string csv =
      emit_decision_grid(model, a.xmin, a.xmax, a.ymin, a.ymax, a.resolution, a.theta);
  write_text_file(a.out, csv);
  json cfg{{"model", a.model}, {"xmin", a.xmin},           {"xmax", a.xmax},
           {"ymin", a.ymin},   {"ymax", a.ymax},           {"resolution", a.resolution},
           {"theta", a.theta}, {"out", a.out}};
  write_manifest(a.out, "grid", cfg, {a.out});
  std::cout << "wrote " << a.resolution << "x" << a.resolution << " grid to " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimax effect-sign estimation toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "synthesize a benchmark dataset CSV");
  c_gen->add_option("--generator", gen.generator,
                    "spirals | threshold2d | imbalanced30 | highdim120")->required();
  c_gen->add_option("--n", gen.n, "number of units");
  c_gen->add_option("--noise-prob", gen.noise_prob, "spirals effect-flip probability");
  c_gen->add_option("--seed", gen.seed, "generator seed");
  c_gen->add_option("--assignment", gen.assignment,
                    "balanced | bernoulli:<p> | sigmoid:<scale>:<feature>");
  c_gen->add_option("--out", gen.out, "output CSV path")->required();
  c_gen->callback([&gen] { run_generate(gen); });

  WeightsArgs wts;
  auto* c_wts = app.add_subcommand("weights", "fill density-ratio weights on control units");
  c_wts->add_option("--data", wts.data, "input dataset CSV")->required();
  c_wts->add_option("--weights", wts.mode, "constant | propensity | column");
  c_wts->add_option("--clip", wts.clip, "ratio clip bound");
  c_wts->add_option("--l2", wts.l2, "propensity regularization");
  c_wts->add_option("--out", wts.out, "output CSV path")->required();
  c_wts->callback([&wts] { run_weights(wts); });

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "fit the minimax effect-sign model");
  c_tr->add_option("--data", tr.data, "training CSV with ratios")->required();
  c_tr->add_option("--kernel", tr.kernel, "linear | poly2 | poly3 | rbf");
  c_tr->add_option("--inv-width", tr.inv_width, "rbf inverse width");
  c_tr->add_option("--gamma", tr.gamma, "regularization weight");
  c_tr->add_option("--tol", tr.tol, "solver tolerance");
  c_tr->add_option("--out", tr.out, "output model JSON path")->required();
  c_tr->callback([&tr] { run_train(tr); });

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "score new points with a saved model");
  c_pr->add_option("--model", pr.model, "model JSON path")->required();
  c_pr->add_option("--data", pr.data, "feature CSV")->required();
  c_pr->add_option("--theta", pr.theta, "neutral band half-width");
  c_pr->add_option("--out", pr.out, "output CSV path")->required();
  c_pr->callback([&pr] { run_predict(pr); });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "ground-truth losses on a test CSV");
  c_ev->add_option("--model", ev.model, "model JSON path")->required();
  c_ev->add_option("--data", ev.data, "test CSV with potential outcomes")->required();
  c_ev->add_option("--fractions", ev.fractions, "comma list of neutral fractions");
  c_ev->add_option("--out", ev.out, "output CSV path")->required();
  c_ev->callback([&ev] { run_evaluate(ev); });

  MatrixArgs mx;
  auto* c_mx = app.add_subcommand("matrix", "multi-seed experiment table");
  c_mx->add_option("--generator", mx.generator, "spirals | threshold2d | imbalanced30 | highdim120");
  c_mx->add_option("--n", mx.n, "units per generated dataset");
  c_mx->add_option("--noise-prob", mx.noise_prob, "spirals effect-flip probability");
  c_mx->add_option("--assignment", mx.assignment, "assignment mechanism override");
  c_mx->add_option("--data", mx.data, "fixed dataset CSV instead of a generator");
  c_mx->add_option("--seeds", mx.seeds, "comma list of seeds");
  c_mx->add_option("--test-fraction", mx.test_fraction, "held-out fraction per seed");
  c_mx->add_option("--kernel", mx.kernel, "causal model kernel");
  c_mx->add_option("--inv-width", mx.inv_width, "rbf inverse width");
  c_mx->add_option("--gamma", mx.gamma, "causal model regularization");
  c_mx->add_option("--baselines", mx.baselines, "comma list from 2svm, 2ridge, 2logistic");
  c_mx->add_option("--fractions", mx.fractions, "comma list of neutral fractions");
  c_mx->add_option("--weights", mx.weights, "constant | propensity | column");
  c_mx->add_option("--clip", mx.clip, "ratio clip bound");
  c_mx->add_option("--tol", mx.tol, "solver tolerance");
  c_mx->add_option("--out", mx.out, "output CSV path")->required();
  c_mx->callback([&mx] { run_matrix(mx); });

  CvArgs cv;
  auto* c_cv = app.add_subcommand("cv", "stratified k-fold hyperparameter selection");
  c_cv->add_option("--data", cv.data, "training CSV with ratios")->required();
  c_cv->add_option("--kernels", cv.kernels, "comma list, e.g. linear,poly2,rbf:0.1");
  c_cv->add_option("--gammas", cv.gammas, "comma list of regularization weights");
  c_cv->add_option("--folds", cv.folds, "fold count");
  c_cv->add_option("--seed", cv.seed, "fold shuffle seed");
  c_cv->add_option("--loss", cv.loss, "surrogate used for scoring");
  c_cv->add_option("--out", cv.out, "output score CSV path")->required();
  c_cv->callback([&cv] { run_cv(cv); });

  BoundArgs bd;
  auto* c_bd = app.add_subcommand("bound", "finite-sample deviation bound");
  c_bd->add_option("--n-t", bd.n_t, "treatment sample size")->required();
  c_bd->add_option("--n-c", bd.n_c, "control sample size")->required();
  c_bd->add_option("--delta", bd.delta, "failure probability");
  c_bd->add_option("--pdim", bd.pdim, "pseudo-dimension of the class");
  c_bd->add_option("--growth-log", bd.growth_log, "log growth function at 2 n_t");
  c_bd->add_option("--sauer-d", bd.sauer_d, "derive growth via a capacity dimension");
  c_bd->add_option("--d2", bd.d2, "exponentiated KL divergence");
  c_bd->add_option("--data", bd.data, "estimate d2 from this dataset CSV");
  c_bd->add_option("--M", bd.cap, "surrogate sup used to rescale");
  c_bd->add_option("--r-hat-t", bd.r_hat_t, "rescaled treatment empirical risk");
  c_bd->add_option("--r-hat-c", bd.r_hat_c, "rescaled control empirical risk");
  c_bd->add_option("--out", bd.out, "output JSON path")->required();
  c_bd->callback([&bd] { run_bound(bd); });

  GridArgs gr;
  auto* c_gr = app.add_subcommand("grid", "decision-surface lattice for plotting");
  c_gr->add_option("--model", gr.model, "model JSON path")->required();
  c_gr->add_option("--xmin", gr.xmin, "window");
  c_gr->add_option("--xmax", gr.xmax, "window");
  c_gr->add_option("--ymin", gr.ymin, "window");
  c_gr->add_option("--ymax", gr.ymax, "window");
  c_gr->add_option("--resolution", gr.resolution, "lattice points per axis");
  c_gr->add_option("--theta", gr.theta, "neutral band half-width");
  c_gr->add_option("--out", gr.out, "output CSV path")->required();
  c_gr->callback([&gr] { run_grid(gr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
