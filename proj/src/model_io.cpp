#include "causalsvm/model_io.hpp"

#include <fstream>

#include "causalsvm/errors.hpp"
#include "json.hpp"

namespace causalsvm {

namespace {

using nlohmann::json;

json kernel_to_json(const KernelSpec& k) {
  json j;
  if (std::holds_alternative<LinearKernel>(k)) {
    j["type"] = "linear";
  } else if (const auto* p = std::get_if<PolynomialKernel>(&k)) {
    j["type"] = "polynomial";
    j["degree"] = p->degree;
  } else {
    j["type"] = "rbf";
    j["inv_width"] = std::get<RbfKernel>(k).inv_width;
  }
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") return LinearKernel{};
  if (type == "polynomial") return PolynomialKernel{j.at("degree").get<int>()};
  if (type == "rbf") return RbfKernel{j.at("inv_width").get<double>()};
  throw std::invalid_argument("model file: unknown kernel type '" + type + "'");
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (const auto& e : a) v[i++] = e.get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i)));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return {};
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(n, d);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    if (static_cast<Eigen::Index>(r.size()) != d)
      throw std::invalid_argument("model file: ragged feature rows");
    m.row(i++) = vector_from_json(r).transpose();
  }
  return m;
}

json dataset_to_json(const Dataset& ds) {
  json features = json::array();
  json labels = json::array();
  json groups = json::array();
  json ratios = json::array();
  for (const auto& u : ds.units) {
    features.push_back(vector_to_json(u.x));
    labels.push_back(u.y_obs);
    groups.push_back(u.group == Group::Treatment ? "T" : "C");
    if (u.ratio) {
      ratios.push_back(*u.ratio);
    } else {
      ratios.push_back(nullptr);
    }
  }
  json j;
  j["train_features"] = std::move(features);
  j["train_labels"] = std::move(labels);
  j["train_groups"] = std::move(groups);
  j["ratios"] = std::move(ratios);
  return j;
}

Dataset dataset_from_json(const json& j) {
  const auto& features = j.at("train_features");
  const auto& labels = j.at("train_labels");
  const auto& groups = j.at("train_groups");
  const auto& ratios = j.at("ratios");
  const std::size_t n = features.size();
  if (labels.size() != n || groups.size() != n || ratios.size() != n)
    throw std::invalid_argument("model file: training arrays have mismatched lengths");
  std::vector<Unit> units(n);
  for (std::size_t i = 0; i < n; ++i) {
    units[i].x = vector_from_json(features[i]);
    units[i].y_obs = labels[i].get<int>();
    const std::string g = groups[i].get<std::string>();
    if (g != "T" && g != "C")
      throw std::invalid_argument("model file: group must be 'T' or 'C'");
    units[i].group = g == "T" ? Group::Treatment : Group::Control;
    if (!ratios[i].is_null()) units[i].ratio = ratios[i].get<double>();
  }
  Dataset ds = make_dataset(std::move(units));
  require_valid(ds, "model file");
  return ds;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw io_error("cannot parse '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed writing '" + path + "'");
}

void check_version(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("format_version"))
    throw std::invalid_argument("'" + path + "' is not a model file");
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("'" + path + "' has an unsupported format_version");
}

json learner_to_json(const BaseLearner& m) {
  json j;
  switch (m.form) {
    case BaseLearner::Form::KernelExpansion:
      j["form"] = "kernel";
      j["kernel"] = kernel_to_json(m.kernel);
      j["points"] = matrix_to_json(m.points);
      j["coef"] = vector_to_json(m.coef);
      break;
    case BaseLearner::Form::Linear:
      j["form"] = "linear";
      j["weights"] = vector_to_json(m.weights);
      break;
    case BaseLearner::Form::Constant:
      j["form"] = "constant";
      break;
  }
  j["bias"] = m.bias;
  return j;
}

BaseLearner learner_from_json(const json& j) {
  BaseLearner m;
  const std::string form = j.at("form").get<std::string>();
  m.bias = j.at("bias").get<double>();
  if (form == "kernel") {
    m.form = BaseLearner::Form::KernelExpansion;
    m.kernel = kernel_from_json(j.at("kernel"));
    m.points = matrix_from_json(j.at("points"));
    m.coef = vector_from_json(j.at("coef"));
    if (m.coef.size() != m.points.rows())
      throw std::invalid_argument("model file: learner coef/points mismatch");
  } else if (form == "linear") {
    m.form = BaseLearner::Form::Linear;
    m.weights = vector_from_json(j.at("weights"));
  } else if (form == "constant") {
    m.form = BaseLearner::Form::Constant;
  } else {
    throw std::invalid_argument("model file: unknown learner form '" + form + "'");
  }
  return m;
}

json learner_kind_to_json(const LearnerKind& kind) {
  json j;
  if (const auto* s = std::get_if<SvmLearner>(&kind)) {
    j["type"] = "svm";
    j["kernel"] = kernel_to_json(s->kernel);
    j["cost"] = s->cost;
  } else if (const auto* r = std::get_if<RidgeLearner>(&kind)) {
    j["type"] = "ridge";
    j["kernel"] = kernel_to_json(r->kernel);
    j["l2"] = r->l2;
  } else {
    j["type"] = "logistic";
    j["l2"] = std::get<LogisticLearner>(kind).l2;
  }
  return j;
}

LearnerKind learner_kind_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "svm") return SvmLearner{kernel_from_json(j.at("kernel")), j.at("cost").get<double>()};
  if (type == "ridge")
    return RidgeLearner{kernel_from_json(j.at("kernel")), j.at("l2").get<double>()};
  if (type == "logistic") return LogisticLearner{j.at("l2").get<double>()};
  throw std::invalid_argument("model file: unknown learner type '" + type + "'");
}

}  // namespace

void save_model(const CausalSvmModel& m, const std::string& path) {
  json j = dataset_to_json(m.data);
  j["format_version"] = 1;
  j["kernel"] = kernel_to_json(m.kernel);
  j["gamma"] = m.gamma;
  j["w0"] = m.w0;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["lambda"] = vector_to_json(m.lambda);
  j["eta"] = vector_to_json(m.eta);
  j["objective"] = {{"primal", m.primal_objective_value},
                    {"dual", m.dual_objective_value},
                    {"gap", m.duality_gap}};
  j["intercept_provenance"] = m.intercept_provenance;
  write_json_file(j, path);
}

CausalSvmModel load_model(const std::string& path) {
  const json j = read_json_file(path);
  check_version(j, path);
  if (j.contains("two_model"))
    throw std::invalid_argument("'" + path + "' holds a two-model baseline, not a minimax model");
  CausalSvmModel m;
  m.kernel = kernel_from_json(j.at("kernel"));
  validate_kernel(m.kernel);
  m.gamma = j.at("gamma").get<double>();
  m.w0 = j.at("w0").get<double>();
  m.alpha = j.at("alpha").get<double>();
  m.beta = j.at("beta").get<double>();
  m.lambda = vector_from_json(j.at("lambda"));
  m.eta = vector_from_json(j.at("eta"));
  m.data = dataset_from_json(j);
  const auto& obj = j.at("objective");
  m.primal_objective_value = obj.at("primal").get<double>();
  m.dual_objective_value = obj.at("dual").get<double>();
  m.duality_gap = obj.at("gap").get<double>();
  if (j.contains("intercept_provenance"))
    m.intercept_provenance = j.at("intercept_provenance").get<std::string>();
  if (m.lambda.size() != m.data.n_t || m.eta.size() != m.data.n_c)
    throw std::invalid_argument("'" + path + "': multiplier lengths do not match the data");
  return m;
}

void save_two_model(const TwoModelPredictor& p, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["two_model"] = {{"learner", learner_kind_to_json(p.kind)},
                    {"model_t", learner_to_json(p.model_t)},
                    {"model_c", learner_to_json(p.model_c)}};
  write_json_file(j, path);
}

TwoModelPredictor load_two_model(const std::string& path) {
  const json j = read_json_file(path);
  check_version(j, path);
  if (!j.contains("two_model"))
    throw std::invalid_argument("'" + path + "' is not a two-model baseline file");
  const auto& w = j.at("two_model");
  TwoModelPredictor p;
  p.kind = learner_kind_from_json(w.at("learner"));
  p.model_t = learner_from_json(w.at("model_t"));
  p.model_c = learner_from_json(w.at("model_c"));
  return p;
}

AnyModel load_any_model(const std::string& path) {
  const json j = read_json_file(path);
  check_version(j, path);
  if (j.contains("two_model")) return load_two_model(path);
  return load_model(path);
}

double any_decision_value(const AnyModel& m, const Eigen::VectorXd& x) {
  if (const auto* c = std::get_if<CausalSvmModel>(&m)) return decision_value(*c, x);
  return predict_difference(std::get<TwoModelPredictor>(m), x);
}

}  // namespace causalsvm
