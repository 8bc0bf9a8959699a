#include "causalsvm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/csv.hpp"

namespace causalsvm {

namespace {

void check_label(int y, const char* who) {
  if (y != 1 && y != -1) throw std::invalid_argument(std::string(who) + ": labels must be -1 or 1");
}

}  // namespace

int pointwise_loss(PointwiseKind kind, double h, int y_t, int y_c, double theta) {
  check_label(y_t, "pointwise_loss");
  check_label(y_c, "pointwise_loss");
  if (std::isnan(h)) throw std::invalid_argument("pointwise_loss: h is NaN");
  const double margin = kind == PointwiseKind::LTheta ? theta : 1.0;
  if (kind == PointwiseKind::LTheta && !(theta > 0.0))
    throw std::invalid_argument("pointwise_loss: theta must be positive");

  if (y_t == y_c) return std::abs(h) >= margin ? 1 : 0;
  if (y_t > y_c) {  // true positive effect; penalize a confident negative
    if (kind == PointwiseKind::L01) return h <= 0.0 ? 1 : 0;
    return h <= -margin ? 1 : 0;
  }
  // true negative effect; penalize a confident positive
  if (kind == PointwiseKind::L01) return h >= 0.0 ? 1 : 0;
  return h >= margin ? 1 : 0;
}

EvaluationReport quantile_neutral_loss(const std::vector<double>& h_values,
                                       const std::vector<TruthPair>& truths, double fraction) {
  const std::size_t n = h_values.size();
  if (n == 0) throw std::invalid_argument("quantile_neutral_loss: empty input");
  if (truths.size() != n)
    throw std::invalid_argument("quantile_neutral_loss: h_values and truths lengths differ");
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("quantile_neutral_loss: fraction must be in [0, 1)");
  for (double h : h_values)
    if (std::isnan(h)) throw std::invalid_argument("quantile_neutral_loss: NaN in h_values");
  for (const auto& t : truths) {
    check_label(t.y_t, "quantile_neutral_loss");
    check_label(t.y_c, "quantile_neutral_loss");
  }

  // The 1e-9 backoff keeps ceil from overshooting when fraction*n lands
  // just above an integer in floating point (0.1 * 400 does).
  const auto m = static_cast<std::size_t>(
      std::max(0.0, std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  double cut = 0.0;
  if (m > 0) {
    std::vector<double> abs_h(n);
    for (std::size_t i = 0; i < n; ++i) abs_h[i] = std::abs(h_values[i]);
    std::nth_element(abs_h.begin(), abs_h.begin() + (m - 1), abs_h.end());
    cut = abs_h[m - 1];
  }

  EvaluationReport rep;
  rep.fraction_neutral = fraction;
  rep.threshold_t = cut;
  rep.counts.n = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = h_values[i];
    const auto& t = truths[i];
    if (t.y_t == t.y_c) {
      if (std::abs(h) > cut) ++rep.counts.spurious_effect;
    } else if (t.y_t > t.y_c) {
      if (h < -cut) ++rep.counts.false_negative;
    } else {
      if (h > cut) ++rep.counts.false_positive;
    }
  }
  rep.loss_percent =
      100.0 *
      static_cast<double>(rep.counts.false_positive + rep.counts.false_negative +
                          rep.counts.spurious_effect) /
      static_cast<double>(n);
  return rep;
}

std::vector<EvaluationReport> evaluate_model(const Predictor& predict, const Dataset& test,
                                             const std::vector<double>& fractions) {
  require_valid(test, "evaluate_model");
  std::vector<double> h;
  std::vector<TruthPair> truths;
  h.reserve(test.n());
  truths.reserve(test.n());
  for (const auto& u : test.units) {
    if (!u.y_t || !u.y_c)
      throw std::invalid_argument("evaluate_model: test unit is missing a potential outcome");
    h.push_back(predict(u.x));
    truths.push_back({*u.y_t, *u.y_c});
  }
  std::vector<EvaluationReport> out;
  out.reserve(fractions.size());
  for (double f : fractions) out.push_back(quantile_neutral_loss(h, truths, f));
  return out;
}

std::vector<EvaluationReport> evaluate_model(const CausalSvmModel& model, const Dataset& test,
                                             const std::vector<double>& fractions) {
  return evaluate_model(
      [&model](const Eigen::VectorXd& x) { return decision_value(model, x); }, test, fractions);
}

std::string reports_to_csv(const std::vector<EvaluationReport>& reports) {
  std::ostringstream out;
  out << "fraction,threshold,loss_percent,fp,fn,spurious,n\n";
  for (const auto& r : reports) {
    out << format_double(r.fraction_neutral) << ',' << format_double(r.threshold_t) << ','
        << format_double(r.loss_percent) << ',' << r.counts.false_positive << ','
        << r.counts.false_negative << ',' << r.counts.spurious_effect << ',' << r.counts.n
        << '\n';
  }
  return out.str();
}

}  // namespace causalsvm
