#include "causalsvm/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace causalsvm {

namespace {

double softplus(double z) {
  // log(1 + e^z) without overflow.
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

const double kLogisticScale = 2.0 / std::log1p(std::exp(1.0));

double step_pair(double z) { return (z >= 0.0 ? 1.0 : 0.0) + (z >= 1.0 ? 1.0 : 0.0); }

}  // namespace

double surrogate_value(SurrogateLoss loss, double z) {
  if (std::isnan(z)) throw std::invalid_argument("surrogate_value: z is NaN");
  switch (loss) {
    case SurrogateLoss::DoubleIndicator:
      return step_pair(z);
    case SurrogateLoss::Hinge:
      return z > -1.0 ? 1.0 + z : 0.0;
    case SurrogateLoss::Squared:
      return (1.0 + z) * (1.0 + z);
    case SurrogateLoss::ScaledLogistic:
      return kLogisticScale * softplus(z);
    case SurrogateLoss::Exponential:
      return std::exp(z);
  }
  throw std::invalid_argument("surrogate_value: unknown loss");
}

bool surrogate_saturates(SurrogateLoss loss, double z) {
  return loss == SurrogateLoss::Exponential && std::isinf(std::exp(z));
}

ValidityReport check_surrogate_validity(const std::function<double(double)>& loss,
                                        double z_min, double z_max, double step) {
  if (!(step > 0.0) || !(z_max >= z_min))
    throw std::invalid_argument("check_surrogate_validity: bad grid");
  ValidityReport rep;
  auto check = [&](double z) {
    if (!rep.pass) return;
    const double need = step_pair(z);
    const double got = loss(z);
    if (!(got >= need - 1e-12)) {
      rep.pass = false;
      rep.z_fail = z;
      rep.value = got;
      rep.required = need;
    }
  };
  const auto steps = static_cast<long long>(std::floor((z_max - z_min) / step + 1e-9));
  for (long long k = 0; k <= steps && rep.pass; ++k) check(z_min + static_cast<double>(k) * step);
  check(0.0);
  check(1.0);
  return rep;
}

ValidityReport check_surrogate_validity(SurrogateLoss loss, double z_min, double z_max,
                                        double step) {
  return check_surrogate_validity([loss](double z) { return surrogate_value(loss, z); }, z_min,
                                  z_max, step);
}

RiskPair minimax_risk(const std::vector<double>& h, const Dataset& ds, SurrogateLoss loss) {
  if (static_cast<int>(h.size()) != ds.n())
    throw std::invalid_argument("minimax_risk: h size does not match dataset");
  if (ds.n_t < 1 || ds.n_c < 1)
    throw std::invalid_argument("minimax_risk: need both groups");
  RiskPair r;
  for (int i = 0; i < ds.n_t; ++i) {
    const double hi = h[static_cast<std::size_t>(i)];
    if (std::isnan(hi)) throw std::invalid_argument("minimax_risk: NaN decision value");
    r.treatment_risk += surrogate_value(loss, -hi * ds.treatment(i).y_obs);
  }
  r.treatment_risk /= ds.n_t;
  for (int j = 0; j < ds.n_c; ++j) {
    const Unit& u = ds.control(j);
    if (!u.ratio)
      throw std::invalid_argument("minimax_risk: control unit " + std::to_string(j) +
                                  " has no ratio");
    const double hj = h[static_cast<std::size_t>(ds.n_t + j)];
    if (std::isnan(hj)) throw std::invalid_argument("minimax_risk: NaN decision value");
    r.control_risk += surrogate_value(loss, hj * u.y_obs) / *u.ratio;
  }
  r.control_risk /= ds.n_c;
  r.minimax = std::max(r.treatment_risk, r.control_risk);
  return r;
}

}  // namespace causalsvm
