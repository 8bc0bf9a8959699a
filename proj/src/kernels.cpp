#include "causalsvm/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalsvm/csv.hpp"

namespace causalsvm {

void validate_kernel(const KernelSpec& k) {
  if (const auto* p = std::get_if<PolynomialKernel>(&k)) {
    if (p->degree < 1) throw std::invalid_argument("polynomial kernel degree must be >= 1");
  } else if (const auto* r = std::get_if<RbfKernel>(&k)) {
    if (!(r->inv_width > 0.0) || !std::isfinite(r->inv_width))
      throw std::invalid_argument("rbf kernel inv_width must be positive and finite");
  }
}

double eval_kernel(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("eval_kernel: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  validate_kernel(k);
  if (std::holds_alternative<LinearKernel>(k)) return a.dot(b);
  if (const auto* p = std::get_if<PolynomialKernel>(&k))
    return std::pow(1.0 + a.dot(b), p->degree);
  const auto& r = std::get<RbfKernel>(k);
  return std::exp(-r.inv_width * (a - b).squaredNorm());
}

Eigen::MatrixXd gram_matrix(const KernelSpec& k, const Dataset& ds) {
  validate_kernel(k);
  const int n = ds.n();
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& xi = ds.units[static_cast<std::size_t>(i)].x;
    for (int j = 0; j <= i; ++j) {
      const double v = eval_kernel(k, xi, ds.units[static_cast<std::size_t>(j)].x);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::VectorXd signed_labels(const Dataset& ds) {
  Eigen::VectorXd d(ds.n());
  for (int i = 0; i < ds.n_t; ++i) d[i] = ds.treatment(i).y_obs;
  for (int j = 0; j < ds.n_c; ++j) d[ds.n_t + j] = -ds.control(j).y_obs;
  return d;
}

Eigen::MatrixXd signed_gram(const Eigen::MatrixXd& gram, const Dataset& ds) {
  if (gram.rows() != ds.n() || gram.cols() != ds.n())
    throw std::invalid_argument("signed_gram: gram size does not match dataset");
  const Eigen::VectorXd d = signed_labels(ds);
  return d.asDiagonal() * gram * d.asDiagonal();
}

std::string kernel_name(const KernelSpec& k) {
  if (std::holds_alternative<LinearKernel>(k)) return "linear";
  if (const auto* p = std::get_if<PolynomialKernel>(&k))
    return "poly" + std::to_string(p->degree);
  const auto& r = std::get<RbfKernel>(k);
  return "rbf(" + format_double(r.inv_width) + ")";
}

}  // namespace causalsvm
