#pragma once

#include <Eigen/Core>
#include <string>
#include <variant>

#include "causalsvm/dataset.hpp"

namespace causalsvm {

struct LinearKernel {};

// Inhomogeneous form (1 + <x, x'>)^degree; degree >= 1.
struct PolynomialKernel {
  int degree = 2;
};

// exp(-inv_width * |x - x'|^2); inv_width > 0. Larger inv_width means a
// narrower kernel.
struct RbfKernel {
  double inv_width = 0.1;
};

using KernelSpec = std::variant<LinearKernel, PolynomialKernel, RbfKernel>;

// Throws std::invalid_argument on bad parameters.
void validate_kernel(const KernelSpec& k);

double eval_kernel(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Symmetric PSD gram matrix over the dataset's canonical unit order.
Eigen::MatrixXd gram_matrix(const KernelSpec& k, const Dataset& ds);

// Diagonal D with entries y_i^T on the treatment block and -y_j^C on the
// control block (observed outcomes).
Eigen::VectorXd signed_labels(const Dataset& ds);

// D * gram * D for the diagonal above. Same eigenvalues as gram.
Eigen::MatrixXd signed_gram(const Eigen::MatrixXd& gram, const Dataset& ds);

std::string kernel_name(const KernelSpec& k);  // e.g. linear, poly3, rbf(0.1)

}  // namespace causalsvm
