#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kfol/data.hpp"

namespace kfol {

/// Scalar kernel on R^{m*n}; n-ary arguments are the concatenation of their
/// n sample vectors.
struct KernelSpec {
  enum class Kind { Linear, Polynomial, Rbf };

  Kind kind = Kind::Rbf;
  int degree = 2;      // polynomial, >= 1
  double offset = 1;   // polynomial, >= 0
  double gamma = 1;    // rbf, > 0

  static KernelSpec linear() { return {Kind::Linear, 2, 1, 1}; }
  static KernelSpec polynomial(int degree, double offset) { return {Kind::Polynomial, degree, offset, 1}; }
  static KernelSpec rbf(double gamma) { return {Kind::Rbf, 2, 1, gamma}; }

  /// Throws InvalidConfig when parameters are out of range.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

/// "linear", "polynomial degree=3 offset=1", "rbf gamma=0.5"
std::string to_string(const KernelSpec& spec);
KernelSpec parse_kernel_spec(const std::string& text);

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

/// Kernel between two id tuples, equal to kernel_eval on the concatenated vectors.
double tuple_kernel(const KernelSpec& spec, const SampleSet& samples, const IdTuple& a, const IdTuple& b);

/// Dense symmetric Gram matrix over `tuples`, which must be unique.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, std::span<const IdTuple> tuples, const SampleSet& samples);

struct KernelExpansion {
  std::string predicate;
  KernelSpec kernel;
  std::vector<IdTuple> support;
  Eigen::VectorXd weights;
};

/// f(args) = sum_i w_i K(support_i, args).
double expansion_eval(const KernelExpansion& expansion, const IdTuple& args, const SampleSet& samples);

/// Evaluation at arbitrary argument vectors (concatenated, length m*n).
double expansion_eval(const KernelExpansion& expansion, std::span<const double> args, const SampleSet& samples);

/// Unweighted squared RKHS norm w' G w.
double rkhs_norm_sq(const KernelExpansion& expansion, const Eigen::MatrixXd& gram);

}  // namespace kfol
