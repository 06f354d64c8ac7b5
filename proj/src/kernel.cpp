#include "kfol/kernel.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace kfol {

void KernelSpec::validate() const {
  switch (kind) {
    case Kind::Linear:
      return;
    case Kind::Polynomial:
      if (degree < 1) throw Error(Errc::InvalidConfig, "polynomial kernel degree must be >= 1");
      if (!(offset >= 0) || !std::isfinite(offset)) throw Error(Errc::InvalidConfig, "polynomial kernel offset must be >= 0");
      return;
    case Kind::Rbf:
      if (!(gamma > 0) || !std::isfinite(gamma)) throw Error(Errc::InvalidConfig, "rbf kernel gamma must be > 0");
      return;
  }
}

std::string to_string(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelSpec::Kind::Linear:
      return "linear";
    case KernelSpec::Kind::Polynomial:
      return "polynomial degree=" + std::to_string(spec.degree) + " offset=" + format_double(spec.offset);
    case KernelSpec::Kind::Rbf:
      return "rbf gamma=" + format_double(spec.gamma);
  }
  return {};
}

KernelSpec parse_kernel_spec(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  KernelSpec spec;
  if (kind == "linear") {
    spec = KernelSpec::linear();
  } else if (kind == "polynomial") {
    spec = KernelSpec::polynomial(2, 1);
  } else if (kind == "rbf") {
    spec = KernelSpec::rbf(1);
  } else {
    throw Error(Errc::InvalidConfig, "unknown kernel '" + kind + "'");
  }
  std::string param;
  while (in >> param) {
    const auto eq = param.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "kernel parameter '" + param + "' lacks '='");
    const std::string key = param.substr(0, eq);
    const std::string value = param.substr(eq + 1);
    if (key == "degree" && spec.kind == KernelSpec::Kind::Polynomial) {
      spec.degree = static_cast<int>(parse_double(value));
      if (spec.degree != parse_double(value)) throw Error(Errc::InvalidConfig, "polynomial degree must be an integer");
    } else if (key == "offset" && spec.kind == KernelSpec::Kind::Polynomial) {
      spec.offset = parse_double(value);
    } else if (key == "gamma" && spec.kind == KernelSpec::Kind::Rbf) {
      spec.gamma = parse_double(value);
    } else {
      throw Error(Errc::InvalidConfig, "kernel parameter '" + key + "' does not apply to '" + kind + "'");
    }
  }
  spec.validate();
  return spec;
}

namespace {

// Accumulates either the inner product or the squared distance of two vectors
// into `acc`, in index order.
template <bool Distance>
void accumulate(std::span<const double> a, std::span<const double> b, double& acc) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (Distance) {
      const double d = a[i] - b[i];
      acc += d * d;
    } else {
      acc += a[i] * b[i];
    }
  }
}

double finish(const KernelSpec& spec, double acc) {
  switch (spec.kind) {
    case KernelSpec::Kind::Linear:
      return acc;
    case KernelSpec::Kind::Polynomial:
      return std::pow(acc + spec.offset, spec.degree);
    case KernelSpec::Kind::Rbf:
      return std::exp(-spec.gamma * acc);
  }
  return 0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch, "kernel arguments have lengths " + std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
  double acc = 0;
  if (spec.kind == KernelSpec::Kind::Rbf) {
    accumulate<true>(a, b, acc);
  } else {
    accumulate<false>(a, b, acc);
  }
  return finish(spec, acc);
}

double tuple_kernel(const KernelSpec& spec, const SampleSet& samples, const IdTuple& a, const IdTuple& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch, "kernel tuples have arities " + std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
  double acc = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (spec.kind == KernelSpec::Kind::Rbf) {
      accumulate<true>(samples[a[j]], samples[b[j]], acc);
    } else {
      accumulate<false>(samples[a[j]], samples[b[j]], acc);
    }
  }
  return finish(spec, acc);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, std::span<const IdTuple> tuples, const SampleSet& samples) {
  std::set<IdTuple> seen;
  for (const auto& t : tuples) {
    samples.check_ids(t, "gram tuple");
    if (!seen.insert(t).second) throw Error(Errc::DuplicateTuple, "support tuples passed to gram_matrix must be unique");
  }
  const auto n = static_cast<Eigen::Index>(tuples.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = tuple_kernel(spec, samples, tuples[i], tuples[j]);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  return gram;
}

double expansion_eval(const KernelExpansion& expansion, const IdTuple& args, const SampleSet& samples) {
  if (static_cast<std::size_t>(expansion.weights.size()) != expansion.support.size()) {
    throw Error(Errc::DimensionMismatch, "expansion for '" + expansion.predicate + "' has " +
                                             std::to_string(expansion.weights.size()) + " weights for " +
                                             std::to_string(expansion.support.size()) + " support tuples");
  }
  samples.check_ids(args, "prediction for '" + expansion.predicate + "'");
  double f = 0;
  for (std::size_t i = 0; i < expansion.support.size(); ++i) {
    f += expansion.weights[static_cast<Eigen::Index>(i)] * tuple_kernel(expansion.kernel, samples, expansion.support[i], args);
  }
  return f;
}

double expansion_eval(const KernelExpansion& expansion, std::span<const double> args, const SampleSet& samples) {
  if (static_cast<std::size_t>(expansion.weights.size()) != expansion.support.size()) {
    throw Error(Errc::DimensionMismatch, "expansion weights and support differ in size");
  }
  std::vector<double> concat;
  double f = 0;
  for (std::size_t i = 0; i < expansion.support.size(); ++i) {
    concat.clear();
    for (const SampleId id : expansion.support[i]) {
      const auto x = samples[id];
      concat.insert(concat.end(), x.begin(), x.end());
    }
    f += expansion.weights[static_cast<Eigen::Index>(i)] * kernel_eval(expansion.kernel, concat, args);
  }
  return f;
}

double rkhs_norm_sq(const KernelExpansion& expansion, const Eigen::MatrixXd& gram) {
  const auto n = expansion.weights.size();
  if (gram.rows() != n || gram.cols() != n) {
    throw Error(Errc::DimensionMismatch, "gram is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                                             " but expansion has " + std::to_string(n) + " weights");
  }
  return expansion.weights.dot(gram * expansion.weights);
}

}  // namespace kfol
