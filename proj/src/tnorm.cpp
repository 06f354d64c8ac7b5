#include "kfol/tnorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kfol/data.hpp"
#include "kfol/error.hpp"

namespace kfol {

namespace {

constexpr double kDomainSlack = 1e-12;

void check_unit(double x) {
  if (!(x >= -kDomainSlack && x <= 1.0 + kDomainSlack)) {
    throw Error(Errc::DomainError, "truth value " + format_double(x) + " outside [0,1]");
  }
}

}  // namespace

const TNorm& product_tnorm() {
  static const ProductTNorm instance;
  return instance;
}

double tnorm_and(double a, double b) {
  check_unit(a);
  check_unit(b);
  return product_tnorm().conj(a, b);
}

double tnorm_or(double a, double b) {
  check_unit(a);
  check_unit(b);
  return product_tnorm().disj(a, b);
}

double tnorm_not(double a) {
  check_unit(a);
  return 1.0 - a;
}

double squash(double y) {
  if (!std::isfinite(y)) throw Error(Errc::NonFinite, "cannot squash a non-finite value");
  return std::min(1.0, std::max(y, 0.0));
}

}  // namespace kfol
