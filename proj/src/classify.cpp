#include "jcpackets/classify.hpp"

#include <cmath>
#include <limits>

namespace jcp {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    case Regime::C: return "C";
    case Regime::D: return "D";
  }
  return "?";
}

RegimeClass classify(double f, double delta, const SystemParams& params) {
  if (!(f > 0.0)) throw std::invalid_argument("driving strength must be positive");
  if (delta < 0.0) throw std::invalid_argument("negative detuning is not supported");
  const double g = params.g;
  const double g2 = g * g;

  RegimeClass rc;
  rc.dist_ab = f * delta - g2 / 3.0;
  rc.dist_bc = (f + 1.5 * g) * delta - g2;
  rc.dist_cd = (f - 1.5 * g) * delta - g2;

  if (rc.dist_ab < 0.0) {
    rc.label = Regime::A;
  } else if (rc.dist_bc < 0.0) {
    rc.label = Regime::B;
  } else if (rc.dist_cd <= 0.0) {
    rc.label = Regime::C;
  } else {
    rc.label = Regime::D;
  }
  return rc;
}

LambdaExtremum min_lambda1(double f, double delta, const SystemParams& params) {
  LambdaExtremum out;
  const double g2 = params.g * params.g;
  if (!(f > 0.0) || delta < g2 / (8.0 * f)) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.in_domain = false;
    return out;
  }
  const double r = g2 / (f * delta);
  out.value = std::sqrt(1.0 + r) - 0.5 * r;
  out.in_domain = true;
  return out;
}

LambdaExtremum max_lambda2(double f, double delta, const SystemParams& params) {
  LambdaExtremum out;
  const double g2 = params.g * params.g;
  if (!(f > 0.0) || delta < g2 / f) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.in_domain = false;
    return out;
  }
  const double r = g2 / (f * delta);
  out.value = -(std::sqrt(1.0 - r) + 0.5 * r);
  out.in_domain = true;
  return out;
}

double ab_boundary_threshold(double eta) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  return 1.0 / (2.0 * eta + std::sqrt(8.0 * eta));
}

}  // namespace jcp
