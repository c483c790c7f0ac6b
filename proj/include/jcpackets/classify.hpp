#pragma once

#include <string>

#include "jcpackets/model.hpp"

namespace jcp {

enum class Regime { A = 0, B = 1, C = 2, D = 3 };

std::string to_string(Regime r);

struct RegimeClass {
  Regime label = Regime::A;
  // Signed distances to the drawn boundaries, in units of g^2:
  // f*delta - g^2/3, (f + 1.5 g)*delta - g^2, (f - 1.5 g)*delta - g^2.
  double dist_ab = 0.0;
  double dist_bc = 0.0;
  double dist_cd = 0.0;
};

// Dynamical class of constant driving at (f, delta). Boundary points go to
// the higher class.
RegimeClass classify(double f, double delta, const SystemParams& params);

struct LambdaExtremum {
  double value = 0.0;
  bool in_domain = false;
};

// Closed forms for the extremal LDS overlaps along the canonical
// trajectories; valid for delta >= g^2/(8f) resp. delta >= g^2/f.
LambdaExtremum min_lambda1(double f, double delta, const SystemParams& params);
LambdaExtremum max_lambda2(double f, double delta, const SystemParams& params);

// f*delta/g^2 threshold guaranteeing min lambda_1 > 1 - eta. eta = 1/2
// reproduces the drawn A/B boundary f*delta = g^2/3.
double ab_boundary_threshold(double eta);

}  // namespace jcp
