#pragma once

#include "phasetori/continuation.hpp"

namespace phasetori {

struct ExtendedSingular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FoldCurvePoint {
  double delta = 0.0;
  double r = 0.0;
  double period = 0.0;
};

struct FoldCurve {
  std::vector<FoldCurvePoint> points;
  std::vector<int> cusp_indices;  // tangent reversal in the (r, delta) plane
  std::string termination;        // "range" | "steps" | "underflow" | "singular"
};

struct FoldSettings {
  double ds0 = 0.005;
  double dsmin = 1e-9;
  double dsmax = 0.02;
  int max_steps = 400;
  double delta_min = 0.002;
  double delta_max = 0.08;
  double r_min = 1e-5;
  double r_max = 0.5;
  double newton_tol = 1e-9;
  int initial_direction = -1;  // preferred initial sign of d(delta)/ds
};

// Moore-Spence extended system (BVP, null-vector equations, normalization)
// continued in (r, delta) from a localized saddle-node orbit.
FoldCurve continue_fold(const CollocationScheme& scheme, const ReducedSystem& sys,
                        const OrbitSegment& fold_orbit, const FoldSettings& settings);

}  // namespace phasetori
