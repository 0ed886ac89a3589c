#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phasetori/collocation.hpp"
#include "phasetori/floquet.hpp"
#include "phasetori/reduced.hpp"

namespace phasetori {

struct StepUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SwitchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AmbiguousEvent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EventKind { SaddleNode, Torus, BranchPoint, PeriodDoubling, HomoclinicApproach };

std::string event_code(EventKind k);  // SN | TR | BP | PD | HOM

struct BifurcationEvent {
  EventKind kind;
  double delta = 0.0;
  double r = 0.0;
  double measure = 0.0;
  int point_index = 0;  // accepted point preceding the event
  double localization_tol = 1e-5;
  OrbitSegment orbit;  // localized snapshot
};

// Which averaged phase difference to report: mean(u[plus] - u[minus]), or
// mean(u[plus]) when minus < 0; indices into the reduced coordinates.
struct MeasureSpec {
  int plus = 3;
  int minus = 1;
};

double measure_orbit(const CollocationScheme& scheme, const OrbitSegment& orbit,
                     const MeasureSpec& ms);

// Discretizes a seed loop (sampled at the scheme's nodes) into the reduced
// phase-difference coordinates.
OrbitSegment seed_segment(const CollocationScheme& scheme, const SeedOrbit& seed, double delta,
                          double r);

struct BranchPointRecord {
  OrbitSegment orbit;
  FloquetSpectrum spectrum;
  double measure = 0.0;
  std::string event;  // "" or event code fired between previous point and this
};

struct Branch {
  std::vector<BranchPointRecord> points;
  std::vector<BifurcationEvent> events;
  bool closed_loop = false;          // isola: returned to the start
  std::string termination;           // "range" | "steps" | "closed" | "homoclinic" | "underflow"
};

struct ContinuationSettings {
  double ds0 = 0.01;
  double dsmin = 1e-10;
  double dsmax = 0.03;
  int max_steps = 1000;
  double lambda_min = -0.02;
  double lambda_max = 0.75;
  double T_max = 200.0;
  double newton_tol = 1e-10;
  double localization_tol = 1e-5;
  double eps_switch = 1e-3;
  int initial_direction = +1;  // preferred sign of the lambda tangent at start
  bool detect_events = true;
};

// Pseudo-arclength predictor-corrector from a converged orbit. If
// initial_tangent is given it overrides the default lambda-direction start.
Branch continue_branch(const CollocationScheme& scheme, const ReducedSystem& sys,
                       const OrbitSegment& start, FreeParam free, const MeasureSpec& ms,
                       const ContinuationSettings& settings,
                       const Vec* initial_tangent = nullptr);

// Null direction of the singular fixed-lambda Jacobian at a branch point
// (inverse iteration on the bordered system).
Vec branch_null_vector(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                       const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                       double other);

// Steps onto the secondary branch emanating at a localized branch point;
// returns the corrected orbit and the secondary tangent.
std::pair<OrbitSegment, Vec> switch_branch(const CollocationScheme& scheme,
                                           const ReducedSystem& sys,
                                           const BifurcationEvent& event, FreeParam free,
                                           const ContinuationSettings& settings, int direction);

}  // namespace phasetori
