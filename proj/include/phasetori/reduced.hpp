#pragma once

#include <vector>

#include "phasetori/homological.hpp"

namespace phasetori {

struct DegenerateReducedDynamics : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NeutralSeed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Stability { stable, unstable, neutral };

// Fixed point of the 1-D effective reduced dynamics on the slow angle
// (psi = phi3 - phi2 for SDD, phi = phi2 - phi1 for SSD).
struct ReducedFixedPoint {
  std::string pattern;
  double angle = 0.0;
  Stability stability = Stability::neutral;
  double eigenvalue = 0.0;  // d(rate)/d(angle), includes the delta factor
};

// SDD slow dynamics psi' = 2 r delta [sin(2(beta-psi)) - sin(2(beta+psi))]
//                        = -4 r delta cos(2 beta) sin(2 psi).
std::vector<ReducedFixedPoint> sdd_fixed_points(const PerturbParams& q);

// SSD slow dynamics phi' = -4 delta sin(phi) [cos(alpha) + 2 r cos(phi) cos(2 beta)],
// extra pair at phi = +-arccos(-rho), rho = cos(alpha)/(2 r cos(2 beta)), when |rho| < 1.
std::vector<ReducedFixedPoint> ssd_fixed_points(const PerturbParams& q);

// Closed seed loop on T^m (frozen slow angles, fast angles advancing one
// resonant cycle) and its image in the full phase space.
struct SeedOrbit {
  std::vector<Vec> phi_curve;        // samples of the loop on T^m, s in [0,1]
  Eigen::VectorXi windings_reduced;  // l in Z^m
  double period_estimate = 0.0;
  std::vector<Vec> full_curve;       // embedding_eval images (unwrapped)
  Eigen::VectorXi windings_full;     // k in Z^{mn}, k_{sigma,j} = l_sigma
};

SeedOrbit build_seed_orbit(const FirstOrderSolution& sol, const ReducedFixedPoint& fp,
                           double delta, int nsamples);

// Adaptive RK integration of phi' = f_delta(phi).
std::vector<std::pair<double, Vec>> integrate_reduced(const FirstOrderSolution& sol,
                                                      const Vec& phi0, double delta,
                                                      double t_end, double tol);

}  // namespace phasetori
