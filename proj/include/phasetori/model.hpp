#pragma once

#include <Eigen/Dense>

namespace phasetori {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;

// Oscillator network: m populations of n phase oscillators with pairwise
// coupling g2 within populations and averaged nonpairwise coupling g4 to the
// cyclic neighbor populations.
struct NetworkParams {
  int m = 3;
  int n = 2;
  double omega = -1.0;
  double alpha2 = pi / 2;
  double alpha4 = pi;
  double k_minus = 0.4;
  double k_plus = 0.4;
  double r0 = 0.1;

  int size() const { return m * n; }
  int idx(int sigma, int k) const { return sigma * n + k; }
  void validate() const;
};

// Biharmonic all-to-all perturbation h(phi) = sin(phi+alpha) + r sin(2(phi+beta)),
// applied with strength delta.
struct PerturbParams {
  double alpha = pi / 2;
  double beta = pi / 2;
  double r = 0.2;
  double delta = 0.0;

  void validate() const;
};

double g2(double phi, const NetworkParams& p);
double dg2(double phi, const NetworkParams& p);
double g4(double phi, const NetworkParams& p);
double dg4(double phi, const NetworkParams& p);
double hpert(double phi, const PerturbParams& q);
double dhpert(double phi, const PerturbParams& q);

// H(theta): unperturbed network vector field.
Vec eval_unperturbed(const Vec& theta, const NetworkParams& p);
// Z(theta): perturbation field, sum of h over all oscillator pairs incl. self.
Vec eval_perturbation(const Vec& theta, const PerturbParams& q);
// F = H + delta Z.
Vec eval_full(const Vec& theta, const NetworkParams& p, const PerturbParams& q);

Mat jacobian_unperturbed(const Vec& theta, const NetworkParams& p);
Mat jacobian_perturbation(const Vec& theta, const PerturbParams& q);
Mat jacobian_full(const Vec& theta, const NetworkParams& p, const PerturbParams& q);

}  // namespace phasetori
