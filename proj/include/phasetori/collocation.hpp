#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "phasetori/frame.hpp"
#include "phasetori/model.hpp"

namespace phasetori {

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SpMat = Eigen::SparseMatrix<double>;

// Vector field on the T^{mn-1} phase-difference reduction
// x_i = theta_i - theta_{1,1}; the residual T^1 action is quotiented out.
struct ReducedSystem {
  NetworkParams net;
  PerturbParams pert;  // delta and r overridden per evaluation

  int dim() const { return net.size() - 1; }
  Vec lift(const Vec& x) const;
  Vec f(const Vec& x, double delta, double r) const;
  Mat df(const Vec& x, double delta, double r) const;
  Vec df_dlambda(const Vec& x, double delta, double r, bool wrt_delta) const;
};

Vec reduce_phase_differences(const Vec& theta);

// Gauss-Legendre collocation with degree-ncol Lagrange polynomials on
// ncol+1 equispaced local nodes per interval (endpoints shared).
struct CollocationScheme {
  int ntst = 50;
  int ncol = 4;
  int dim = 5;
  Vec mesh;     // ntst+1 interval boundaries in [0,1]
  Vec nodes;    // ncol Gauss-Legendre points on (0,1)
  Vec weights;  // matching quadrature weights, sum 1
  Mat P;        // (ncol x ncol+1) basis values at the Gauss points
  Mat D;        // (ncol x ncol+1) basis derivatives at the Gauss points
  Vec tnodes;   // global times of the ntst*ncol+1 stored nodes

  static CollocationScheme make(int ntst, int ncol, int dim);

  int nnode() const { return ntst * ncol + 1; }
  int nu() const { return nnode() * dim; }
  int nw() const { return nu() + 2; }  // unknowns: u, period, lambda
  int node_index(int interval, int local) const { return interval * ncol + local; }

  // AUTO-style weighted inner product: u block scaled by 1/nnode.
  double wdot(const Vec& a, const Vec& b) const;
  double wnorm(const Vec& a) const { return std::sqrt(wdot(a, a)); }
};

enum class FreeParam { delta, r };

// Collocation-discretized periodic orbit with winding numbers.
struct OrbitSegment {
  Vec u;  // nnode*dim node values, unwrapped
  double period = 0.0;
  Eigen::VectorXi windings;  // dim
  double delta = 0.0;
  double r = 0.0;
};

Vec pack_state(const OrbitSegment& orbit, FreeParam free);
OrbitSegment unpack_state(const CollocationScheme& scheme, const Vec& W,
                          const Eigen::VectorXi& windings, FreeParam free, double other);

// Residual and sparse Jacobian of the square bordered system:
// collocation rows, winding boundary conditions, integral phase condition,
// and a closing row (fixed lambda when tangent == nullptr, else the weighted
// pseudo-arclength condition <W - Wpred, tangent>_w = 0).
void bvp_system(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                const Vec& uold, const Eigen::VectorXi& windings, FreeParam free, double other,
                const Vec* tangent, const Vec* Wpred, Vec& res, SpMat& J);

Vec bvp_residual(const CollocationScheme& scheme, const ReducedSystem& sys,
                 const OrbitSegment& orbit, const Vec& uold);

// Fixed-lambda Newton correction.
OrbitSegment newton_correct(const CollocationScheme& scheme, const ReducedSystem& sys,
                            const OrbitSegment& seed, const Vec& uold, double newton_tol = 1e-10,
                            int max_iter = 12);

// Arclength-constrained Newton; returns false if not converged.
bool newton_arclength(const CollocationScheme& scheme, const ReducedSystem& sys, Vec& W,
                      const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                      double other, const Vec& tangent, const Vec& Wpred,
                      double newton_tol = 1e-10, int max_iter = 10);

// Sign of det of the fixed-lambda bordered Jacobian (branch-point test).
int jacobian_det_sign(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                      const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                      double other);

}  // namespace phasetori
