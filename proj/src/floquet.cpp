#include "phasetori/floquet.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

namespace phasetori {

int FloquetSpectrum::n_unstable() const {
  int n = 0;
  for (int i = 0; i < multipliers.size(); ++i)
    if (i != trivial_index && std::abs(multipliers[i]) > 1.0) ++n;
  return n;
}

namespace {

// Per-interval transfer matrices of the linearized flow from the collocation
// linearization: unknown variation at local nodes 1..ncol, node 0 given;
// transfer = value at node ncol.
std::vector<Mat> interval_transfers(const CollocationScheme& scheme, const ReducedSystem& sys,
                                    const OrbitSegment& orbit) {
  const int ncol = scheme.ncol, d = scheme.dim;
  std::vector<Mat> out;
  out.reserve(scheme.ntst);
  for (int j = 0; j < scheme.ntst; ++j) {
    const double h = scheme.mesh[j + 1] - scheme.mesh[j];
    Mat ul(ncol + 1, d);
    for (int i = 0; i <= ncol; ++i)
      ul.row(i) = orbit.u.segment(scheme.node_index(j, i) * d, d).transpose();
    const Mat Xc = scheme.P * ul;
    Mat A = Mat::Zero(ncol * d, ncol * d);
    Mat rhs = Mat::Zero(ncol * d, d);
    for (int g = 0; g < ncol; ++g) {
      const Mat Jg = sys.df(Xc.row(g).transpose(), orbit.delta, orbit.r);
      for (int i = 1; i <= ncol; ++i) {
        for (int a = 0; a < d; ++a) {
          A(g * d + a, (i - 1) * d + a) += scheme.D(g, i) / h;
          for (int b = 0; b < d; ++b)
            A(g * d + a, (i - 1) * d + b) -= orbit.period * Jg(a, b) * scheme.P(g, i);
        }
      }
      for (int a = 0; a < d; ++a) {
        rhs(g * d + a, a) -= scheme.D(g, 0) / h;
        for (int b = 0; b < d; ++b) rhs(g * d + a, b) += orbit.period * Jg(a, b) * scheme.P(g, 0);
      }
    }
    const Mat V = A.partialPivLu().solve(rhs);
    out.push_back(V.bottomRows(d));
  }
  return out;
}

FloquetSpectrum spectrum_from(const VecC& mu) {
  std::vector<int> order(mu.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(mu[a]) > std::abs(mu[b]); });
  FloquetSpectrum sp;
  sp.multipliers.resize(mu.size());
  for (size_t i = 0; i < order.size(); ++i) sp.multipliers[long(i)] = mu[order[i]];
  sp.trivial_index = 0;
  double best = std::abs(sp.multipliers[0] - 1.0);
  for (int i = 1; i < sp.multipliers.size(); ++i) {
    const double e = std::abs(sp.multipliers[i] - 1.0);
    if (e < best) {
      best = e;
      sp.trivial_index = i;
    }
  }
  sp.trivial_error = best;
  return sp;
}

// Multipliers of the ordered product G_{k-1}...G_0 without forming it: lifted
// pencil A v = mu B v with v = (u_0,...,u_{k-1}), rows G_j u_j = u_{j+1} and
// G_{k-1} u_{k-1} = mu u_0.  The explicit product loses the trivial
// multiplier near a homoclinic orbit (intermediate factors grow like
// exp(lambda T) and cancel catastrophically); the pencil keeps every factor
// at its own moderate scale.  B has rank d, so QZ yields d finite
// eigenvalues (largest |beta|) and (k-1)d infinite ones.
VecC product_eigs_pencil(const std::vector<Mat>& groups, int d) {
  const int k = int(groups.size());
  const int n = k * d;
  Mat A = Mat::Zero(n, n), B = Mat::Zero(n, n);
  A.topRightCorner(d, d) = groups[k - 1];
  B.topLeftCorner(d, d) = Mat::Identity(d, d);
  for (int j = 1; j < k; ++j) {
    A.block(j * d, (j - 1) * d, d, d) = groups[j - 1];
    A.block(j * d, j * d, d, d) = -Mat::Identity(d, d);
  }
  Eigen::GeneralizedEigenSolver<Mat> ges(A, B, true);
  const auto& alpha = ges.alphas();
  const auto& beta = ges.betas();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(beta[a]) > std::abs(beta[b]); });
  VecC mu(d);
  for (int i = 0; i < d; ++i) mu[i] = alpha[order[i]] / beta[order[i]];
  return mu;
}

}  // namespace

Mat monodromy(const CollocationScheme& scheme, const ReducedSystem& sys,
              const OrbitSegment& orbit) {
  const auto G = interval_transfers(scheme, sys, orbit);
  Mat M = Mat::Identity(scheme.dim, scheme.dim);
  for (const auto& g : G) M = g * M;
  return M;
}

FloquetSpectrum floquet(const CollocationScheme& scheme, const ReducedSystem& sys,
                        const OrbitSegment& orbit, double drift_tol) {
  const int d = scheme.dim;
  const auto G = interval_transfers(scheme, sys, orbit);
  Mat M = Mat::Identity(d, d);
  for (const auto& g : G) M = g * M;
  FloquetSpectrum sp = spectrum_from(Eigen::EigenSolver<Mat>(M).eigenvalues());

  if (sp.trivial_error > 1e-8) {
    // condense contiguous intervals into groups spanning ~2 time units each
    // so no group product is badly scaled, then solve the lifted pencil
    const int ntst = int(G.size());
    int k = std::clamp(int(std::ceil(orbit.period / 2.0)), 1, std::min(ntst, 40));
    std::vector<Mat> groups;
    groups.reserve(k);
    for (int j = 0; j < k; ++j) {
      const int lo = j * ntst / k, hi = (j + 1) * ntst / k;
      Mat P = Mat::Identity(d, d);
      for (int i = lo; i < hi; ++i) P = G[i] * P;
      groups.push_back(P);
    }
    const FloquetSpectrum alt =
        spectrum_from(k > 1 ? product_eigs_pencil(groups, d)
                            : Eigen::EigenSolver<Mat>(groups[0]).eigenvalues().eval());
    if (alt.trivial_error < sp.trivial_error) sp = alt;
  }

  if (sp.trivial_error > drift_tol)
    throw TrivialMultiplierDrift("floquet: trivial multiplier error " +
                                 std::to_string(sp.trivial_error));
  sp.valid = true;
  return sp;
}

std::pair<double, double> abel_liouville(const CollocationScheme& scheme,
                                         const ReducedSystem& sys, const OrbitSegment& orbit) {
  const Mat M = monodromy(scheme, sys, orbit);
  const double prod = std::abs(M.partialPivLu().determinant());
  double tr = 0.0;
  const int ncol = scheme.ncol, d = scheme.dim;
  for (int j = 0; j < scheme.ntst; ++j) {
    const double h = scheme.mesh[j + 1] - scheme.mesh[j];
    Mat ul(ncol + 1, d);
    for (int i = 0; i <= ncol; ++i)
      ul.row(i) = orbit.u.segment(scheme.node_index(j, i) * d, d).transpose();
    const Mat Xc = scheme.P * ul;
    for (int g = 0; g < ncol; ++g)
      tr += h * scheme.weights[g] * sys.df(Xc.row(g).transpose(), orbit.delta, orbit.r).trace();
  }
  return {prod, std::exp(orbit.period * tr)};
}

}  // namespace phasetori
