#include "phasetori/collocation.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

namespace phasetori {

Vec ReducedSystem::lift(const Vec& x) const {
  Vec theta(net.size());
  theta[0] = 0.0;
  theta.tail(net.size() - 1) = x;
  return theta;
}

Vec ReducedSystem::f(const Vec& x, double delta, double r) const {
  PerturbParams q = pert;
  q.delta = delta;
  q.r = r;
  const Vec F = eval_full(lift(x), net, q);
  return F.tail(dim()) - Vec::Constant(dim(), F[0]);
}

Mat ReducedSystem::df(const Vec& x, double delta, double r) const {
  PerturbParams q = pert;
  q.delta = delta;
  q.r = r;
  const Mat J = jacobian_full(lift(x), net, q);
  const int d = dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = J(i + 1, j + 1) - J(0, j + 1);
  return out;
}

Vec ReducedSystem::df_dlambda(const Vec& x, double delta, double r, bool wrt_delta) const {
  const Vec theta = lift(x);
  PerturbParams q = pert;
  q.delta = delta;
  q.r = r;
  Vec dF;
  if (wrt_delta) {
    dF = eval_perturbation(theta, q);
  } else {
    // dF/dr = delta * dZ/dr, with dh/dr = sin(2(phi+beta))
    const int nn = net.size();
    dF = Vec::Zero(nn);
    for (int k = 0; k < nn; ++k) {
      double z = 0.0;
      for (int l = 0; l < nn; ++l) z += std::sin(2 * (theta[l] - theta[k] + q.beta));
      dF[k] = delta * z;
    }
  }
  return dF.tail(dim()) - Vec::Constant(dim(), dF[0]);
}

Vec reduce_phase_differences(const Vec& theta) {
  const int d = int(theta.size()) - 1;
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = theta[i + 1] - theta[0];
  return x;
}

namespace {

// Gauss-Legendre nodes/weights on [0,1] via Newton on P_n.
void gauss_legendre(int n, Vec& nodes, Vec& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));  // on [-1,1]
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Lagrange basis over ncol+1 equispaced points on [0,1], values and
// derivatives at x.
void lagrange_row(int ncol, double x, Eigen::RowVectorXd& vals, Eigen::RowVectorXd& ders) {
  const int np = ncol + 1;
  vals.resize(np);
  ders.resize(np);
  std::vector<double> s(np);
  for (int i = 0; i < np; ++i) s[i] = double(i) / ncol;
  for (int i = 0; i < np; ++i) {
    double v = 1.0;
    for (int j = 0; j < np; ++j)
      if (j != i) v *= (x - s[j]) / (s[i] - s[j]);
    vals[i] = v;
    double d = 0.0;
    for (int k = 0; k < np; ++k) {
      if (k == i) continue;
      double t = 1.0 / (s[i] - s[k]);
      for (int j = 0; j < np; ++j)
        if (j != i && j != k) t *= (x - s[j]) / (s[i] - s[j]);
      d += t;
    }
    ders[i] = d;
  }
}

}  // namespace

CollocationScheme CollocationScheme::make(int ntst, int ncol, int dim) {
  CollocationScheme sch;
  sch.ntst = ntst;
  sch.ncol = ncol;
  sch.dim = dim;
  sch.mesh = Vec::LinSpaced(ntst + 1, 0.0, 1.0);
  gauss_legendre(ncol, sch.nodes, sch.weights);
  sch.P.resize(ncol, ncol + 1);
  sch.D.resize(ncol, ncol + 1);
  for (int g = 0; g < ncol; ++g) {
    Eigen::RowVectorXd v, d;
    lagrange_row(ncol, sch.nodes[g], v, d);
    sch.P.row(g) = v;
    sch.D.row(g) = d;
  }
  sch.tnodes.resize(sch.nnode());
  for (int j = 0; j < ntst; ++j) {
    const double h = sch.mesh[j + 1] - sch.mesh[j];
    for (int i = 0; i < ncol; ++i)
      sch.tnodes[sch.node_index(j, i)] = sch.mesh[j] + h * i / ncol;
  }
  sch.tnodes[sch.nnode() - 1] = 1.0;
  return sch;
}

double CollocationScheme::wdot(const Vec& a, const Vec& b) const {
  const int n = nu();
  return a.head(n).dot(b.head(n)) / nnode() + a.tail(a.size() - n).dot(b.tail(b.size() - n));
}

Vec pack_state(const OrbitSegment& orbit, FreeParam free) {
  Vec W(orbit.u.size() + 2);
  W.head(orbit.u.size()) = orbit.u;
  W[orbit.u.size()] = orbit.period;
  W[orbit.u.size() + 1] = (free == FreeParam::delta) ? orbit.delta : orbit.r;
  return W;
}

OrbitSegment unpack_state(const CollocationScheme& scheme, const Vec& W,
                          const Eigen::VectorXi& windings, FreeParam free, double other) {
  OrbitSegment o;
  o.u = W.head(scheme.nu());
  o.period = W[scheme.nu()];
  o.windings = windings;
  if (free == FreeParam::delta) {
    o.delta = W[scheme.nu() + 1];
    o.r = other;
  } else {
    o.r = W[scheme.nu() + 1];
    o.delta = other;
  }
  return o;
}

void bvp_system(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                const Vec& uold, const Eigen::VectorXi& windings, FreeParam free, double other,
                const Vec* tangent, const Vec* Wpred, Vec& res, SpMat& J) {
  const int ntst = scheme.ntst, ncol = scheme.ncol, d = scheme.dim;
  const int nu = scheme.nu(), nw = scheme.nw();
  const double T = W[nu];
  const double lam = W[nu + 1];
  const double delta = (free == FreeParam::delta) ? lam : other;
  const double r = (free == FreeParam::r) ? lam : other;

  res.setZero(nw);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(ntst) * ncol * d * ((ncol + 1) * d + 2) + 4 * d + nu + nw);

  for (int j = 0; j < ntst; ++j) {
    const double h = scheme.mesh[j + 1] - scheme.mesh[j];
    Mat ul(ncol + 1, d);
    for (int i = 0; i <= ncol; ++i)
      ul.row(i) = W.segment(scheme.node_index(j, i) * d, d).transpose();
    const Mat Xc = scheme.P * ul;
    const Mat dXc = (scheme.D * ul) / h;
    for (int g = 0; g < ncol; ++g) {
      const Vec x = Xc.row(g).transpose();
      const Vec Fg = sys.f(x, delta, r);
      const Mat Jg = sys.df(x, delta, r);
      const Vec dFl = sys.df_dlambda(x, delta, r, free == FreeParam::delta);
      const int rr0 = (j * ncol + g) * d;
      res.segment(rr0, d) = dXc.row(g).transpose() - T * Fg;
      for (int i = 0; i <= ncol; ++i) {
        const int ci = scheme.node_index(j, i) * d;
        for (int a = 0; a < d; ++a) {
          trip.emplace_back(rr0 + a, ci + a, scheme.D(g, i) / h);
          for (int b = 0; b < d; ++b)
            trip.emplace_back(rr0 + a, ci + b, -T * Jg(a, b) * scheme.P(g, i));
        }
      }
      for (int a = 0; a < d; ++a) {
        trip.emplace_back(rr0 + a, nu, -Fg[a]);
        trip.emplace_back(rr0 + a, nu + 1, -T * dFl[a]);
      }
    }
  }

  // winding boundary conditions
  const int rb = ntst * ncol * d;
  for (int a = 0; a < d; ++a) {
    res[rb + a] = W[(scheme.nnode() - 1) * d + a] - W[a] - 2 * pi * windings[a];
    trip.emplace_back(rb + a, (scheme.nnode() - 1) * d + a, 1.0);
    trip.emplace_back(rb + a, a, -1.0);
  }

  // integral phase condition against the previous orbit
  const int rp = rb + d;
  double ph = 0.0;
  for (int j = 0; j < ntst; ++j) {
    const double h = scheme.mesh[j + 1] - scheme.mesh[j];
    Mat ul(ncol + 1, d), uo(ncol + 1, d);
    for (int i = 0; i <= ncol; ++i) {
      ul.row(i) = W.segment(scheme.node_index(j, i) * d, d).transpose();
      uo.row(i) = uold.segment(scheme.node_index(j, i) * d, d).transpose();
    }
    const Mat X = scheme.P * ul;
    const Mat Xo = scheme.P * uo;
    const Mat dXo = (scheme.D * uo) / h;
    for (int g = 0; g < ncol; ++g) {
      ph += h * scheme.weights[g] * (X.row(g) - Xo.row(g)).dot(dXo.row(g));
      for (int i = 0; i <= ncol; ++i) {
        const int ci = scheme.node_index(j, i) * d;
        for (int a = 0; a < d; ++a)
          trip.emplace_back(rp, ci + a, h * scheme.weights[g] * scheme.P(g, i) * dXo(g, a));
      }
    }
  }
  res[rp] = ph;

  // closing row
  const int ra = rp + 1;
  if (tangent != nullptr) {
    res[ra] = scheme.wdot(W - *Wpred, *tangent);
    const double wU = 1.0 / scheme.nnode();
    for (int i = 0; i < nu; ++i)
      if ((*tangent)[i] != 0.0) trip.emplace_back(ra, i, wU * (*tangent)[i]);
    trip.emplace_back(ra, nu, (*tangent)[nu]);
    trip.emplace_back(ra, nu + 1, (*tangent)[nu + 1]);
  } else {
    res[ra] = 0.0;
    trip.emplace_back(ra, nu + 1, 1.0);
  }

  J.resize(nw, nw);
  J.setFromTriplets(trip.begin(), trip.end());
}

Vec bvp_residual(const CollocationScheme& scheme, const ReducedSystem& sys,
                 const OrbitSegment& orbit, const Vec& uold) {
  Vec res;
  SpMat J;
  const Vec W = pack_state(orbit, FreeParam::delta);
  bvp_system(scheme, sys, W, uold, orbit.windings, FreeParam::delta, orbit.r, nullptr, nullptr,
             res, J);
  return res.head(scheme.nw() - 1);  // drop the closing row
}

OrbitSegment newton_correct(const CollocationScheme& scheme, const ReducedSystem& sys,
                            const OrbitSegment& seed, const Vec& uold, double newton_tol,
                            int max_iter) {
  Vec W = pack_state(seed, FreeParam::delta);
  Vec res;
  SpMat J;
  Eigen::SparseLU<SpMat> lu;
  for (int it = 0; it < max_iter; ++it) {
    bvp_system(scheme, sys, W, uold, seed.windings, FreeParam::delta, seed.r, nullptr, nullptr,
               res, J);
    if (res.lpNorm<Eigen::Infinity>() < newton_tol)
      return unpack_state(scheme, W, seed.windings, FreeParam::delta, seed.r);
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw SingularJacobian("newton_correct: sparse LU factorization failed");
    W -= lu.solve(res);
  }
  bvp_system(scheme, sys, W, uold, seed.windings, FreeParam::delta, seed.r, nullptr, nullptr, res,
             J);
  if (res.lpNorm<Eigen::Infinity>() < 1e-8)
    return unpack_state(scheme, W, seed.windings, FreeParam::delta, seed.r);
  throw NoConvergence("newton_correct: no convergence after max_iter iterations");
}

bool newton_arclength(const CollocationScheme& scheme, const ReducedSystem& sys, Vec& W,
                      const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                      double other, const Vec& tangent, const Vec& Wpred, double newton_tol,
                      int max_iter) {
  Vec res;
  SpMat J;
  Eigen::SparseLU<SpMat> lu;
  for (int it = 0; it < max_iter; ++it) {
    bvp_system(scheme, sys, W, uold, windings, free, other, &tangent, &Wpred, res, J);
    if (res.lpNorm<Eigen::Infinity>() < newton_tol) return true;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return false;
    W -= lu.solve(res);
  }
  bvp_system(scheme, sys, W, uold, windings, free, other, &tangent, &Wpred, res, J);
  return res.lpNorm<Eigen::Infinity>() < 1e-8;
}

int jacobian_det_sign(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                      const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                      double other) {
  Vec res;
  SpMat J;
  bvp_system(scheme, sys, W, uold, windings, free, other, nullptr, nullptr, res, J);
  Eigen::SparseLU<SpMat> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success)
    throw SingularJacobian("jacobian_det_sign: factorization failed");
  return lu.signDeterminant() >= 0 ? 1 : -1;
}

}  // namespace phasetori
