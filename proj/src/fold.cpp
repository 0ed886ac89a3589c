#include "phasetori/fold.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace phasetori {

namespace {

// Extended state layout: [x (N = nu+1: u,T) | v (N) | delta | r].
struct ExtendedOps {
  const CollocationScheme& scheme;
  const ReducedSystem& sys;
  Eigen::VectorXi windings;
  int N;

  ExtendedOps(const CollocationScheme& sch, const ReducedSystem& s, Eigen::VectorXi w)
      : scheme(sch), sys(s), windings(std::move(w)), N(sch.nu() + 1) {}

  // Assembles G (N), G_x (N x N triplets), G_delta, G_r (N each) at x.
  void base_system(const Vec& x, const Vec& uold, double delta, double r, Vec& G,
                   std::vector<Eigen::Triplet<double>>& trip, Vec& Gd, Vec& Gr) const {
    Vec W(scheme.nw());
    W.head(N) = x;
    W[N] = delta;
    Vec res;
    SpMat J;
    bvp_system(scheme, sys, W, uold, windings, FreeParam::delta, r, nullptr, nullptr, res, J);
    G = res.head(N);
    Gd = Vec(J.col(N).head(N));
    trip.clear();
    for (int c = 0; c < N; ++c)
      for (SpMat::InnerIterator it(J, c); it; ++it)
        if (it.row() < N) trip.emplace_back(int(it.row()), c, it.value());
    // dG/dr: only the collocation rows depend on r
    Gr = Vec::Zero(N);
    const int ncol = scheme.ncol, d = scheme.dim;
    const double T = x[scheme.nu()];
    for (int j = 0; j < scheme.ntst; ++j) {
      Mat ul(ncol + 1, d);
      for (int i = 0; i <= ncol; ++i)
        ul.row(i) = x.segment(scheme.node_index(j, i) * d, d).transpose();
      const Mat Xc = scheme.P * ul;
      for (int g = 0; g < ncol; ++g) {
        const Vec dFr = sys.df_dlambda(Xc.row(g).transpose(), delta, r, /*wrt_delta=*/false);
        Gr.segment((j * ncol + g) * d, d) = -T * dFr;
      }
    }
  }

  // Directional-derivative blocks of G_x v: B = d(G_x v)/dx (triplets),
  // plus d(G_x v)/d delta and /d r (vectors). Only collocation rows contribute.
  void hessian_blocks(const Vec& x, const Vec& v, double delta, double r,
                      std::vector<Eigen::Triplet<double>>& Btrip, Vec& Bd, Vec& Br) const {
    const int ncol = scheme.ncol, d = scheme.dim;
    const double T = x[scheme.nu()];
    const double vT = v[scheme.nu()];
    const double eps = 1e-6;
    Btrip.clear();
    Bd = Vec::Zero(N);
    Br = Vec::Zero(N);
    for (int j = 0; j < scheme.ntst; ++j) {
      Mat ul(ncol + 1, d), vl(ncol + 1, d);
      for (int i = 0; i <= ncol; ++i) {
        ul.row(i) = x.segment(scheme.node_index(j, i) * d, d).transpose();
        vl.row(i) = v.segment(scheme.node_index(j, i) * d, d).transpose();
      }
      const Mat Xc = scheme.P * ul;
      const Mat Vc = scheme.P * vl;
      for (int g = 0; g < ncol; ++g) {
        const Vec xg = Xc.row(g).transpose();
        const Vec Vg = Vc.row(g).transpose();
        const Mat Jg = sys.df(xg, delta, r);
        const Vec Fg = sys.f(xg, delta, r);
        const int rr0 = (j * ncol + g) * d;
        // d(G_x v)/dT = -Jg Vg  (the -v_T Fg part differentiates to 0 in T)
        const Vec JV = Jg * Vg;
        for (int a = 0; a < d; ++a) Btrip.emplace_back(rr0 + a, scheme.nu(), -JV[a]);
        // second derivative of F contracted with Vg, by FD on the Jacobian
        for (int bp = 0; bp < d; ++bp) {
          Vec xp = xg, xm = xg;
          xp[bp] += eps;
          xm[bp] -= eps;
          const Mat Hcol = (sys.df(xp, delta, r) - sys.df(xm, delta, r)) / (2 * eps);
          const Vec HV = Hcol * Vg;  // (a) -> sum_b H(a,b,bp) Vg_b
          const Vec Jcol_bp = Jg.col(bp);
          for (int i = 0; i <= ncol; ++i) {
            const int ci = scheme.node_index(j, i) * d + bp;
            for (int a = 0; a < d; ++a) {
              const double val = -T * scheme.P(g, i) * HV[a] - vT * scheme.P(g, i) * Jg(a, bp);
              if (val != 0.0) Btrip.emplace_back(rr0 + a, ci, val);
            }
          }
          (void)Jcol_bp;
        }
        // parameter derivatives of G_x v
        const Mat dJd = (sys.df(xg, delta + eps, r) - sys.df(xg, delta - eps, r)) / (2 * eps);
        const Mat dJr = (sys.df(xg, delta, r + eps) - sys.df(xg, delta, r - eps)) / (2 * eps);
        const Vec dFd = sys.df_dlambda(xg, delta, r, true);
        const Vec dFr = sys.df_dlambda(xg, delta, r, false);
        Bd.segment(rr0, d) = -T * (dJd * Vg) - vT * dFd;
        Br.segment(rr0, d) = -T * (dJr * Vg) - vT * dFr;
      }
    }
  }

  double wdotN(const Vec& a, const Vec& b) const {
    return a.head(scheme.nu()).dot(b.head(scheme.nu())) / scheme.nnode() +
           a[scheme.nu()] * b[scheme.nu()];
  }
};

}  // namespace

FoldCurve continue_fold(const CollocationScheme& scheme, const ReducedSystem& sys,
                        const OrbitSegment& fold_orbit, const FoldSettings& st) {
  const int nu = scheme.nu();
  const int N = nu + 1;
  const int NE = 2 * N + 2;
  ExtendedOps ops(scheme, sys, fold_orbit.windings);

  Vec X(NE);
  X.head(nu) = fold_orbit.u;
  X[nu] = fold_orbit.period;
  X[NE - 2] = fold_orbit.delta;
  X[NE - 1] = fold_orbit.r;
  Vec uold = fold_orbit.u;

  // initial null vector of G_x by inverse iteration
  {
    Vec G, Gd, Gr;
    std::vector<Eigen::Triplet<double>> trip;
    ops.base_system(X.head(N), uold, X[NE - 2], X[NE - 1], G, trip, Gd, Gr);
    SpMat Gx(N, N);
    Gx.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(Gx);
    if (lu.info() != Eigen::Success)
      throw ExtendedSingular("continue_fold: cannot factor G_x at the seed fold");
    Vec v = Vec::Ones(N);
    for (int it = 0; it < 10; ++it) {
      Vec w = lu.solve(v);
      const double n = std::sqrt(ops.wdotN(w, w));
      if (!std::isfinite(n) || n == 0.0)
        throw ExtendedSingular("continue_fold: inverse iteration failed");
      v = w / n;
    }
    X.segment(N, N) = v;
  }
  Vec cvec = X.segment(N, N);  // normalization reference

  auto assemble = [&](const Vec& Xe, const Vec& uref, const Vec* tangent, const Vec* Xpred,
                      Vec& res, SpMat& J) {
    const Vec x = Xe.head(N);
    const Vec v = Xe.segment(N, N);
    const double delta = Xe[NE - 2], r = Xe[NE - 1];
    Vec G, Gd, Gr, Bd, Br;
    std::vector<Eigen::Triplet<double>> gxt, bt;
    ops.base_system(x, uref, delta, r, G, gxt, Gd, Gr);
    ops.hessian_blocks(x, v, delta, r, bt, Bd, Br);

    res.setZero(NE);
    res.head(N) = G;
    // G_x v
    Vec Gxv = Vec::Zero(N);
    for (const auto& t : gxt) Gxv[t.row()] += t.value() * v[t.col()];
    res.segment(N, N) = Gxv;
    res[2 * N] = ops.wdotN(cvec, v) - 1.0;
    if (tangent != nullptr) {
      const Vec dX = Xe - *Xpred;
      res[2 * N + 1] = ops.wdotN(dX.head(N), tangent->head(N)) +
                       dX[NE - 2] * (*tangent)[NE - 2] + dX[NE - 1] * (*tangent)[NE - 1];
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * gxt.size() + bt.size() + 4 * N + 8);
    for (const auto& t : gxt) {
      trip.emplace_back(t.row(), t.col(), t.value());                // G_x
      trip.emplace_back(N + t.row(), N + t.col(), t.value());        // G_x in the v rows
    }
    for (const auto& t : bt) trip.emplace_back(N + t.row(), t.col(), t.value());
    for (int i = 0; i < N; ++i) {
      if (Gd[i] != 0.0) trip.emplace_back(i, NE - 2, Gd[i]);
      if (Gr[i] != 0.0) trip.emplace_back(i, NE - 1, Gr[i]);
      if (Bd[i] != 0.0) trip.emplace_back(N + i, NE - 2, Bd[i]);
      if (Br[i] != 0.0) trip.emplace_back(N + i, NE - 1, Br[i]);
    }
    const double wU = 1.0 / scheme.nnode();
    for (int i = 0; i < N; ++i) {
      const double w = (i < nu) ? wU : 1.0;
      if (cvec[i] != 0.0) trip.emplace_back(2 * N, N + i, w * cvec[i]);
      if (tangent != nullptr && (*tangent)[i] != 0.0)
        trip.emplace_back(2 * N + 1, i, w * (*tangent)[i]);
    }
    if (tangent != nullptr) {
      trip.emplace_back(2 * N + 1, NE - 2, (*tangent)[NE - 2]);
      trip.emplace_back(2 * N + 1, NE - 1, (*tangent)[NE - 1]);
    } else {
      trip.emplace_back(2 * N + 1, NE - 2, 1.0);  // pin delta when no tangent
    }
    J.resize(NE, NE);
    J.setFromTriplets(trip.begin(), trip.end());
  };

  auto newton_ext = [&](Vec& Xe, const Vec& uref, const Vec* tangent, const Vec* Xpred) {
    Vec res;
    SpMat J;
    Eigen::SparseLU<SpMat> lu;
    for (int it = 0; it < 10; ++it) {
      assemble(Xe, uref, tangent, Xpred, res, J);
      if (res.lpNorm<Eigen::Infinity>() < st.newton_tol) return true;
      lu.compute(J);
      if (lu.info() != Eigen::Success) return false;
      Xe -= lu.solve(res);
    }
    assemble(Xe, uref, tangent, Xpred, res, J);
    return res.lpNorm<Eigen::Infinity>() < 1e-7;
  };

  auto wnorm_ext = [&](const Vec& a) {
    return std::sqrt(ops.wdotN(a.head(N), a.head(N)) + a[NE - 2] * a[NE - 2] +
                     a[NE - 1] * a[NE - 1]);
  };

  FoldCurve curve;
  // converge the extended system at the seed (delta pinned); if the solution
  // jumps to the mirrored sheet (r -> -r is the beta + pi/2 system), retry
  // with the opposite null-vector orientation to stay on the caller's sheet
  const Vec X0 = X;
  if (!newton_ext(X, uold, nullptr, nullptr))
    throw ExtendedSingular("continue_fold: extended system did not converge at the seed");
  if (fold_orbit.r != 0.0 && X[NE - 1] * fold_orbit.r < 0) {
    Vec Xalt = X0;
    Xalt.segment(N, N) = -X0.segment(N, N);
    cvec = Xalt.segment(N, N);
    if (newton_ext(Xalt, uold, nullptr, nullptr) && Xalt[NE - 1] * fold_orbit.r > 0)
      X = Xalt;
    else
      cvec = X0.segment(N, N);
  }
  cvec = X.segment(N, N);
  curve.points.push_back({X[NE - 2], X[NE - 1], X[nu]});

  Vec tangent = Vec::Zero(NE);
  tangent[NE - 2] = st.initial_direction;
  double ds = std::min(st.ds0, std::max(0.4 * std::abs(X[NE - 1]), 10 * st.dsmin));
  curve.termination = "steps";
  Vec prev_par_tan = Vec::Zero(2);

  for (int step = 0; step < st.max_steps; ++step) {
    Vec Xpred = X + ds * tangent;
    Vec Xn = Xpred;
    if (!newton_ext(Xn, uold, &tangent, &Xpred)) {
      ds *= 0.5;
      if (ds < st.dsmin) {
        curve.termination = "underflow";
        break;
      }
      continue;
    }
    Vec t = Xn - X;
    const double n = wnorm_ext(t);
    t /= n;
    if (ops.wdotN(t.head(N), tangent.head(N)) + t[NE - 2] * tangent[NE - 2] +
            t[NE - 1] * tangent[NE - 1] <
        0)
      t = -t;
    // cusp: reversal of the parameter-plane tangent
    Vec par_tan(2);
    par_tan << Xn[NE - 1] - X[NE - 1], Xn[NE - 2] - X[NE - 2];
    if (par_tan.norm() > 0) par_tan.normalize();
    if (step > 0 && prev_par_tan.dot(par_tan) < -0.2)
      curve.cusp_indices.push_back(int(curve.points.size()) - 1);
    prev_par_tan = par_tan;

    X = Xn;
    tangent = t;
    uold = X.head(nu);
    cvec = X.segment(N, N);
    const double nv = std::sqrt(ops.wdotN(cvec, cvec));
    cvec /= nv;
    X.segment(N, N) /= nv;
    curve.points.push_back({X[NE - 2], X[NE - 1], X[nu]});
    ds = std::min(ds * 1.4, st.dsmax);
    ds = std::min(ds, std::max(0.4 * std::abs(X[NE - 1]), 10 * st.dsmin));
    // r bounds on |r|: the -r sheet is the beta + pi/2 mirror of the +r one
    if (X[NE - 2] < st.delta_min || X[NE - 2] > st.delta_max ||
        std::abs(X[NE - 1]) < st.r_min || std::abs(X[NE - 1]) > st.r_max) {
      curve.termination = "range";
      break;
    }
  }
  return curve;
}

}  // namespace phasetori
