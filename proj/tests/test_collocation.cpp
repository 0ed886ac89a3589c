#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "phasetori/continuation.hpp"

using namespace phasetori;

namespace {

ReducedSystem make_system(double beta = 0.0) {
  ReducedSystem sys;
  sys.pert.beta = beta;
  return sys;
}

OrbitSegment sdd_seed(const CollocationScheme& scheme, const ReducedSystem& sys, double angle,
                      double delta, double r) {
  PerturbParams q = sys.pert;
  q.delta = delta > 0 ? delta : 0.01;  // fixed-point classification needs delta > 0
  q.r = r;
  const auto pat = PatternSpec::from_word("SDD", sys.net);
  const auto sol = solve_first_order(pat, sys.net, q);
  const auto fps = sdd_fixed_points(q);
  const ReducedFixedPoint* pick = &fps[0];
  for (const auto& fp : fps)
    if (std::abs(fp.angle - angle) < 1e-9) pick = &fp;
  const auto seed = build_seed_orbit(sol, *pick, delta, scheme.nnode());
  return seed_segment(scheme, seed, delta, r);
}

}  // namespace

TEST_CASE("scheme construction") {
  const auto s = CollocationScheme::make(10, 4, 5);
  CHECK(s.nnode() == 41);
  CHECK(s.nu() == 205);
  CHECK(s.nodes.size() == 4);
  // Gauss-Legendre nodes on (0,1), symmetric, weights sum to one
  CHECK(s.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (int g = 0; g < 4; ++g)
    CHECK(s.nodes[g] + s.nodes[3 - g] == doctest::Approx(1.0).epsilon(1e-13));
  // degree-4 polynomial exactness of the quadrature (degree 2*ncol-1 = 7)
  double q = 0.0;
  for (int g = 0; g < 4; ++g) q += s.weights[g] * std::pow(s.nodes[g], 7);
  CHECK(q == doctest::Approx(1.0 / 8).epsilon(1e-13));
  // basis interpolation: P rows sum to 1, D rows sum to 0
  for (int g = 0; g < 4; ++g) {
    CHECK(s.P.row(g).sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(s.D.row(g).sum() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("reduced system lifts and differentiates consistently") {
  const auto sys = make_system();
  Vec x(5);
  x << 0.3, -1.2, 2.2, 0.4, 5.9;
  const Vec th = sys.lift(x);
  CHECK(th.size() == 6);
  CHECK(th[0] == 0.0);
  for (int i = 0; i < 5; ++i) CHECK(th[i + 1] == x[i]);

  const Mat J = sys.df(x, 0.03, 0.2);
  const double eps = 1e-6;
  for (int j = 0; j < 5; ++j) {
    Vec xp = x, xm = x;
    xp[j] += eps;
    xm[j] -= eps;
    const Vec col = (sys.f(xp, 0.03, 0.2) - sys.f(xm, 0.03, 0.2)) / (2 * eps);
    CHECK((J.col(j) - col).norm() < 1e-7);
  }
  for (const bool wrt_delta : {true, false}) {
    const Vec dl = sys.df_dlambda(x, 0.03, 0.2, wrt_delta);
    const double l0 = wrt_delta ? 0.03 : 0.2;
    Vec fp_, fm_;
    if (wrt_delta) {
      fp_ = sys.f(x, l0 + eps, 0.2);
      fm_ = sys.f(x, l0 - eps, 0.2);
    } else {
      fp_ = sys.f(x, 0.03, l0 + eps);
      fm_ = sys.f(x, 0.03, l0 - eps);
    }
    CHECK((dl - (fp_ - fm_) / (2 * eps)).norm() < 1e-7);
  }
}

TEST_CASE("unperturbed seed solves the collocation system exactly") {
  const auto sys = make_system();
  const auto scheme = CollocationScheme::make(20, 4, sys.dim());
  const auto seed = sdd_seed(scheme, sys, pi / 2, 0.0, 0.2);
  const Vec res = bvp_residual(scheme, sys, seed, seed.u);
  CHECK(res.lpNorm<Eigen::Infinity>() < 1e-11);
}

TEST_CASE("state packing roundtrip") {
  const auto sys = make_system();
  const auto scheme = CollocationScheme::make(8, 3, sys.dim());
  auto seed = sdd_seed(scheme, sys, pi / 2, 0.01, 0.2);
  const Vec W = pack_state(seed, FreeParam::delta);
  CHECK(W.size() == scheme.nw());
  CHECK(W[scheme.nu()] == seed.period);
  CHECK(W[scheme.nu() + 1] == seed.delta);
  const auto back = unpack_state(scheme, W, seed.windings, FreeParam::delta, seed.r);
  CHECK((back.u - seed.u).norm() == 0.0);
  CHECK(back.delta == seed.delta);
  CHECK(back.r == seed.r);
}

TEST_CASE("sparse bvp Jacobian matches finite differences") {
  const auto sys = make_system();
  const auto scheme = CollocationScheme::make(5, 3, sys.dim());
  auto seed = sdd_seed(scheme, sys, pi / 2, 0.01, 0.2);
  seed = newton_correct(scheme, sys, seed, seed.u);
  Vec W = pack_state(seed, FreeParam::delta);
  // nudge off the solution so nothing is accidentally zero
  for (int i = 0; i < W.size(); ++i) W[i] += 1e-3 * std::sin(3.7 * i);
  const Vec uold = seed.u;

  Vec tangent = Vec::Zero(scheme.nw());
  tangent[scheme.nw() - 1] = 1.0;
  const Vec Wpred = W;
  Vec res;
  SpMat J;
  bvp_system(scheme, sys, W, uold, seed.windings, FreeParam::delta, seed.r, &tangent, &Wpred, res,
             J);
  const Mat Jd = Mat(J);
  const double eps = 1e-7;
  for (int c = 0; c < scheme.nw(); ++c) {
    Vec Wp = W, Wm = W;
    Wp[c] += eps;
    Wm[c] -= eps;
    Vec rp, rm;
    SpMat Jt;
    bvp_system(scheme, sys, Wp, uold, seed.windings, FreeParam::delta, seed.r, &tangent, &Wpred,
               rp, Jt);
    bvp_system(scheme, sys, Wm, uold, seed.windings, FreeParam::delta, seed.r, &tangent, &Wpred,
               rm, Jt);
    CHECK((Jd.col(c) - (rp - rm) / (2 * eps)).lpNorm<Eigen::Infinity>() < 2e-6);
  }
}

TEST_CASE("newton correction converges and is idempotent") {
  const auto sys = make_system();
  const auto scheme = CollocationScheme::make(30, 4, sys.dim());
  auto seed = sdd_seed(scheme, sys, pi / 2, 0.01, 0.2);
  const auto orbit = newton_correct(scheme, sys, seed, seed.u);
  CHECK(bvp_residual(scheme, sys, orbit, seed.u).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(std::abs(orbit.period - pi) < 0.15);

  // correcting again from a perturbed copy returns the same orbit
  auto wobble = orbit;
  for (int i = 0; i < wobble.u.size(); ++i) wobble.u[i] += 1e-4 * std::cos(2.1 * i);
  const auto again = newton_correct(scheme, sys, wobble, orbit.u);
  CHECK((again.u - orbit.u).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(again.period == doctest::Approx(orbit.period).epsilon(1e-9));
}

TEST_CASE("period converges superlinearly under mesh refinement") {
  const auto sys = make_system();
  const double delta = 0.05;
  double T[3];
  int idx = 0;
  for (int ntst : {6, 12, 60}) {
    const auto scheme = CollocationScheme::make(ntst, 4, sys.dim());
    auto seed = sdd_seed(scheme, sys, pi / 2, delta, 0.2);
    T[idx++] = newton_correct(scheme, sys, seed, seed.u).period;
  }
  const double e0 = std::abs(T[0] - T[2]);
  const double e1 = std::abs(T[1] - T[2]);
  CHECK(e1 < e0);
  CHECK(e1 < 1e-9);
}

TEST_CASE("det sign of the bordered Jacobian is stable under small changes") {
  const auto sys = make_system();
  const auto scheme = CollocationScheme::make(20, 4, sys.dim());
  auto seed = sdd_seed(scheme, sys, pi / 2, 0.01, 0.2);
  const auto orbit = newton_correct(scheme, sys, seed, seed.u);
  const Vec W = pack_state(orbit, FreeParam::delta);
  const int s0 =
      jacobian_det_sign(scheme, sys, W, orbit.u, orbit.windings, FreeParam::delta, orbit.r);
  CHECK((s0 == 1 || s0 == -1));
  Vec W2 = W;
  W2[scheme.nu() + 1] += 1e-4;
  const int s1 =
      jacobian_det_sign(scheme, sys, W2, orbit.u, orbit.windings, FreeParam::delta, orbit.r);
  CHECK(s0 == s1);
}
