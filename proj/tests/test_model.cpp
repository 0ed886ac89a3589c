#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "phasetori/model.hpp"

using namespace phasetori;

namespace {

Vec random_theta(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 2 * pi);
  Vec th(n);
  for (int i = 0; i < n; ++i) th[i] = dist(rng);
  return th;
}

}  // namespace

TEST_CASE("parameter validation") {
  NetworkParams p;
  CHECK_NOTHROW(p.validate());
  p.n = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  PerturbParams q;
  CHECK_NOTHROW(q.validate());
  q.r = -1.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("coupling function derivatives match finite differences") {
  NetworkParams p;
  PerturbParams q;
  const double eps = 1e-6;
  for (double phi : {0.3, 1.7, 4.1}) {
    CHECK(dg2(phi, p) == doctest::Approx((g2(phi + eps, p) - g2(phi - eps, p)) / (2 * eps))
                             .epsilon(1e-8));
    CHECK(dg4(phi, p) == doctest::Approx((g4(phi + eps, p) - g4(phi - eps, p)) / (2 * eps))
                             .epsilon(1e-8));
    CHECK(dhpert(phi, q) ==
          doctest::Approx((hpert(phi + eps, q) - hpert(phi - eps, q)) / (2 * eps)).epsilon(1e-8));
  }
}

TEST_CASE("global phase-shift invariance of H") {
  NetworkParams p;
  std::mt19937 rng(7);
  const Vec th = random_theta(rng, p.size());
  const Vec shifted = th.array() + 0.83;
  CHECK((eval_unperturbed(th, p) - eval_unperturbed(shifted, p)).norm() < 1e-13);
}

TEST_CASE("per-population phase shifts leave H invariant") {
  // T^m equivariance: independent constant shift of each population
  NetworkParams p;
  std::mt19937 rng(8);
  const Vec th = random_theta(rng, p.size());
  Vec shifted = th;
  const double c[3] = {0.3, -1.1, 2.5};
  for (int s = 0; s < p.m; ++s)
    for (int k = 0; k < p.n; ++k) shifted[p.idx(s, k)] += c[s];
  CHECK((eval_unperturbed(th, p) - eval_unperturbed(shifted, p)).norm() < 1e-13);
}

TEST_CASE("perturbation breaks T^3 but keeps the diagonal T^1") {
  NetworkParams p;
  PerturbParams q;
  std::mt19937 rng(9);
  const Vec th = random_theta(rng, p.size());
  const Vec diag = th.array() + 1.234;
  CHECK((eval_perturbation(th, q) - eval_perturbation(diag, q)).norm() < 1e-13);
  Vec popshift = th;
  for (int k = 0; k < p.n; ++k) popshift[p.idx(1, k)] += 0.9;
  CHECK((eval_perturbation(th, q) - eval_perturbation(popshift, q)).norm() > 1e-3);
}

TEST_CASE("within-population permutation equivariance") {
  NetworkParams p;
  PerturbParams q;
  q.delta = 0.02;
  std::mt19937 rng(10);
  const Vec th = random_theta(rng, p.size());
  // swap the two oscillators of population 1
  Vec perm = th;
  std::swap(perm[p.idx(1, 0)], perm[p.idx(1, 1)]);
  const Vec f = eval_full(th, p, q);
  Vec fp = eval_full(perm, p, q);
  std::swap(fp[p.idx(1, 0)], fp[p.idx(1, 1)]);
  CHECK((f - fp).norm() < 1e-13);
}

TEST_CASE("cyclic population relabeling equivariance (K- = K+)") {
  NetworkParams p;
  PerturbParams q;
  q.delta = 0.015;
  REQUIRE(p.k_minus == p.k_plus);
  std::mt19937 rng(11);
  const Vec th = random_theta(rng, p.size());
  Vec rot(p.size());
  for (int s = 0; s < p.m; ++s)
    for (int k = 0; k < p.n; ++k) rot[p.idx((s + 1) % p.m, k)] = th[p.idx(s, k)];
  const Vec f = eval_full(th, p, q);
  const Vec fr = eval_full(rot, p, q);
  for (int s = 0; s < p.m; ++s)
    for (int k = 0; k < p.n; ++k)
      CHECK(fr[p.idx((s + 1) % p.m, k)] == doctest::Approx(f[p.idx(s, k)]).epsilon(1e-12));
}

TEST_CASE("perturbation sums h over every ordered pair including self") {
  NetworkParams p;
  PerturbParams q;
  const Vec th = Vec::Zero(p.size());
  const Vec z = eval_perturbation(th, q);
  for (int i = 0; i < p.size(); ++i)
    CHECK(z[i] == doctest::Approx(p.size() * hpert(0.0, q)).epsilon(1e-14));
}

TEST_CASE("analytic Jacobians match finite differences") {
  NetworkParams p;
  PerturbParams q;
  q.delta = 0.03;
  std::mt19937 rng(12);
  const Vec th = random_theta(rng, p.size());
  const Mat J = jacobian_full(th, p, q);
  const double eps = 1e-6;
  for (int j = 0; j < p.size(); ++j) {
    Vec tp = th, tm = th;
    tp[j] += eps;
    tm[j] -= eps;
    const Vec col = (eval_full(tp, p, q) - eval_full(tm, p, q)) / (2 * eps);
    CHECK((J.col(j) - col).norm() < 1e-7);
  }
}

TEST_CASE("row sums of the unperturbed Jacobian vanish") {
  // consequence of phase-shift invariance
  NetworkParams p;
  std::mt19937 rng(13);
  const Vec th = random_theta(rng, p.size());
  const Mat J = jacobian_unperturbed(th, p);
  CHECK((J * Vec::Ones(p.size())).norm() < 1e-13);
}
