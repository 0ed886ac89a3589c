#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phasetori/fourier.hpp"
#include "phasetori/model.hpp"

using namespace phasetori;

TEST_CASE("real pair evaluates to a cosine") {
  FourierMap f(3, 2);
  f.add_real_pair({1, -1, 0}, 0, 0.7, 0.3);
  Vec phi(3);
  phi << 0.4, 1.9, 5.0;
  const Vec v = f.eval(phi);
  CHECK(v[0] == doctest::Approx(2 * 0.7 * std::cos(phi[0] - phi[1] + 0.3)).epsilon(1e-14));
  CHECK(v[1] == 0.0);
  CHECK(f.max_reality_violation() < 1e-15);
}

TEST_CASE("coefficients accumulate") {
  FourierMap f(2, 1);
  VecC a(1), b(1);
  a << cplx(1.0, 2.0);
  b << cplx(0.5, -1.0);
  f.add({1, 0}, a);
  f.add({1, 0}, b);
  CHECK(std::abs(f.coeff({1, 0})[0] - cplx(1.5, 1.0)) < 1e-15);
  CHECK(f.coeff({0, 1})[0] == cplx(0.0, 0.0));
}

TEST_CASE("jacobian matches finite differences") {
  FourierMap f(3, 2);
  f.add_real_pair({1, 0, -2}, 0, 0.4, 1.1);
  f.add_real_pair({0, 2, 0}, 1, 0.9, -0.5);
  f.add_real_pair({1, 1, 1}, 1, 0.2, 0.0);
  Vec phi(3);
  phi << 2.2, 0.1, 3.9;
  const Mat J = f.eval_jacobian(phi);
  const double eps = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vec pp = phi, pm = phi;
    pp[j] += eps;
    pm[j] -= eps;
    const Vec col = (f.eval(pp) - f.eval(pm)) / (2 * eps);
    CHECK((J.col(j) - col).norm() < 1e-8);
  }
}

TEST_CASE("directional derivative equals chain rule along constant flow") {
  FourierMap f(3, 1);
  f.add_real_pair({2, -1, 0}, 0, 0.8, 0.6);
  Vec Omega(3);
  Omega << 0.0, -2.0, -2.0;
  const FourierMap df = f.directional_derivative(Omega);
  Vec phi(3);
  phi << 1.0, 2.0, 3.0;
  const double eps = 1e-6;
  const Vec fwd = f.eval(phi + eps * Omega);
  const Vec bwd = f.eval(phi - eps * Omega);
  CHECK(df.eval(phi)[0] == doctest::Approx((fwd[0] - bwd[0]) / (2 * eps)).epsilon(1e-8));
}

TEST_CASE("prune removes negligible modes") {
  FourierMap f(2, 1);
  f.add_real_pair({1, 0}, 0, 1.0, 0.0);
  f.add_real_pair({0, 1}, 0, 1e-16, 0.0);
  f.prune(1e-14);
  CHECK(f.coeffs().size() == 2);  // the pair at +-(1,0)
  CHECK(!f.has({0, 1}));
}

TEST_CASE("json roundtrip is exact") {
  FourierMap f(3, 4);
  f.add_real_pair({1, -1, 0}, 2, 0.123456789012345, 0.9876);
  f.add_real_pair({0, 2, -2}, 0, 3.14e-3, -2.5);
  const auto j = f.to_json();
  const FourierMap g = FourierMap::from_json(j);
  CHECK(g.dim_domain() == 3);
  CHECK(g.dim_range() == 4);
  REQUIRE(g.coeffs().size() == f.coeffs().size());
  for (const auto& [l, v] : f.coeffs()) CHECK((g.coeff(l) - v).norm() == 0.0);
}

TEST_CASE("eval rejects non-real results") {
  FourierMap f(2, 1);
  VecC a(1);
  a << cplx(0.0, 1.0);
  f.add({1, 0}, a);  // no conjugate partner
  Vec phi(2);
  phi << 0.0, 0.0;
  CHECK_THROWS(f.eval(phi));
  CHECK(f.max_reality_violation() > 0.5);
}
