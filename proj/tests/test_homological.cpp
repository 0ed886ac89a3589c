#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phasetori/homological.hpp"

using namespace phasetori;

namespace {

NetworkParams net() { return {}; }
PerturbParams pert() { return {}; }

double map_discrepancy(const FourierMap& a, const FourierMap& b) {
  double worst = 0.0;
  for (const auto& [l, v] : a.coeffs()) worst = std::max(worst, (v - b.coeff(l)).norm());
  for (const auto& [l, v] : b.coeffs()) worst = std::max(worst, (v - a.coeff(l)).norm());
  return worst;
}

}  // namespace

TEST_CASE("analytic and grid-sampled G1 agree") {
  const auto p = net();
  const auto q = pert();
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto ga = compute_G1_analytic(pat, p, q);
    const auto gn = compute_G1_numeric(pat, p, q);
    CHECK(map_discrepancy(ga, gn) < 1e-12);
  }
}

TEST_CASE("homological identities hold mode by mode") {
  const auto p = net();
  const auto q = pert();
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto fr = build_frame(pat, p);
    const auto G1 = compute_G1_analytic(pat, p, q);
    const auto [U1, V1] = split_rhs(G1, fr);
    const auto Y1 = solve_normal(V1, fr);
    const auto [X1, f1] = solve_tangential(U1, fr);

    // normal: (i<Omega,l> I - L) Y_l = V_l for all modes of V1
    for (const auto& [l, v] : V1.coeffs()) {
      double lw = 0.0;
      for (int i = 0; i < 3; ++i) lw += fr.Omega[i] * l[i];
      const Eigen::MatrixXcd A =
          cplx(0.0, lw) * Eigen::MatrixXcd::Identity(3, 3) - fr.L.cast<cplx>();
      CHECK((A * Y1.coeff(l) - v).norm() < 1e-12);
    }
    // tangential: i<Omega,l> X_l = U_l off resonance, f1 = resonant part
    for (const auto& [l, u] : U1.coeffs()) {
      double lw = 0.0;
      for (int i = 0; i < 3; ++i) lw += fr.Omega[i] * l[i];
      if (std::abs(lw) < default_resonance_tol) {
        CHECK((f1.coeff(l) - u).norm() < 1e-13);
        CHECK(X1.coeff(l).norm() == 0.0);
      } else {
        CHECK((cplx(0.0, lw) * X1.coeff(l) - u).norm() < 1e-12);
        CHECK(f1.coeff(l).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("generic solver equals the closed forms pointwise") {
  const auto p = net();
  const auto q = pert();
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto gen = solve_first_order(pat, p, q);
    const auto cf = closed_form_solution(pat, p, q);
    CHECK(map_discrepancy(gen.f1, cf.f1) < 1e-10);
    CHECK(map_discrepancy(gen.X1, cf.X1) < 1e-10);
    CHECK(map_discrepancy(gen.Y1, cf.Y1) < 1e-10);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          Vec phi(3);
          phi << pi * a / 2, pi * b / 2, pi * c / 2;
          CHECK((gen.embedding_eval(phi, 0.01, false) - cf.embedding_eval(phi, 0.01, false))
                    .norm() < 1e-10);
          CHECK((gen.reduced_vf_eval(phi, 0.01) - cf.reduced_vf_eval(phi, 0.01)).norm() < 1e-10);
        }
  }
}

TEST_CASE("SDD normal form carries only second harmonics of the slow angle") {
  const auto p = net();
  const auto q = pert();
  const auto pat = PatternSpec::from_word("SDD", p);
  const auto sol = solve_first_order(pat, p, q);
  for (const auto& [l, v] : sol.f1.coeffs()) {
    const bool constant = (l[0] == 0 && l[1] == 0 && l[2] == 0);
    const bool second = (l[0] == 0 && std::abs(l[1]) == 2 && l[1] == -l[2]);
    CHECK((constant || second));
  }
}

TEST_CASE("SSD normal form carries first and second harmonics") {
  const auto p = net();
  const auto q = pert();
  const auto pat = PatternSpec::from_word("SSD", p);
  const auto sol = solve_first_order(pat, p, q);
  bool has_first = false, has_second = false;
  for (const auto& [l, v] : sol.f1.coeffs()) {
    const int h = std::abs(l[0]);
    if (h == 1 && v.norm() > 1e-12) has_first = true;
    if (h == 2 && v.norm() > 1e-12) has_second = true;
  }
  CHECK(has_first);
  CHECK(has_second);
}

TEST_CASE("conjugacy residual scales quadratically in delta") {
  const auto p = net();
  const auto q = pert();
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto sol = solve_first_order(pat, p, q);
    double res[2] = {0.0, 0.0};
    const double deltas[2] = {0.01, 0.02};
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
          for (int c = 0; c < 5; ++c) {
            Vec phi(3);
            phi << 2 * pi * a / 5, 2 * pi * b / 5, 2 * pi * c / 5;
            res[s] = std::max(res[s], sol.conjugacy_residual(phi, deltas[s]));
          }
    const double ratio = res[1] / res[0];
    CHECK(ratio > 3.6);
    CHECK(ratio < 4.4);
  }
}

TEST_CASE("dropping the first-order correction degrades the residual to O(delta)") {
  const auto p = net();
  const auto q = pert();
  const auto pat = PatternSpec::from_word("SDD", p);
  auto sol = solve_first_order(pat, p, q);
  auto zeroth = sol;
  zeroth.X1 = FourierMap(3, 3);
  zeroth.Y1 = FourierMap(3, 3);
  Vec phi(3);
  phi << 0.7, 2.1, 4.4;
  const double with = sol.conjugacy_residual(phi, 0.01);
  const double without = zeroth.conjugacy_residual(phi, 0.01);
  CHECK(without > 10 * with);
}

TEST_CASE("grid sampler rejects series that overflow the mode cutoff") {
  const auto p = net();
  auto q = pert();
  const auto pat = PatternSpec::from_word("SDD", p);
  CHECK_THROWS_AS(compute_G1_numeric(pat, p, q, 1), LmaxOverflow);
}
