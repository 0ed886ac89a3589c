#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "phasetori/frame.hpp"

using namespace phasetori;

TEST_CASE("pattern parsing") {
  NetworkParams p;
  const auto sdd = PatternSpec::from_word("SDD", p);
  CHECK(sdd.base_point.size() == 6);
  CHECK(sdd.base_point[0] == 0.0);
  CHECK(sdd.base_point[3] == doctest::Approx(pi));
  CHECK(sdd.base_point[5] == doctest::Approx(pi));
  CHECK_THROWS_AS(PatternSpec::from_word("SXD", p), std::invalid_argument);
  CHECK_THROWS_AS(PatternSpec::from_word("SD", p), std::invalid_argument);
}

TEST_CASE("SDD frame data") {
  NetworkParams p;
  const auto pat = PatternSpec::from_word("SDD", p);
  const auto fr = build_frame(pat, p);
  Vec omega_ref(3);
  omega_ref << 0, -2, -2;
  CHECK((fr.Omega - omega_ref).lpNorm<Eigen::Infinity>() < 1e-12);
  Mat L_ref = Mat::Zero(3, 3);
  L_ref.diagonal() << -0.4, 0.4, -1.2;
  CHECK((fr.L - L_ref).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("SSD frame data") {
  NetworkParams p;
  const auto pat = PatternSpec::from_word("SSD", p);
  const auto fr = build_frame(pat, p);
  Vec omega_ref(3);
  omega_ref << 0, 0, -2;
  CHECK((fr.Omega - omega_ref).lpNorm<Eigen::Infinity>() < 1e-12);
  Mat L_ref = Mat::Zero(3, 3);
  L_ref.diagonal() << 0.4, -1.2, -0.4;
  CHECK((fr.L - L_ref).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("frame algebra") {
  NetworkParams p;
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto fr = build_frame(pat, p);
    CHECK((fr.Rplus * fr.R - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((fr.Nplus * fr.N - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((fr.pi * fr.R - fr.R).norm() < 1e-12);
    CHECK((fr.pi * fr.N).norm() < 1e-12);
    CHECK((fr.pi * fr.pi - fr.pi).norm() < 1e-12);
    CHECK((fr.Rplus * fr.N).norm() < 1e-12);
    CHECK((fr.Nplus * fr.R).norm() < 1e-12);
  }
}

TEST_CASE("base torus is a relative equilibrium with drift Omega") {
  NetworkParams p;
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> dist(0.0, 2 * pi);
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto fr = build_frame(pat, p);
    for (int t = 0; t < 5; ++t) {
      Vec phi(3);
      phi << dist(rng), dist(rng), dist(rng);
      const Vec E = embed_unperturbed(pat, p, phi);
      CHECK((eval_unperturbed(E, p) - fr.R * fr.Omega).norm() < 1e-12);
    }
  }
}

TEST_CASE("normal linearization commutes onto L") {
  NetworkParams p;
  for (const char* word : {"SDD", "SSD"}) {
    CAPTURE(word);
    const auto pat = PatternSpec::from_word(word, p);
    const auto fr = build_frame(pat, p);
    const Mat DH = jacobian_unperturbed(pat.base_point, p);
    CHECK((DH * fr.N - fr.N * fr.L).norm() < 1e-10);
    CHECK((DH * fr.R).norm() < 1e-10);
  }
}

TEST_CASE("fully synchronous word at default parameters") {
  NetworkParams p;
  const auto fr = build_frame(PatternSpec::from_word("SSS", p), p);
  CHECK(fr.Omega.norm() < 1e-12);
  CHECK((fr.L + 0.4 * Mat::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("loss of normal hyperbolicity is detected") {
  NetworkParams p;
  p.r0 = 0.0;  // the splay transverse exponents vanish with the second harmonic
  const auto pat = PatternSpec::from_word("SDD", p);
  CHECK_THROWS_AS(build_frame(pat, p), NotNormallyHyperbolic);
}
