#pragma once

#include <stdexcept>

#include "phasetori/fourier.hpp"
#include "phasetori/frame.hpp"
#include "phasetori/model.hpp"

namespace phasetori {

struct NearSingularResolvent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SmallDivisor : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LmaxOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double default_resonance_tol = 1e-9;
inline constexpr int default_lmax = 4;

// First-order data of the perturbed torus: embedding correction
// e1 = R X1 + N Y1 and normal-form reduced field f_delta = Omega + delta f1.
struct FirstOrderSolution {
  PatternSpec pattern;
  NetworkParams net;
  PerturbParams pert;
  SymmetryFrame frame;
  FourierMap X1;  // T^m -> R^m, nonresonant modes only
  FourierMap Y1;  // T^m -> R^{m(n-1)}
  FourierMap f1;  // T^m -> R^m, resonant modes only
  double resonance_tol = default_resonance_tol;

  // e_delta(phi) = E(phi) + delta*(R X1(phi) + N Y1(phi)), reduced mod 2*pi
  // unless wrap=false.
  Vec embedding_eval(const Vec& phi, double delta, bool wrap = true) const;
  // f_delta(phi) = Omega + delta f1(phi).
  Vec reduced_vf_eval(const Vec& phi, double delta) const;
  // |De_delta(phi) f_delta(phi) - F(e_delta(phi))|_2.
  double conjugacy_residual(const Vec& phi, double delta) const;
};

// G1 = Z o E as an exact sparse Fourier series; analytic expansion of the
// biharmonic h over the embedding.
FourierMap compute_G1_analytic(const PatternSpec& pattern, const NetworkParams& p,
                               const PerturbParams& q);
// Same via uniform grid sampling + discrete Fourier transform; cross-check
// path, throws LmaxOverflow if tail energy above cutoff survives at |l| = lmax.
FourierMap compute_G1_numeric(const PatternSpec& pattern, const NetworkParams& p,
                              const PerturbParams& q, int lmax = default_lmax);

// U1 = Rplus pi G1 (tangential), V1 = Nplus (1-pi) G1 (normal), mode-wise.
std::pair<FourierMap, FourierMap> split_rhs(const FourierMap& G1, const SymmetryFrame& frame);

// Mode-wise resolvent: Y_l = (i<Omega,l> I - L)^{-1} V_l.
FourierMap solve_normal(const FourierMap& V1, const SymmetryFrame& frame);

// Resonant part of U1 -> f1; nonresonant part -> X_l = U_l / (i<Omega,l>).
// Returns {X1, f1}.
std::pair<FourierMap, FourierMap> solve_tangential(const FourierMap& U1, const SymmetryFrame& frame,
                                                   double resonance_tol = default_resonance_tol);

// Full generic pipeline (analytic G1 path).
FirstOrderSolution solve_first_order(const PatternSpec& pattern, const NetworkParams& p,
                                     const PerturbParams& q,
                                     double resonance_tol = default_resonance_tol);

// Hard-coded closed-form solution (SDD and SSD patterns).
FirstOrderSolution closed_form_solution(const PatternSpec& pattern, const NetworkParams& p,
                                        const PerturbParams& q);

}  // namespace phasetori
