#pragma once

#include "phasetori/collocation.hpp"
#include "phasetori/fourier.hpp"

namespace phasetori {

struct TrivialMultiplierDrift : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FloquetSpectrum {
  VecC multipliers;       // sorted by |mu| descending
  int trivial_index = 0;  // index of the multiplier nearest 1
  double trivial_error = 0.0;
  bool valid = false;  // false: no spectrum was computed for this point

  int n_unstable() const;  // nontrivial multipliers with |mu| > 1
  bool stable() const { return n_unstable() == 0; }
};

// Monodromy matrix: ordered product of per-interval transfer matrices obtained
// from the linearized collocation systems.
Mat monodromy(const CollocationScheme& scheme, const ReducedSystem& sys,
              const OrbitSegment& orbit);

FloquetSpectrum floquet(const CollocationScheme& scheme, const ReducedSystem& sys,
                        const OrbitSegment& orbit, double drift_tol = 1e-3);

// Abel-Liouville check value: |prod mu_i| and exp(T * int_0^1 tr Df dt).
std::pair<double, double> abel_liouville(const CollocationScheme& scheme,
                                         const ReducedSystem& sys, const OrbitSegment& orbit);

}  // namespace phasetori
