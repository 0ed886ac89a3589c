#pragma once

#include <stdexcept>
#include <string>

#include "phasetori/model.hpp"

namespace phasetori {

struct NotRelativeEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotNormallyHyperbolic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Synchrony pattern: a word over {S, D}, one letter per population.
// S populations are fully synchronized, D populations splayed by 2*pi/n.
struct PatternSpec {
  std::string word;
  Vec base_point;  // E(0), length m*n

  static PatternSpec from_word(const std::string& word, const NetworkParams& p);
};

// Tangent/normal frame of the relative equilibrium torus:
// columns of R span the group directions, columns of N the normal directions,
// Omega is the drift frequency vector and L the normal Floquet matrix.
struct SymmetryFrame {
  Mat R;      // (mn x m)
  Mat N;      // (mn x m(n-1))
  Mat Rplus;  // (m x mn)
  Mat Nplus;  // (m(n-1) x mn)
  Mat pi;     // (mn x mn) projection onto im R along im N
  Vec Omega;  // (m)
  Mat L;      // (m(n-1) square)
};

// Embedding of the unperturbed torus: E(phi) = base_point + R*phi.
Vec embed_unperturbed(const PatternSpec& pattern, const NetworkParams& p, const Vec& phi);

SymmetryFrame build_frame(const PatternSpec& pattern, const NetworkParams& p);

}  // namespace phasetori
