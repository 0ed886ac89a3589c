#include "phasetori/frame.hpp"

#include <Eigen/Eigenvalues>

namespace phasetori {

PatternSpec PatternSpec::from_word(const std::string& word, const NetworkParams& p) {
  if (int(word.size()) != p.m)
    throw std::invalid_argument("pattern word length must equal population count");
  PatternSpec spec;
  spec.word = word;
  spec.base_point = Vec::Zero(p.size());
  for (int s = 0; s < p.m; ++s) {
    const char c = word[s];
    if (c == 'S') {
      // synchronized: all zero
    } else if (c == 'D') {
      for (int k = 0; k < p.n; ++k) spec.base_point[p.idx(s, k)] = 2 * pi * k / p.n;
    } else {
      throw std::invalid_argument("pattern word may contain only 'S' and 'D'");
    }
  }
  return spec;
}

Vec embed_unperturbed(const PatternSpec& pattern, const NetworkParams& p, const Vec& phi) {
  Vec theta = pattern.base_point;
  for (int s = 0; s < p.m; ++s)
    for (int k = 0; k < p.n; ++k) theta[p.idx(s, k)] += phi[s];
  return theta;
}

SymmetryFrame build_frame(const PatternSpec& pattern, const NetworkParams& p) {
  const int m = p.m, n = p.n, mn = p.size(), nd = m * (n - 1);
  SymmetryFrame fr;
  fr.R = Mat::Zero(mn, m);
  fr.N = Mat::Zero(mn, nd);
  for (int s = 0; s < m; ++s) {
    for (int k = 0; k < n; ++k) fr.R(p.idx(s, k), s) = 1.0;
    for (int j = 1; j < n; ++j) {
      const int col = s * (n - 1) + (j - 1);
      fr.N(p.idx(s, 0), col) = -1.0;
      fr.N(p.idx(s, j), col) = 1.0;
    }
  }
  fr.Rplus = (fr.R.transpose() * fr.R).ldlt().solve(fr.R.transpose());
  fr.Nplus = (fr.N.transpose() * fr.N).ldlt().solve(fr.N.transpose());

  Mat B(mn, mn);
  B.leftCols(m) = fr.R;
  B.rightCols(nd) = fr.N;
  Mat Binv = B.inverse();
  fr.pi = fr.R * Binv.topRows(m);

  const Vec theta0 = pattern.base_point;
  const Vec H0 = eval_unperturbed(theta0, p);
  const Vec normal_part = (Mat::Identity(mn, mn) - fr.pi) * H0;
  if (normal_part.norm() > 1e-8)
    throw NotRelativeEquilibrium("pattern base point is not a relative equilibrium: |(1-pi)H| = " +
                                 std::to_string(normal_part.norm()));
  fr.Omega = fr.Rplus * H0;

  const Mat DH = jacobian_unperturbed(theta0, p);
  fr.L = fr.Nplus * DH * fr.N;
  const double res = (DH * fr.N - fr.N * fr.L).norm();
  if (res > 1e-10)
    throw NotRelativeEquilibrium("normal bundle not invariant: |DH N - N L| = " +
                                 std::to_string(res));
  Eigen::EigenSolver<Mat> es(fr.L);
  for (int i = 0; i < nd; ++i) {
    if (std::abs(es.eigenvalues()[i].real()) < 1e-8)
      throw NotNormallyHyperbolic("Floquet matrix L has a near-imaginary eigenvalue");
  }
  return fr;
}

}  // namespace phasetori
