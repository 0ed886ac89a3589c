#include "phasetori/homological.hpp"

#include <cmath>

namespace phasetori {

namespace {

// Fourier coefficients of h: h(x) = sum_{l in {+-1,+-2}} h_l e^{ilx},
// h_1 = e^{i alpha}/(2i), h_2 = r e^{2i beta}/(2i).
cplx h_coeff(int l, const PerturbParams& q) {
  const cplx half_over_i(0.0, -0.5);  // 1/(2i)
  switch (l) {
    case 1:
      return half_over_i * std::exp(cplx(0.0, q.alpha));
    case -1:
      return std::conj(half_over_i * std::exp(cplx(0.0, q.alpha)));
    case 2:
      return half_over_i * q.r * std::exp(cplx(0.0, 2 * q.beta));
    case -2:
      return std::conj(half_over_i * q.r * std::exp(cplx(0.0, 2 * q.beta)));
    default:
      return cplx(0.0, 0.0);
  }
}

}  // namespace

FourierMap compute_G1_analytic(const PatternSpec& pattern, const NetworkParams& p,
                               const PerturbParams& q) {
  const int m = p.m, n = p.n;
  FourierMap G1(m, p.size());
  // Z_{sigma,k}(E(phi)) = sum_{l,m'} h(phi_l - phi_sigma + b_{l,m'} - b_{sigma,k})
  for (int s = 0; s < m; ++s) {
    for (int k = 0; k < n; ++k) {
      const int comp = p.idx(s, k);
      for (int l = 0; l < m; ++l) {
        for (int mp = 0; mp < n; ++mp) {
          const double db = pattern.base_point[p.idx(l, mp)] - pattern.base_point[comp];
          for (int ell : {-2, -1, 1, 2}) {
            FourierMap::Index idx(m, 0);
            idx[l] += ell;
            idx[s] -= ell;
            VecC v = VecC::Zero(p.size());
            v[comp] = h_coeff(ell, q) * std::exp(cplx(0.0, ell * db));
            G1.add(idx, v);
          }
        }
      }
    }
  }
  G1.prune();
  return G1;
}

FourierMap compute_G1_numeric(const PatternSpec& pattern, const NetworkParams& p,
                              const PerturbParams& q, int lmax) {
  const int m = p.m, mn = p.size();
  const int M = 2 * lmax + 2;
  // sample Z o E on a uniform M^m grid
  std::vector<Vec> samples;
  const int total = int(std::pow(M, m));
  samples.reserve(total);
  std::vector<int> gi(m, 0);
  for (int t = 0; t < total; ++t) {
    Vec phi(m);
    int rem = t;
    for (int i = 0; i < m; ++i) {
      gi[i] = rem % M;
      rem /= M;
      phi[i] = 2 * pi * gi[i] / M;
    }
    samples.push_back(eval_perturbation(embed_unperturbed(pattern, p, phi), q));
  }
  FourierMap G1(m, mn);
  double tail = 0.0;
  std::vector<int> li(m, 0);
  const int modes = int(std::pow(2 * lmax + 1, m));
  for (int t = 0; t < modes; ++t) {
    FourierMap::Index l(m);
    int rem = t;
    for (int i = 0; i < m; ++i) {
      l[i] = rem % (2 * lmax + 1) - lmax;
      rem /= (2 * lmax + 1);
    }
    VecC c = VecC::Zero(mn);
    for (int g = 0; g < total; ++g) {
      int rem2 = g;
      double arg = 0.0;
      for (int i = 0; i < m; ++i) {
        arg += l[i] * (2 * pi * (rem2 % M) / M);
        rem2 /= M;
      }
      c += samples[g] * std::exp(cplx(0.0, -arg));
    }
    c /= double(total);
    int linf = 0;
    for (int i = 0; i < m; ++i) linf = std::max(linf, std::abs(l[i]));
    if (linf == lmax) tail = std::max(tail, c.cwiseAbs().maxCoeff());
    if (c.cwiseAbs().maxCoeff() >= 1e-14) G1.add(l, c);
  }
  if (tail > 1e-10)
    throw LmaxOverflow("compute_G1_numeric: spectral energy above cutoff at |l| = lmax");
  return G1;
}

std::pair<FourierMap, FourierMap> split_rhs(const FourierMap& G1, const SymmetryFrame& frame) {
  const int m = int(frame.Omega.size());
  FourierMap U1(m, m), V1(m, int(frame.N.cols()));
  const Mat tang = frame.Rplus * frame.pi;
  const Mat norm = frame.Nplus * (Mat::Identity(frame.pi.rows(), frame.pi.cols()) - frame.pi);
  for (const auto& [l, c] : G1.coeffs()) {
    U1.add(l, tang * c);
    V1.add(l, norm * c);
  }
  U1.prune();
  V1.prune();
  return {U1, V1};
}

FourierMap solve_normal(const FourierMap& V1, const SymmetryFrame& frame) {
  const int nd = int(frame.N.cols());
  FourierMap Y1(V1.dim_domain(), nd);
  for (const auto& [l, c] : V1.coeffs()) {
    double w = 0.0;
    for (int i = 0; i < V1.dim_domain(); ++i) w += frame.Omega[i] * l[i];
    Eigen::MatrixXcd A = cplx(0.0, w) * Eigen::MatrixXcd::Identity(nd, nd) -
                         frame.L.cast<cplx>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(nd - 1);
    if (cond > 1e12)
      throw NearSingularResolvent("solve_normal: resolvent condition number above 1e12");
    Y1.add(l, svd.solve(c));
  }
  Y1.prune();
  return Y1;
}

std::pair<FourierMap, FourierMap> solve_tangential(const FourierMap& U1,
                                                   const SymmetryFrame& frame,
                                                   double resonance_tol) {
  const int m = U1.dim_domain();
  FourierMap X1(m, U1.dim_range()), f1(m, U1.dim_range());
  for (const auto& [l, c] : U1.coeffs()) {
    double w = 0.0;
    for (int i = 0; i < m; ++i) w += frame.Omega[i] * l[i];
    if (std::abs(w) < resonance_tol) {
      f1.add(l, c);
    } else {
      if (std::abs(w) < 10 * resonance_tol)
        throw SmallDivisor("solve_tangential: near-resonant divisor |<Omega,l>| < 10*tol");
      X1.add(l, c / cplx(0.0, w));
    }
  }
  X1.prune();
  f1.prune();
  return {X1, f1};
}

FirstOrderSolution solve_first_order(const PatternSpec& pattern, const NetworkParams& p,
                                     const PerturbParams& q, double resonance_tol) {
  FirstOrderSolution sol;
  sol.pattern = pattern;
  sol.net = p;
  sol.pert = q;
  sol.frame = build_frame(pattern, p);
  const FourierMap G1 = compute_G1_analytic(pattern, p, q);
  auto [U1, V1] = split_rhs(G1, sol.frame);
  sol.Y1 = solve_normal(V1, sol.frame);
  std::tie(sol.X1, sol.f1) = solve_tangential(U1, sol.frame, resonance_tol);
  sol.resonance_tol = resonance_tol;
  return sol;
}

Vec FirstOrderSolution::embedding_eval(const Vec& phi, double delta, bool wrap) const {
  Vec theta = embed_unperturbed(pattern, net, phi);
  theta += delta * (frame.R * X1.eval(phi) + frame.N * Y1.eval(phi));
  if (wrap) {
    for (int i = 0; i < theta.size(); ++i) {
      theta[i] = std::fmod(theta[i], 2 * pi);
      if (theta[i] < 0) theta[i] += 2 * pi;
    }
  }
  return theta;
}

Vec FirstOrderSolution::reduced_vf_eval(const Vec& phi, double delta) const {
  return frame.Omega + delta * f1.eval(phi);
}

double FirstOrderSolution::conjugacy_residual(const Vec& phi, double delta) const {
  const Vec f = reduced_vf_eval(phi, delta);
  const Mat De = frame.R + delta * (frame.R * X1.eval_jacobian(phi) +
                                    frame.N * Y1.eval_jacobian(phi));
  const Vec e = embedding_eval(phi, delta, /*wrap=*/false);
  PerturbParams qd = pert;
  qd.delta = delta;
  const Vec F = eval_full(e, net, qd);
  return (De * f - F).norm();
}

}  // namespace phasetori
