#include "phasetori/model.hpp"

#include <cmath>
#include <stdexcept>

namespace phasetori {

void NetworkParams::validate() const {
  if (m < 2 || n < 2) throw std::invalid_argument("NetworkParams: need m >= 2 and n >= 2");
  if (k_minus <= 0 || k_plus <= 0)
    throw std::invalid_argument("NetworkParams: coupling strengths must be positive");
}

void PerturbParams::validate() const {
  if (delta < 0) throw std::invalid_argument("PerturbParams: delta must be >= 0");
  if (r < 0) throw std::invalid_argument("PerturbParams: r must be >= 0");
}

double g2(double phi, const NetworkParams& p) {
  return std::sin(phi + p.alpha2) - p.r0 * std::sin(2 * (phi + p.alpha2));
}

double dg2(double phi, const NetworkParams& p) {
  return std::cos(phi + p.alpha2) - 2 * p.r0 * std::cos(2 * (phi + p.alpha2));
}

double g4(double phi, const NetworkParams& p) { return std::sin(phi + p.alpha4); }

double dg4(double phi, const NetworkParams& p) { return std::cos(phi + p.alpha4); }

double hpert(double phi, const PerturbParams& q) {
  return std::sin(phi + q.alpha) + q.r * std::sin(2 * (phi + q.beta));
}

double dhpert(double phi, const PerturbParams& q) {
  return std::cos(phi + q.alpha) + 2 * q.r * std::cos(2 * (phi + q.beta));
}

Vec eval_unperturbed(const Vec& theta, const NetworkParams& p) {
  if (theta.size() != p.size()) throw std::invalid_argument("eval_unperturbed: dimension mismatch");
  const int m = p.m, n = p.n;
  Vec out = Vec::Constant(p.size(), p.omega);
  for (int s = 0; s < m; ++s) {
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        const double phi = theta[p.idx(s, j)] - theta[p.idx(s, k)];
        v += g2(phi, p);
        const int tau_m = (s + m - 1) % m, tau_p = (s + 1) % m;
        double acc_m = 0.0, acc_p = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            acc_m += g4(theta[p.idx(tau_m, a)] - theta[p.idx(tau_m, b)] + phi, p);
            acc_p += g4(theta[p.idx(tau_p, a)] - theta[p.idx(tau_p, b)] + phi, p);
          }
        }
        v += (-p.k_minus * acc_m + p.k_plus * acc_p) / double(n * n);
      }
      out[p.idx(s, k)] += v;
    }
  }
  return out;
}

Vec eval_perturbation(const Vec& theta, const PerturbParams& q) {
  const int nn = int(theta.size());
  Vec out = Vec::Zero(nn);
  for (int k = 0; k < nn; ++k) {
    double z = 0.0;
    for (int l = 0; l < nn; ++l) z += hpert(theta[l] - theta[k], q);
    out[k] = z;
  }
  return out;
}

Vec eval_full(const Vec& theta, const NetworkParams& p, const PerturbParams& q) {
  return eval_unperturbed(theta, p) + q.delta * eval_perturbation(theta, q);
}

Mat jacobian_unperturbed(const Vec& theta, const NetworkParams& p) {
  if (theta.size() != p.size()) throw std::invalid_argument("jacobian_unperturbed: dimension mismatch");
  const int m = p.m, n = p.n;
  Mat J = Mat::Zero(p.size(), p.size());
  for (int s = 0; s < m; ++s) {
    for (int k = 0; k < n; ++k) {
      const int row = p.idx(s, k);
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        const int cj = p.idx(s, j), ck = p.idx(s, k);
        const double phi = theta[cj] - theta[ck];
        const double d2 = dg2(phi, p);
        J(row, cj) += d2;
        J(row, ck) -= d2;
        for (auto [tau, sgn] : {std::pair{(s + m - 1) % m, -p.k_minus},
                                std::pair{(s + 1) % m, p.k_plus}}) {
          const double w = sgn / double(n * n);
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
              const int ca = p.idx(tau, a), cb = p.idx(tau, b);
              const double d4 = dg4(theta[ca] - theta[cb] + phi, p);
              J(row, ca) += w * d4;
              J(row, cb) -= w * d4;
              J(row, cj) += w * d4;
              J(row, ck) -= w * d4;
            }
          }
        }
      }
    }
  }
  return J;
}

Mat jacobian_perturbation(const Vec& theta, const PerturbParams& q) {
  const int nn = int(theta.size());
  Mat J = Mat::Zero(nn, nn);
  for (int k = 0; k < nn; ++k) {
    for (int l = 0; l < nn; ++l) {
      if (l == k) continue;
      const double d = dhpert(theta[l] - theta[k], q);
      J(k, l) += d;
      J(k, k) -= d;
    }
  }
  return J;
}

Mat jacobian_full(const Vec& theta, const NetworkParams& p, const PerturbParams& q) {
  return jacobian_unperturbed(theta, p) + q.delta * jacobian_perturbation(theta, q);
}

}  // namespace phasetori
