#include "phasetori/reduced.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace phasetori {

namespace {

Stability classify(double ev) {
  if (std::abs(ev) < 1e-14) return Stability::neutral;
  return ev < 0 ? Stability::stable : Stability::unstable;
}

}  // namespace

std::vector<ReducedFixedPoint> sdd_fixed_points(const PerturbParams& q) {
  if (q.r <= 0 || q.delta <= 0)
    throw std::invalid_argument("sdd_fixed_points: need r > 0 and delta > 0");
  std::vector<ReducedFixedPoint> out;
  const double c2b = std::cos(2 * q.beta);
  if (std::abs(c2b) < 1e-10) {
    for (double psi : {0.0, pi / 2, pi, 3 * pi / 2})
      out.push_back({"SDD", psi, Stability::neutral, 0.0});
    return out;
  }
  for (double psi : {0.0, pi / 2, pi, 3 * pi / 2}) {
    // rate(psi) = -4 r delta cos(2 beta) sin(2 psi)
    const double ev = -8 * q.r * q.delta * c2b * std::cos(2 * psi);
    out.push_back({"SDD", psi, classify(ev), ev});
  }
  return out;
}

std::vector<ReducedFixedPoint> ssd_fixed_points(const PerturbParams& q) {
  if (q.r <= 0 || q.delta <= 0)
    throw std::invalid_argument("ssd_fixed_points: need r > 0 and delta > 0");
  const double ca = std::cos(q.alpha), c2b = std::cos(2 * q.beta);
  if (std::abs(q.r * c2b) < 1e-12 && std::abs(ca) < 1e-12)
    throw DegenerateReducedDynamics("ssd_fixed_points: rate vanishes identically");
  auto ev_at = [&](double phi) {
    // rate(phi) = -4 delta sin(phi) (cos(alpha) + 2 r cos(phi) cos(2 beta))
    return -4 * q.delta * (std::cos(phi) * ca + 2 * q.r * c2b * std::cos(2 * phi));
  };
  std::vector<ReducedFixedPoint> out;
  for (double phi : {0.0, pi}) out.push_back({"SSD", phi, classify(ev_at(phi)), ev_at(phi)});
  const double rho = ca / (2 * q.r * c2b);
  if (std::abs(rho) < 1.0) {
    const double phi = std::acos(-rho);
    for (double a : {phi, 2 * pi - phi}) out.push_back({"SSD", a, classify(ev_at(a)), ev_at(a)});
  }
  return out;
}

SeedOrbit build_seed_orbit(const FirstOrderSolution& sol, const ReducedFixedPoint& fp,
                           double delta, int nsamples) {
  if (fp.stability == Stability::neutral)
    throw NeutralSeed("build_seed_orbit: fixed point is neutral");
  const int m = sol.net.m, n = sol.net.n;
  SeedOrbit seed;
  seed.windings_reduced = Eigen::VectorXi::Zero(m);
  // freeze the resonant combination at the fixed point, advance the fast
  // angles one full cycle of the slowest nonzero frequency
  double wmin = 0.0;
  for (int i = 0; i < m; ++i)
    if (std::abs(sol.frame.Omega[i]) > 1e-12)
      wmin = (wmin == 0.0) ? std::abs(sol.frame.Omega[i])
                           : std::min(wmin, std::abs(sol.frame.Omega[i]));
  if (wmin == 0.0) throw NeutralSeed("build_seed_orbit: no fast angle in Omega");
  seed.period_estimate = 2 * pi / wmin;
  for (int i = 0; i < m; ++i)
    seed.windings_reduced[i] =
        int(std::lround(sol.frame.Omega[i] * seed.period_estimate / (2 * pi)));

  Vec offset = Vec::Zero(m);
  if (fp.pattern == "SDD")
    offset[2] = fp.angle;  // psi = phi3 - phi2
  else if (fp.pattern == "SSD")
    offset[1] = fp.angle;  // phi = phi2 - phi1
  else
    throw std::invalid_argument("build_seed_orbit: unknown pattern " + fp.pattern);

  seed.windings_full = Eigen::VectorXi::Zero(m * n);
  for (int s = 0; s < m; ++s)
    for (int k = 0; k < n; ++k) seed.windings_full[sol.net.idx(s, k)] = seed.windings_reduced[s];

  for (int i = 0; i < nsamples; ++i) {
    const double s = double(i) / (nsamples - 1);
    Vec phi = offset;
    for (int j = 0; j < m; ++j) phi[j] += 2 * pi * seed.windings_reduced[j] * s;
    seed.phi_curve.push_back(phi);
    seed.full_curve.push_back(sol.embedding_eval(phi, delta, /*wrap=*/false));
  }
  return seed;
}

std::vector<std::pair<double, Vec>> integrate_reduced(const FirstOrderSolution& sol,
                                                      const Vec& phi0, double delta,
                                                      double t_end, double tol) {
  namespace ode = boost::numeric::odeint;
  using state = std::vector<double>;
  state y(phi0.data(), phi0.data() + phi0.size());
  std::vector<std::pair<double, Vec>> out;
  auto rhs = [&](const state& x, state& dxdt, double) {
    const Vec phi = Eigen::Map<const Vec>(x.data(), long(x.size()));
    const Vec f = sol.reduced_vf_eval(phi, delta);
    dxdt.assign(f.data(), f.data() + f.size());
  };
  auto obs = [&](const state& x, double t) {
    out.emplace_back(t, Eigen::Map<const Vec>(x.data(), long(x.size())));
  };
  try {
    ode::integrate_adaptive(
        ode::make_controlled<ode::runge_kutta_fehlberg78<state>>(tol, tol), rhs, y, 0.0, t_end,
        std::min(0.01, t_end / 10), obs);
  } catch (const std::exception& e) {
    throw StepFailure(std::string("integrate_reduced: ") + e.what());
  }
  return out;
}

}  // namespace phasetori
