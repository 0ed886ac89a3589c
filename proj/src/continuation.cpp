#include "phasetori/continuation.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace phasetori {

std::string event_code(EventKind k) {
  switch (k) {
    case EventKind::SaddleNode: return "SN";
    case EventKind::Torus: return "TR";
    case EventKind::BranchPoint: return "BP";
    case EventKind::PeriodDoubling: return "PD";
    case EventKind::HomoclinicApproach: return "HOM";
  }
  return "?";
}

double measure_orbit(const CollocationScheme& scheme, const OrbitSegment& orbit,
                     const MeasureSpec& ms) {
  const int ncol = scheme.ncol, d = scheme.dim;
  double acc = 0.0;
  for (int j = 0; j < scheme.ntst; ++j) {
    const double h = scheme.mesh[j + 1] - scheme.mesh[j];
    for (int g = 0; g < ncol; ++g) {
      double v = 0.0;
      for (int i = 0; i <= ncol; ++i) {
        const int ci = scheme.node_index(j, i) * d;
        double s = orbit.u[ci + ms.plus];
        if (ms.minus >= 0) s -= orbit.u[ci + ms.minus];
        v += scheme.P(g, i) * s;
      }
      acc += h * scheme.weights[g] * v;
    }
  }
  acc = std::fmod(acc, 2 * pi);
  if (acc < 0) acc += 2 * pi;
  return acc;
}

OrbitSegment seed_segment(const CollocationScheme& scheme, const SeedOrbit& seed, double delta,
                          double r) {
  if (int(seed.full_curve.size()) != scheme.nnode())
    throw std::invalid_argument("seed_segment: sample count must match the scheme nodes");
  const int d = scheme.dim;
  OrbitSegment o;
  o.u.resize(scheme.nu());
  for (int i = 0; i < scheme.nnode(); ++i) {
    const Vec& th = seed.full_curve[i];
    for (int c = 0; c < d; ++c) o.u[i * d + c] = th[c + 1] - th[0];
  }
  o.windings.resize(d);
  for (int c = 0; c < d; ++c) o.windings[c] = seed.windings_full[c + 1] - seed.windings_full[0];
  o.period = seed.period_estimate;
  o.delta = delta;
  o.r = r;
  return o;
}

namespace {

struct StepState {
  Vec W;
  Vec tangent;
  Vec uold;
  int detsign = 0;
  std::optional<FloquetSpectrum> spectrum;
};

std::optional<FloquetSpectrum> try_floquet(const CollocationScheme& scheme,
                                           const ReducedSystem& sys, const OrbitSegment& o) {
  try {
    return floquet(scheme, sys, o);
  } catch (const TrivialMultiplierDrift&) {
    return std::nullopt;
  }
}

// complex multiplier (|Im| above threshold) closest to the unit circle,
// excluding the trivial one
std::optional<cplx> torus_candidate(const FloquetSpectrum& sp) {
  std::optional<cplx> best;
  for (int i = 0; i < sp.multipliers.size(); ++i) {
    if (i == sp.trivial_index) continue;
    const cplx mu = sp.multipliers[i];
    if (std::abs(mu.imag()) <= 1e-6) continue;
    if (!best || std::abs(std::abs(mu) - 1.0) < std::abs(std::abs(*best) - 1.0)) best = mu;
  }
  return best;
}

std::optional<cplx> pd_candidate(const FloquetSpectrum& sp) {
  std::optional<cplx> best;
  for (int i = 0; i < sp.multipliers.size(); ++i) {
    if (i == sp.trivial_index) continue;
    const cplx mu = sp.multipliers[i];
    if (std::abs(mu.imag()) > 1e-6 || mu.real() > 0) continue;
    if (!best || std::abs(std::abs(mu) - 1.0) < std::abs(std::abs(*best) - 1.0)) best = mu;
  }
  return best;
}

}  // namespace

Branch continue_branch(const CollocationScheme& scheme, const ReducedSystem& sys,
                       const OrbitSegment& start, FreeParam free, const MeasureSpec& ms,
                       const ContinuationSettings& st, const Vec* initial_tangent) {
  const int nu = scheme.nu();
  const double other = (free == FreeParam::delta) ? start.r : start.delta;
  const Eigen::VectorXi windings = start.windings;

  Branch branch;
  StepState cur;
  cur.W = pack_state(start, free);
  cur.uold = cur.W.head(nu);
  cur.tangent = Vec::Zero(scheme.nw());
  cur.tangent[nu + 1] = st.initial_direction;
  if (initial_tangent != nullptr) cur.tangent = *initial_tangent;
  cur.detsign = jacobian_det_sign(scheme, sys, cur.W, cur.uold, windings, free, other);
  cur.spectrum = try_floquet(scheme, sys, start);

  auto record = [&](const StepState& s, const std::string& ev) {
    BranchPointRecord rec;
    rec.orbit = unpack_state(scheme, s.W, windings, free, other);
    if (s.spectrum) rec.spectrum = *s.spectrum;
    rec.measure = measure_orbit(scheme, rec.orbit, ms);
    rec.event = ev;
    branch.points.push_back(std::move(rec));
  };
  record(cur, "");

  const Vec Wstart = cur.W;
  double ds = st.ds0;
  branch.termination = "steps";

  // corrects the predictor at fraction a of the current step; used by the
  // event localizers
  auto substep = [&](const StepState& from, double a, double step) -> std::optional<StepState> {
    StepState out;
    const Vec Wpred = from.W + a * step * from.tangent;
    out.W = Wpred;
    if (!newton_arclength(scheme, sys, out.W, from.uold, windings, free, other, from.tangent,
                          Wpred, st.newton_tol))
      return std::nullopt;
    out.uold = from.uold;
    out.tangent = from.tangent;
    return out;
  };

  for (int step = 0; step < st.max_steps; ++step) {
    auto nextOpt = substep(cur, 1.0, ds);
    if (!nextOpt) {
      ds *= 0.5;
      if (ds < st.dsmin) {
        branch.termination = "underflow";
        break;
      }
      continue;
    }
    StepState next = *nextOpt;
    Vec tn = next.W - cur.W;
    tn /= scheme.wnorm(tn);
    if (scheme.wdot(tn, cur.tangent) < 0) tn = -tn;
    next.tangent = tn;
    const OrbitSegment onext = unpack_state(scheme, next.W, windings, free, other);
    next.detsign = jacobian_det_sign(scheme, sys, next.W, cur.uold, windings, free, other);
    next.spectrum = try_floquet(scheme, sys, onext);

    std::string fired;
    if (st.detect_events) {
      const bool fold = cur.tangent[nu + 1] * tn[nu + 1] < 0 &&
                        std::max(std::abs(cur.tangent[nu + 1]), std::abs(tn[nu + 1])) > 1e-6;
      const bool detflip = next.detsign != cur.detsign;
      bool torus = false, pdouble = false;
      if (cur.spectrum && next.spectrum) {
        auto tc0 = torus_candidate(*cur.spectrum), tc1 = torus_candidate(*next.spectrum);
        if (tc0 && tc1 &&
            (std::abs(*tc0) - 1.0) * (std::abs(*tc1) - 1.0) < 0)
          torus = true;
        auto pc0 = pd_candidate(*cur.spectrum), pc1 = pd_candidate(*next.spectrum);
        if (pc0 && pc1 && (std::abs(*pc0) - 1.0) * (std::abs(*pc1) - 1.0) < 0) pdouble = true;
      }
      const int nfired = int(fold || detflip) + int(torus) + int(pdouble);
      if (nfired > 1 && !(fold && detflip) && ds > 64 * st.dsmin) {
        // two distinct test functions in one step: halve and retry
        ds *= 0.5;
        continue;
      }

      auto localize = [&](EventKind kind, auto test_at) {
        double lo = 0.0, hi = 1.0;
        StepState best = next;
        const int sign_hi = test_at(next);
        (void)sign_hi;
        const int sign_lo_ref = test_at(cur);
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          auto midOpt = substep(cur, mid, ds);
          if (!midOpt) break;
          if (test_at(*midOpt) == sign_lo_ref)
            lo = mid;
          else {
            hi = mid;
            best = *midOpt;
          }
          const double span = std::abs(ds * (hi - lo) * cur.tangent[nu + 1]);
          if (span < st.localization_tol) break;
        }
        BifurcationEvent ev;
        ev.kind = kind;
        ev.orbit = unpack_state(scheme, best.W, windings, free, other);
        ev.delta = ev.orbit.delta;
        ev.r = ev.orbit.r;
        ev.measure = measure_orbit(scheme, ev.orbit, ms);
        ev.point_index = int(branch.points.size()) - 1;
        ev.localization_tol = st.localization_tol;
        branch.events.push_back(ev);
      };

      if (fold) {
        localize(EventKind::SaddleNode, [&](const StepState& s) {
          // tangent lambda-component of the secant from the base point
          Vec t = s.W - cur.W;
          const double n = scheme.wnorm(t);
          if (n == 0.0) return cur.detsign;
          return jacobian_det_sign(scheme, sys, s.W, cur.uold, windings, free, other);
        });
        fired = "SN";
      } else if (detflip) {
        localize(EventKind::BranchPoint, [&](const StepState& s) {
          return jacobian_det_sign(scheme, sys, s.W, cur.uold, windings, free, other);
        });
        fired = "BP";
      } else if (torus) {
        localize(EventKind::Torus, [&](const StepState& s) {
          auto sp = try_floquet(scheme, sys, unpack_state(scheme, s.W, windings, free, other));
          if (!sp) return 0;
          auto tc = torus_candidate(*sp);
          if (!tc) return 0;
          return std::abs(*tc) > 1.0 ? 1 : -1;
        });
        fired = "TR";
      } else if (pdouble) {
        localize(EventKind::PeriodDoubling, [&](const StepState& s) {
          auto sp = try_floquet(scheme, sys, unpack_state(scheme, s.W, windings, free, other));
          if (!sp) return 0;
          auto pc = pd_candidate(*sp);
          if (!pc) return 0;
          return std::abs(*pc) > 1.0 ? 1 : -1;
        });
        fired = "PD";
      }
    }

    next.uold = next.W.head(nu);
    next.detsign = jacobian_det_sign(scheme, sys, next.W, next.uold, windings, free, other);
    cur = next;
    record(cur, fired);

    if (cur.W[nu] > st.T_max) {
      BifurcationEvent ev;
      ev.kind = EventKind::HomoclinicApproach;
      ev.orbit = unpack_state(scheme, cur.W, windings, free, other);
      ev.delta = ev.orbit.delta;
      ev.r = ev.orbit.r;
      ev.measure = measure_orbit(scheme, ev.orbit, ms);
      ev.point_index = int(branch.points.size()) - 1;
      branch.events.push_back(ev);
      branch.points.back().event = "HOM";
      branch.termination = "homoclinic";
      break;
    }
    const double lam = cur.W[nu + 1];
    if (lam < st.lambda_min || lam > st.lambda_max) {
      branch.termination = "range";
      break;
    }
    if (step > 15 && scheme.wnorm(cur.W - Wstart) < 1.5 * ds) {
      branch.closed_loop = true;
      branch.termination = "closed";
      break;
    }
    ds = std::min(ds * 1.5, st.dsmax);
  }
  return branch;
}

Vec branch_null_vector(const CollocationScheme& scheme, const ReducedSystem& sys, const Vec& W,
                       const Vec& uold, const Eigen::VectorXi& windings, FreeParam free,
                       double other) {
  Vec res;
  SpMat J;
  bvp_system(scheme, sys, W, uold, windings, free, other, nullptr, nullptr, res, J);
  // inverse iteration on the near-singular bordered matrix
  Eigen::SparseLU<SpMat> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success)
    throw SingularJacobian("branch_null_vector: factorization failed");
  Vec v = Vec::Ones(scheme.nw());
  v[scheme.nu() + 1] = 0.0;
  v /= scheme.wnorm(v);
  for (int it = 0; it < 8; ++it) {
    Vec w = lu.solve(v);
    const double n = scheme.wnorm(w);
    if (!std::isfinite(n) || n == 0.0)
      throw SingularJacobian("branch_null_vector: inverse iteration failed");
    v = w / n;
  }
  // the fixed-lambda closing row pins the lambda component to zero already;
  // clean it up for a pure state-space direction
  v[scheme.nu() + 1] = 0.0;
  v /= scheme.wnorm(v);
  return v;
}

std::pair<OrbitSegment, Vec> switch_branch(const CollocationScheme& scheme,
                                           const ReducedSystem& sys,
                                           const BifurcationEvent& event, FreeParam free,
                                           const ContinuationSettings& st, int direction) {
  if (event.kind != EventKind::BranchPoint)
    throw SwitchFailure("switch_branch: event is not a branch point");
  const double other = (free == FreeParam::delta) ? event.orbit.r : event.orbit.delta;
  const Vec W = pack_state(event.orbit, free);
  const Vec uold = W.head(scheme.nu());
  Vec v = branch_null_vector(scheme, sys, W, uold, event.orbit.windings, free, other);
  v *= direction;

  double eps = st.eps_switch;
  for (int attempt = 0; attempt < 12; ++attempt, eps *= 0.5) {
    Vec Wn = W + eps * v;
    const Vec Wpred = Wn;
    if (!newton_arclength(scheme, sys, Wn, uold, event.orbit.windings, free, other, v, Wpred,
                          st.newton_tol))
      continue;
    Vec t = Wn - W;
    const double n = scheme.wnorm(t);
    if (n == 0.0) continue;
    t /= n;
    // reject if the corrector fell back onto the primary branch (tangent
    // dominated by the lambda direction)
    if (std::abs(scheme.wdot(t, v)) < 1e-3) continue;
    return {unpack_state(scheme, Wn, event.orbit.windings, free, other), t};
  }
  throw SwitchFailure("switch_branch: could not step onto the secondary branch");
}

}  // namespace phasetori
