#include <cmath>

#include "phasetori/homological.hpp"

namespace phasetori {

namespace {

using Index = FourierMap::Index;

// C * cos(<l,phi> + phase) on component comp
void add_cos(FourierMap& f, const Index& l, int comp, double C, double phase) {
  f.add_real_pair(l, comp, C / 2, phase);
}
// S * sin(<l,phi> + phase) on component comp
void add_sin(FourierMap& f, const Index& l, int comp, double S, double phase) {
  f.add_real_pair(l, comp, S / 2, phase - pi / 2);
}

// Solves (d/dt - Lq) y = -2 sin(u + alpha) with u advancing at rate 2 along the
// flow: y = [cos(u+alpha) + (Lq/2) sin(u+alpha)] / (1 + (Lq/2)^2).
void add_normal_response(FourierMap& Y, const Index& l, int comp, double Lq, double alpha) {
  const double den = 1 + 0.25 * Lq * Lq;
  add_cos(Y, l, comp, 1.0 / den, alpha);
  add_sin(Y, l, comp, 0.5 * Lq / den, alpha);
}

}  // namespace

FirstOrderSolution closed_form_solution(const PatternSpec& pattern, const NetworkParams& p,
                                        const PerturbParams& q) {
  if (p.m != 3 || p.n != 2)
    throw std::invalid_argument("closed_form_solution: only the m=3, n=2 network is covered");
  if (pattern.word != "SDD" && pattern.word != "SSD")
    throw std::invalid_argument("closed_form_solution: pattern must be SDD or SSD");

  FirstOrderSolution sol;
  sol.pattern = pattern;
  sol.net = p;
  sol.pert = q;
  sol.frame = build_frame(pattern, p);
  sol.X1 = FourierMap(3, 3);
  sol.Y1 = FourierMap(3, 3);
  sol.f1 = FourierMap(3, 3);

  const double a = q.alpha, b2 = 2 * q.beta, r = q.r;
  const double h0 = std::sin(a) + r * std::sin(b2);

  if (pattern.word == "SDD") {
    add_cos(sol.X1, {-2, 2, 0}, 0, r / 2, b2);
    add_cos(sol.X1, {-2, 0, 2}, 0, r / 2, b2);
    add_cos(sol.X1, {2, -2, 0}, 1, -r / 2, b2);
    add_cos(sol.X1, {2, 0, -2}, 2, -r / 2, b2);

    sol.f1.add({0, 0, 0}, (VecC(3) << 2 * h0, 2 * r * std::sin(b2), 2 * r * std::sin(b2)).finished());
    add_sin(sol.f1, {0, -2, 2}, 1, 2 * r, b2);
    add_sin(sol.f1, {0, 2, -2}, 2, 2 * r, b2);

    add_normal_response(sol.Y1, {1, -1, 0}, 1, sol.frame.L(1, 1), a);
    add_normal_response(sol.Y1, {1, 0, -1}, 2, sol.frame.L(2, 2), a);
  } else {  // SSD
    add_cos(sol.X1, {-2, 0, 2}, 0, r / 2, b2);
    add_cos(sol.X1, {0, -2, 2}, 1, r / 2, b2);
    add_cos(sol.X1, {2, 0, -2}, 2, -r / 2, b2);
    add_cos(sol.X1, {0, 2, -2}, 2, -r / 2, b2);

    sol.f1.add({0, 0, 0}, (VecC(3) << 2 * h0, 2 * h0, 2 * r * std::sin(b2)).finished());
    add_sin(sol.f1, {-1, 1, 0}, 0, 2.0, a);
    add_sin(sol.f1, {-2, 2, 0}, 0, 2 * r, b2);
    add_sin(sol.f1, {1, -1, 0}, 1, 2.0, a);
    add_sin(sol.f1, {2, -2, 0}, 1, 2 * r, b2);

    add_normal_response(sol.Y1, {1, 0, -1}, 2, sol.frame.L(2, 2), a);
    add_normal_response(sol.Y1, {0, 1, -1}, 2, sol.frame.L(2, 2), a);
  }
  sol.X1.prune();
  sol.Y1.prune();
  sol.f1.prune();
  return sol;
}

}  // namespace phasetori
