#pragma once

// Non-rigorous reference: adaptive Dormand-Prince integration of a diagonal
// polynomial field until the orbit leaves the box |x_u| <= r.

#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "saddlenf/saddle_prep.hpp"

namespace saddlenf_test {

struct Monomial {
  int s, u;
  double c;
};

struct MidpointField {
  double lambda_s, lambda_u;
  std::array<std::vector<Monomial>, 2> terms;

  explicit MidpointField(const saddlenf::DiagField& f)
      : lambda_s(f.spectrum.lambda_s.mid()), lambda_u(f.spectrum.lambda_u.mid()) {
    for (std::size_t i = 0; i < 2; ++i) {
      f.F[i].for_each([&](const saddlenf::MultiIndex& m, const saddlenf::Interval& c) {
        if (c.mid() != 0) terms[i].push_back({m.s, m.u, c.mid()});
      });
    }
  }

  void operator()(const std::array<double, 2>& x, std::array<double, 2>& dx, double) const {
    dx = {lambda_s * x[0], lambda_u * x[1]};
    for (std::size_t i = 0; i < 2; ++i) {
      for (const auto& t : terms[i]) dx[i] += t.c * std::pow(x[0], t.s) * std::pow(x[1], t.u);
    }
  }
};

struct SimulatedExit {
  double x_s = 0;
  double x_u = 0;
  double time = 0;
  bool exited = false;
};

/// Integrate from (x_s, x_u) until |x_u| = r, locating the crossing by
/// bisection on the dense output.
inline SimulatedExit simulate_exit(const MidpointField& field, double x_s, double x_u, double r,
                                   double t_max = 200.0) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(State{x_s, x_u}, 0.0, 1e-4);
  SimulatedExit out;
  while (stepper.current_time() < t_max) {
    stepper.do_step(field);
    if (std::fabs(stepper.current_state()[1]) < r) continue;
    double a = stepper.previous_time(), b = stepper.current_time();
    State x;
    for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
      const double m = 0.5 * (a + b);
      stepper.calc_state(m, x);
      (std::fabs(x[1]) < r ? a : b) = m;
    }
    stepper.calc_state(b, x);
    out = {x[0], x[1], b, true};
    return out;
  }
  return out;
}

}  // namespace saddlenf_test
