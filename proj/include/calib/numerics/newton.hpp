#pragma once

#include <array>
#include <functional>
#include <optional>

namespace calib::num {

struct SolverConfig {
  double tol = 1e-10;   // scaled-residual tolerance, > 0
  int max_iter = 100;   // iteration budget
  double damping = 0.5; // step-halving factor, in (0,1]
};

// Residual of a 2-equation system at a point, with the positive scale
// factors the convergence test divides by. Scales default to 1, which makes
// the tolerance an absolute one.
struct Residual2 {
  double g1 = 0.0;
  double g2 = 0.0;
  double scale1 = 1.0;
  double scale2 = 1.0;
};

struct NewtonResult {
  double b = 0.0;
  double s = 0.0;
  int iterations = 0;
  double max_scaled_residual = 0.0;
};

using ResidualFn = std::function<std::optional<Residual2>(double b, double s)>;
// Row-major 2x2: {dg1/db, dg1/ds, dg2/db, dg2/ds}.
using JacobianFn = std::function<std::array<double, 4>(double b, double s)>;

// Damped Newton for a 2x2 system. Converged when
// max(|g1|/scale1, |g2|/scale2) < cfg.tol; an init already at the root
// reports 0 iterations. The residual callback returns nullopt outside the
// domain; such trial points are rejected by the line search.
//
// The line search freezes the scale factors at the current iterate while
// testing trial points: the Newton direction is a guaranteed descent
// direction for any fixed positive scaling, but not for one that moves with
// the trial point. Step length halves by cfg.damping until the frozen-scale
// merit strictly decreases.
//
// Throws NoConvergence if the init is infeasible, the Jacobian is singular,
// no improving step exists, or the iteration budget runs out.
NewtonResult solve_newton_2d(const ResidualFn& residual,
                             const JacobianFn& jacobian, double b0, double s0,
                             const SolverConfig& cfg = {});

}  // namespace calib::num
