#include "calib/numerics/newton.hpp"

#include <cmath>

#include "calib/errors.hpp"

namespace calib::num {

namespace {

bool finite(const Residual2& r) {
  return std::isfinite(r.g1) && std::isfinite(r.g2) && r.scale1 > 0.0 &&
         r.scale2 > 0.0 && std::isfinite(r.scale1) && std::isfinite(r.scale2);
}

double merit(const Residual2& r, double sc1, double sc2) {
  return std::max(std::abs(r.g1) / sc1, std::abs(r.g2) / sc2);
}

}  // namespace

NewtonResult solve_newton_2d(const ResidualFn& residual,
                             const JacobianFn& jacobian, double b0, double s0,
                             const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || !(cfg.damping > 0.0) ||
      cfg.damping > 1.0)
    throw Error("invalid solver configuration");
  if (!std::isfinite(b0) || !std::isfinite(s0))
    throw NoConvergence("solver init is not finite");

  double b = b0;
  double s = s0;
  auto r = residual(b, s);
  if (!r || !finite(*r)) throw NoConvergence("solver init is infeasible");

  for (int it = 0; it < cfg.max_iter; ++it) {
    const double scaled = merit(*r, r->scale1, r->scale2);
    if (scaled < cfg.tol) return {b, s, it, scaled};

    const auto j = jacobian(b, s);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (det == 0.0 || !std::isfinite(det))
      throw NoConvergence("singular Jacobian");
    const double db = (-r->g1 * j[3] + r->g2 * j[1]) / det;
    const double ds = (-r->g2 * j[0] + r->g1 * j[2]) / det;

    // Line search against the merit with the CURRENT scale factors frozen;
    // the Newton direction is a descent direction for that merit, so some
    // damped step must improve unless we are at the arithmetic noise floor.
    const double sc1 = r->scale1;
    const double sc2 = r->scale2;
    const double current = merit(*r, sc1, sc2);
    double lambda = 1.0;
    bool improved = false;
    while (lambda > 0x1.0p-40) {
      auto trial = residual(b + lambda * db, s + lambda * ds);
      if (trial && finite(*trial) && merit(*trial, sc1, sc2) < current) {
        b += lambda * db;
        s += lambda * ds;
        r = trial;
        improved = true;
        break;
      }
      lambda *= cfg.damping;
    }
    if (!improved)
      throw NoConvergence("no improving step (scaled residual " +
                          std::to_string(scaled) + ")");
  }
  throw NoConvergence("iteration budget exhausted");
}

}  // namespace calib::num
