#pragma once

#include <optional>
#include <vector>

#include "maxent/dual_solver.hpp"

namespace maxent {

struct RealizabilityStep {
  double parameter = 0.0;
  bool converged = false;
  double multiplier_norm = 0.0;
  double a_N = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct RealizabilityReport {
  std::vector<RealizabilityStep> steps;
  std::optional<double> last_realizable;
  std::optional<double> first_failure;
  /// Bisection-refined location of the realizability boundary along the
  /// path parameter (resolution 1e-4).
  std::optional<double> boundary_estimate;
};

/// Continuation along the straight segment between two moment states of
/// the one-dimensional five-moment reduction (monomials 1..xi^4). Every
/// step is solved cold from its own equilibrium seed, so the outcome per
/// step is independent of visiting order; failures are data, not errors.
inline RealizabilityReport realizability_probe_1d(const MomentVector& start,
                                                  const MomentVector& end, int steps,
                                                  const GasModel& gas,
                                                  const Quadrature& quad,
                                                  const SolverOptions& opts = {}) {
  const MomentBasis& basis = *start.basis;
  if (basis.dim() != 1 || basis.truncation_order() != 4 || basis.size() != 5)
    throw DomainError("realizability_probe_1d expects the 1D five-moment basis");
  if (end.basis != start.basis)
    throw DomainError("realizability_probe_1d: start and end must share a basis");
  if (steps < 2) throw DomainError("realizability_probe_1d: need at least 2 steps");

  auto target_at = [&](double t) {
    MomentVector u(basis);
    for (std::size_t a = 0; a < basis.size(); ++a)
      u[a] = (1.0 - t) * start[a] + t * end[a];
    return u;
  };
  auto probe = [&](double t) {
    RealizabilityStep step;
    step.parameter = t;
    try {
      auto [lam, rep] = try_solve_multipliers(target_at(t), gas, quad, opts);
      step.converged = rep.converged;
      step.multiplier_norm = rep.multiplier_norm;
      step.a_N = rep.a_N;
      step.iterations = rep.iterations;
      step.residual = rep.residual;
    } catch (const Error&) {
      step.converged = false;  // invalid state along the segment
    }
    return step;
  };

  RealizabilityReport report;
  for (int k = 0; k < steps; ++k)
    report.steps.push_back(probe(static_cast<double>(k) / (steps - 1)));

  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    if (report.steps[k].converged) {
      report.last_realizable = report.steps[k].parameter;
    } else if (report.last_realizable) {
      report.first_failure = report.steps[k].parameter;
      break;
    } else {
      report.first_failure = report.steps[k].parameter;
      break;
    }
  }
  if (report.last_realizable && report.first_failure &&
      *report.first_failure > *report.last_realizable) {
    double lo = *report.last_realizable, hi = *report.first_failure;
    while (hi - lo > 1e-4) {
      const double mid = 0.5 * (lo + hi);
      (probe(mid).converged ? lo : hi) = mid;
    }
    report.last_realizable = lo;
    report.boundary_estimate = 0.5 * (lo + hi);
  }
  return report;
}

}  // namespace maxent
