#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "maxent/admissibility.hpp"
#include "maxent/basis.hpp"
#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"
#include "maxent/moments.hpp"
#include "maxent/partition.hpp"
#include "maxent/quadrature.hpp"

namespace maxent {

struct SolverOptions {
  double tol = 1e-10;            // weighted moment-residual tolerance
  int max_iter = 200;
  double ridge_condition = 1e12; // Hessian condition cap before ridging
  double bose_margin = 1e-8;
  bool admissibility_guard = true;
  double armijo = 1e-4;
  double min_step = 1e-14;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool regularized = false;
  double a_N = 0.0;              // sampled direction-form maximum at exit
  double multiplier_norm = 0.0;
  std::string failure;
};

namespace detail {

inline std::vector<double> grid_weights(const Quadrature& quad) {
  return weighted_values([](const std::array<double, 3>&, double) { return 1.0; }, quad);
}

/// Node-by-entry design matrix in the grid's lexicographic order.
inline Eigen::MatrixXd design_matrix(const MomentBasis& basis, const Quadrature& quad,
                                     double mass) {
  const std::size_t nI = quad.has_internal() ? quad.internal.size() : 1;
  Eigen::MatrixXd B(quad.velocity_points() * nI, basis.size());
  std::size_t row = 0;
  for (std::size_t i = 0; i < quad.axis[0].size(); ++i)
    for (std::size_t j = 0; j < quad.axis[1].size(); ++j)
      for (std::size_t k = 0; k < quad.axis[2].size(); ++k) {
        const std::array<double, 3> xi{quad.axis[0].nodes[i], quad.axis[1].nodes[j],
                                       quad.axis[2].nodes[k]};
        for (std::size_t l = 0; l < nI; ++l, ++row) {
          const double I = quad.has_internal() ? quad.internal.nodes[l] : 0.0;
          for (std::size_t a = 0; a < basis.size(); ++a)
            B(row, a) = evaluate_entry(basis.entry(a), xi, I, mass);
        }
      }
  return B;
}

/// Velocity decay order of a basis (energy weight counts as order 2):
/// the nonlinear closure is integrable only for even order >= 2.
inline int decay_order(const MomentBasis& basis) {
  int d = 0;
  for (const auto& entry : basis.entries()) d = std::max(d, entry_velocity_degree(entry));
  return d;
}

inline void require_nonlinear_admissible(const MomentBasis& basis) {
  const int d = decay_order(basis);
  if (d < 2)
    throw AdmissibilityViolation(
        "nonlinear closure needs at least quadratic velocity decay (order >= 2)");
  if (d % 2 != 0)
    throw AdmissibilityViolation(
        "nonlinear closure requested for odd truncation order; moments of the "
        "maximizing distribution diverge");
}

/// Cheap sampled version of the admissibility direction form (no local
/// refinement); used as a line-search guard.
inline double sampled_a_N(const MultiplierVector& lambda) {
  const MomentBasis& b = *lambda.basis;
  if (b.dim() == 1) {
    return std::max(nu_N(lambda, {1, 0, 0}), nu_N(lambda, {-1, 0, 0}));
  }
  static const std::vector<Eigen::Vector3d> samples = detail::icosphere_vertices(2);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : samples)
    best = std::max(best, nu_N(lambda, {t[0], t[1], t[2]}));
  return best;
}

}  // namespace detail

/// Multipliers of the equilibrium (Maxwellian) state with the
/// non-degenerate statistics; also the solver's initial guess for
/// degenerate gases. chi_E collects a constant, a linear part and the
/// isotropic quadratic 1/(2 theta); for the extended phase space the
/// internal-mode multiplier is 1/(2T) and the pure-velocity quadratic
/// coefficient vanishes.
inline MultiplierVector equilibrium_multipliers(const MomentBasis& basis, double rho,
                                                const std::array<double, 3>& v, double T,
                                                const GasModel& gas) {
  if (!(rho > 0.0) || !(T > 0.0))
    throw DegenerateState("equilibrium_multipliers: rho and T must be positive");
  const double theta = gas.kB * T / gas.m;
  const double kBm = gas.kB / gas.m;
  const int dim = basis.dim();
  const bool extended = basis.has_internal_energy();

  double internal_norm = 1.0;
  if (extended) {
    const double a = gas.phi_exponent.value_or(0.0);
    internal_norm = std::tgamma(a + 1.0) * std::pow(gas.kB * T, a + 1.0);
  }
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double c0 =
      kBm * (std::log(gas.Y * gas.m * std::pow(2.0 * M_PI * theta, 0.5 * dim) *
                      internal_norm / rho) +
             v2 / (2.0 * theta));
  const double omega = extended ? 1.0 / (2.0 * T) : 0.0;
  const double cquad = kBm / (2.0 * theta) - omega;

  MultiplierVector lambda(basis);
  bool assigned_const = false, assigned_quad = false;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& entry = basis.entry(a);
    if (entry.size() == 1 && entry[0].e == 1 && entry[0].idx.order() == 0) {
      lambda[a] = omega;
      continue;
    }
    if (entry.size() == 1 && entry[0].e == 0) {
      const auto& mi = entry[0].idx;
      if (mi.order() == 0) {
        lambda[a] = c0;
        assigned_const = true;
      } else if (mi.order() == 1) {
        const int d = mi.p ? 0 : (mi.q ? 1 : 2);
        lambda[a] = -kBm * v[d] / theta;
      } else if (mi.order() == 2 && (mi.p == 2 || mi.q == 2 || mi.r == 2)) {
        lambda[a] = cquad;
        assigned_quad = true;
      }
      continue;
    }
    // Contracted xi^2 entry.
    if (entry.size() == 3 && entry[0].e == 0 && entry[0].idx.order() == 2) {
      lambda[a] = cquad;
      assigned_quad = true;
    }
  }
  if (!assigned_const)
    throw DegenerateState("equilibrium_multipliers: basis lacks a density entry");
  if (!assigned_quad && !extended)
    throw DegenerateState("equilibrium_multipliers: basis lacks quadratic decay");
  return lambda;
}

/// Newton iteration on the convex dual of the entropy maximization: find
/// Lambda with moments(F'(Lambda . xi)) = target. Backtracking line
/// search guards the Bose domain and the admissible cone; the Hessian is
/// ridge-regularized when its condition number exceeds the cap.
inline MultiplierVector solve_multipliers(const MomentVector& target, const GasModel& gas,
                                          const Quadrature& quad,
                                          const SolverOptions& opts = {},
                                          SolveReport* report_out = nullptr) {
  const MomentBasis& basis = *target.basis;
  gas.validate();
  detail::require_nonlinear_admissible(basis);

  const auto cp = conserved_projection(target, gas);
  const double T0 = cp.theta * gas.m / gas.kB;
  MultiplierVector lambda = equilibrium_multipliers(basis, cp.rho, cp.v, T0, gas);

  PartitionFunction part(gas, opts.bose_margin);
  const std::vector<double> W = detail::grid_weights(quad);
  const Eigen::MatrixXd B = detail::design_matrix(basis, quad, gas.m);
  const Eigen::Map<const Eigen::VectorXd> wvec(W.data(), W.size());
  const std::size_t n = basis.size();
  const int pmax = 2 * basis.max_velocity_degree() + 1;

  Eigen::VectorXd lam = Eigen::Map<Eigen::VectorXd>(lambda.values.data(), n);
  Eigen::VectorXd tgt = Eigen::Map<const Eigen::VectorXd>(target.values.data(), n);

  // Per-entry scales rho * theta^(deg/2) for the weighted residual.
  Eigen::VectorXd scale(n);
  for (std::size_t a = 0; a < n; ++a)
    scale[a] = cp.rho * std::pow(cp.theta, 0.5 * entry_velocity_degree(basis.entry(a)));

  SolveReport rep;
  auto finish = [&](bool ok, const std::string& why) {
    rep.converged = ok;
    rep.failure = why;
    for (std::size_t a = 0; a < n; ++a) lambda.values[a] = lam[a];
    rep.multiplier_norm = lam.norm();
    rep.a_N = detail::sampled_a_N(lambda);
    if (report_out) *report_out = rep;
  };

  // chi on the grid; throws DomainError outside the Bose domain.
  auto chi_values = [&](const Eigen::VectorXd& l) -> Eigen::VectorXd {
    Eigen::VectorXd chi = B * l;
    if (part.statistics() < 0) {
      const double floor = part.bose_floor() / part.beta();
      if ((chi.array() < floor).any())
        throw DomainError("multipliers leave the Bose domain on the quadrature grid");
    }
    return chi;
  };

  struct Eval {
    Eigen::VectorXd moments;
    double potential = 0.0;  // h'(Lambda) = m * int F(chi)
    std::vector<double> wfp; // weighted F'(chi), for tables
  };
  auto evaluate = [&](const Eigen::VectorXd& l) -> Eval {
    const Eigen::VectorXd chi = chi_values(l);
    Eval ev;
    ev.wfp.resize(W.size());
    double hp = 0.0;
    for (std::size_t r = 0; r < W.size(); ++r) {
      const double fp = part.Fp(chi[r]);
      if (!std::isfinite(fp)) throw NonFiniteIntegrand("occupation value overflow");
      ev.wfp[r] = W[r] * fp;
      hp += W[r] * part.F(chi[r]);
    }
    ev.potential = gas.m * hp;
    MomentTable table(ev.wfp, quad, pmax);
    ev.moments.resize(n);
    for (std::size_t a = 0; a < n; ++a)
      ev.moments[a] = gas.m * table.entry_moment(basis.entry(a), gas.m);
    return ev;
  };

  auto weighted_err = [&](const Eigen::VectorXd& mom) {
    return ((tgt - mom).cwiseQuotient(scale)).cwiseAbs().maxCoeff();
  };
  // Dual objective g = Lambda . target - h'(Lambda) (convex; gradient
  // target - moments).
  auto objective = [&](const Eigen::VectorXd& l, const Eval& ev) {
    return l.dot(tgt) - ev.potential;
  };

  Eval ev;
  try {
    ev = evaluate(lam);
  } catch (const DomainError&) {
    throw;  // equilibrium seed itself is outside the domain: not representable
  }

  const double guard_base = detail::sampled_a_N(lambda);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    rep.iterations = iter;
    rep.residual = weighted_err(ev.moments);
    if (rep.residual <= opts.tol) {
      finish(true, "");
      return lambda;
    }

    MomentTable fpp_table(
        [&] {
          const Eigen::VectorXd chi = chi_values(lam);
          std::vector<double> wfpp(W.size());
          for (std::size_t r = 0; r < W.size(); ++r)
            wfpp[r] = W[r] * part.Fpp(chi[r]);
          return wfpp;
        }(),
        quad, pmax);
    Eigen::MatrixXd A(n, n);  // A = -Hessian of h' (positive definite)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const double h =
            -gas.m * fpp_table.entry_product_moment(basis.entry(a), basis.entry(b), gas.m);
        A(a, b) = h;
        A(b, a) = h;
      }
    {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
      const double emax = es.eigenvalues().maxCoeff();
      const double emin = es.eigenvalues().minCoeff();
      if (!(emax > 0.0)) {
        finish(false, "dual Hessian lost definiteness");
        throw NotRealizable("dual Hessian lost definiteness (residual " +
                            std::to_string(rep.residual) + ")");
      }
      if (emin < emax / opts.ridge_condition) {
        A.diagonal().array() += emax / opts.ridge_condition - std::min(emin, 0.0);
        rep.regularized = true;
      }
    }

    const Eigen::VectorXd r = tgt - ev.moments;
    const Eigen::VectorXd step = A.ldlt().solve(r);
    const double g0 = objective(lam, ev);
    const double slope = -r.dot(step);  // directional derivative of g

    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= opts.min_step) {
      const Eigen::VectorXd cand = lam - alpha * step;
      bool valid = true;
      Eval cand_ev;
      try {
        cand_ev = evaluate(cand);
      } catch (const Error&) {
        valid = false;
      }
      if (valid && opts.admissibility_guard) {
        MultiplierVector lc(basis);
        for (std::size_t a = 0; a < n; ++a) lc.values[a] = cand[a];
        const double aN = detail::sampled_a_N(lc);
        const double slack = 1e-12 * (1.0 + cand.cwiseAbs().maxCoeff()) +
                             std::max(guard_base, 0.0);
        if (aN > slack) valid = false;
      }
      if (valid) {
        const double g1 = objective(cand, cand_ev);
        if (g1 <= g0 + opts.armijo * alpha * slope || weighted_err(cand_ev.moments) <
                                                          weighted_err(ev.moments)) {
          lam = cand;
          ev = std::move(cand_ev);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      finish(false, "line search failed");
      throw NotRealizable(
          "Newton line search failed; state at or beyond the realizability "
          "boundary (residual " +
          std::to_string(rep.residual) + ", |Lambda| " + std::to_string(lam.norm()) +
          ", a_N " + std::to_string(detail::sampled_a_N(lambda)) + ")");
    }
  }
  rep.residual = weighted_err(ev.moments);
  if (rep.residual <= opts.tol) {
    finish(true, "");
    return lambda;
  }
  finish(false, "iteration limit");
  throw MaxIterations("dual Newton did not reach tolerance in " +
                      std::to_string(opts.max_iter) + " iterations (residual " +
                      std::to_string(rep.residual) + ")");
}

/// Non-throwing variant for continuation studies: failures are recorded
/// in the report instead of raised.
inline std::pair<MultiplierVector, SolveReport> try_solve_multipliers(
    const MomentVector& target, const GasModel& gas, const Quadrature& quad,
    const SolverOptions& opts = {}) {
  SolveReport rep;
  try {
    MultiplierVector lam = solve_multipliers(target, gas, quad, opts, &rep);
    return {std::move(lam), rep};
  } catch (const AdmissibilityViolation&) {
    throw;  // misuse, not a realizability datum
  } catch (const Error& e) {
    if (rep.failure.empty()) rep.failure = e.code();
    MultiplierVector lam(*target.basis);
    return {std::move(lam), rep};
  }
}

/// Closure evaluation at given multipliers: fluxes, entropy and entropy
/// flux, the potentials h' and h'^i, and the dual Hessian
/// m int F'' xi_A xi_B (negative definite).
struct ClosureOutput {
  MomentVector moments;
  std::array<std::vector<double>, 3> fluxes;  // F_{iA}, i = 1..3
  double entropy = 0.0;
  std::array<double, 3> entropy_flux{};
  double potential = 0.0;                     // h'
  std::array<double, 3> potential_flux{};     // h'^i
  Eigen::MatrixXd hessian;
};

inline ClosureOutput close_flux(const MultiplierVector& lambda, const GasModel& gas,
                                const Quadrature& quad) {
  const MomentBasis& basis = *lambda.basis;
  gas.validate();
  PartitionFunction part(gas);
  const std::size_t n = basis.size();
  const int pmax = 2 * basis.max_velocity_degree() + 2;

  const std::vector<double> W = detail::grid_weights(quad);
  const Eigen::MatrixXd B = detail::design_matrix(basis, quad, gas.m);
  const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(lambda.values.data(), n);
  const Eigen::VectorXd chi = B * lam;
  if (part.statistics() < 0) {
    const double floor = part.bose_floor() / part.beta();
    if ((chi.array() < floor).any())
      throw DomainError("multipliers leave the Bose domain on the quadrature grid");
  }

  std::vector<double> wfp(W.size()), wf(W.size()), wfpp(W.size()), weta(W.size());
  for (std::size_t r = 0; r < W.size(); ++r) {
    const double c = chi[r];
    const double fp = part.Fp(c);
    const double f0 = part.F(c);
    wfp[r] = W[r] * fp;
    wf[r] = W[r] * f0;
    wfpp[r] = W[r] * part.Fpp(c);
    weta[r] = W[r] * (c * fp - f0);  // entropy integrand chi F' - F
  }
  MomentTable tf(wfp, quad, pmax), tF(wf, quad, pmax), tpp(wfpp, quad, pmax),
      teta(weta, quad, pmax);

  ClosureOutput out;
  out.moments = MomentVector(basis);
  for (std::size_t a = 0; a < n; ++a)
    out.moments[a] = gas.m * tf.entry_moment(basis.entry(a), gas.m);

  const BasisTerm xi_term[3] = {{1.0, {1, 0, 0}, 0}, {1.0, {0, 1, 0}, 0},
                                {1.0, {0, 0, 1}, 0}};
  for (int d = 0; d < 3; ++d) {
    out.fluxes[d].resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      double fl = 0.0;
      for (const auto& t : basis.entry(a)) fl += tf.product_moment(xi_term[d], t, gas.m);
      out.fluxes[d][a] = gas.m * fl;
    }
    out.entropy_flux[d] = gas.m * teta.term_moment(xi_term[d], gas.m);
    out.potential_flux[d] = gas.m * tF.term_moment(xi_term[d], gas.m);
  }
  out.entropy = gas.m * teta.moment(0, 0, 0);
  out.potential = gas.m * tF.moment(0, 0, 0);

  out.hessian.resize(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const double h =
          gas.m * tpp.entry_product_moment(basis.entry(a), basis.entry(b), gas.m);
      out.hessian(a, b) = h;
      out.hessian(b, a) = h;
    }
  return out;
}

}  // namespace maxent
