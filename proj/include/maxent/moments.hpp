#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "maxent/basis.hpp"
#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"
#include "maxent/quadrature.hpp"

namespace maxent {

/// Hydrodynamic projection of a moment vector: density, bulk velocity and
/// the temperature proxies used to seed solvers and adapt quadrature.
struct ConservedProjection {
  double rho = 0.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  double theta = 0.0;                         // kB T / m from the trace
  std::array<double, 3> theta_axis{0.0, 0.0, 0.0};  // per-axis p_ii / rho
  std::optional<double> eps_internal{};       // specific internal-mode energy
};

namespace detail {

inline double trace_second_moment(const MomentVector& u) {
  const MomentBasis& b = *u.basis;
  // Prefer the contracted xi^2 entry when the basis has one.
  for (std::size_t a = 0; a < b.size(); ++a) {
    const auto& entry = b.entry(a);
    if (entry.size() == 3 && entry[0].e == 0 && entry[0].idx.order() == 2 &&
        entry[0].idx.p == 2 && entry[1].idx.q == 2 && entry[2].idx.r == 2)
      return u[a];
  }
  double tr = 0.0;
  bool found = false;
  const int idx[3][3] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}};
  for (const auto& d : idx) {
    if (auto a = b.find(d[0], d[1], d[2])) {
      tr += u[*a];
      found = true;
    }
  }
  if (!found) throw DegenerateState("moment vector carries no second-order trace");
  return tr;
}

}  // namespace detail

inline ConservedProjection conserved_projection(const MomentVector& u,
                                                const GasModel& gas) {
  const MomentBasis& b = *u.basis;
  ConservedProjection cp;
  const auto a0 = b.find(0, 0, 0);
  if (!a0) throw DegenerateState("moment vector carries no density entry");
  cp.rho = u[*a0];
  if (!(cp.rho > 0.0)) throw DegenerateState("non-positive mass density");

  const int dirs[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int d = 0; d < 3; ++d) {
    if (auto a = b.find(dirs[d][0], dirs[d][1], dirs[d][2])) cp.v[d] = u[*a] / cp.rho;
  }
  const double v2 =
      cp.v[0] * cp.v[0] + cp.v[1] * cp.v[1] + cp.v[2] * cp.v[2];

  const double f_ll = detail::trace_second_moment(u);
  const int dim = b.dim();
  cp.theta = (f_ll / cp.rho - v2) / dim;
  if (!(cp.theta > 0.0)) throw DegenerateState("non-positive temperature proxy");

  for (int d = 0; d < 3; ++d) {
    cp.theta_axis[d] = cp.theta;
    const int pp = dirs[d][0] * 2, qq = dirs[d][1] * 2, rr = dirs[d][2] * 2;
    if (auto a = b.find(pp, qq, rr)) {
      const double th = u[*a] / cp.rho - cp.v[d] * cp.v[d];
      if (th > 0.0) cp.theta_axis[d] = th;
    }
  }

  if (b.has_internal_energy()) {
    // G_ll entry: (xi^2 + 2 I / m) with e = 1.
    for (std::size_t a = 0; a < b.size(); ++a) {
      const auto& entry = b.entry(a);
      if (entry.size() == 1 && entry[0].e == 1 && entry[0].idx.order() == 0) {
        const double g_ll = u[a];
        const double eps_total = 0.5 * (g_ll / cp.rho - v2);
        const double eps_kin = 0.5 * dim * cp.theta;
        cp.eps_internal = eps_total - eps_kin;
        break;
      }
    }
  }
  return cp;
}

/// Moments of a distribution against every basis entry:
/// F_A = m * int f xi_A dxi (with phi(I) dI for the extended space).
template <typename F>
MomentVector compute_moments(F&& f, const MomentBasis& basis, const Quadrature& quad,
                             const GasModel& gas) {
  const auto values = weighted_values(f, quad);
  MomentTable table(values, quad, basis.max_velocity_degree() + 1);
  MomentVector out(basis);
  for (std::size_t a = 0; a < basis.size(); ++a)
    out[a] = gas.m * table.entry_moment(basis.entry(a), gas.m);
  return out;
}

/// Hermite grid recentered at the hint's bulk velocity and rescaled per
/// axis by sqrt(p_ii / rho); the internal axis (when the hint carries
/// internal energy) is a Laguerre grid stretched to the equilibrium
/// internal-mode decay scale.
inline Quadrature adapt_quadrature(const MomentVector& moments_hint, int order,
                                   const GasModel& gas) {
  const auto cp = conserved_projection(moments_hint, gas);
  std::array<double, 3> scale{};
  for (int d = 0; d < 3; ++d) scale[d] = std::sqrt(2.0 * cp.theta_axis[d]);
  Quadrature q = make_quadrature(order, cp.v, scale, moments_hint.basis->dim());
  if (moments_hint.basis->has_internal_energy()) {
    const double a = gas.phi_exponent.value_or(0.0);
    double theta_I = gas.kB * (cp.theta * gas.m / gas.kB);  // fall back to kB T
    if (cp.eps_internal && *cp.eps_internal > 0.0)
      theta_I = *cp.eps_internal * gas.m / (a + 1.0);
    attach_internal_axis(q, order, a, theta_I);
  }
  return q;
}

/// Analytic moments of an isotropic Maxwellian (rho, v, theta) against the
/// classical monomials; used to construct equilibrium moment vectors
/// without quadrature. Central moments: E[C^2k] per axis = (2k-1)!! theta^k.
inline double maxwellian_raw_moment(double rho, const std::array<double, 3>& v,
                                    double theta, const MultiIndex& idx) {
  auto axis_moment = [&](int pw, double vd) {
    // E[(v + C)^pw] with C ~ N(0, theta)
    double total = 0.0;
    for (int k = 0; k <= pw; k += 2) {
      double binom = 1.0;
      for (int c = 0; c < k; ++c) binom = binom * (pw - c) / (c + 1.0);
      double dfact = 1.0;
      for (int c = k - 1; c >= 2; c -= 2) dfact *= c;
      total += binom * dfact * std::pow(theta, k / 2.0) * std::pow(vd, pw - k);
    }
    return total;
  };
  return rho * axis_moment(idx.p, v[0]) * axis_moment(idx.q, v[1]) *
         axis_moment(idx.r, v[2]);
}

/// Equilibrium moment vector for (rho, v, T) on any basis whose entries
/// are energy-weighted polynomials; for the extended space the
/// internal-mode marginal is the polytropic equilibrium at temperature T.
inline MomentVector equilibrium_moments(const MomentBasis& basis, double rho,
                                        const std::array<double, 3>& v, double T,
                                        const GasModel& gas) {
  if (!(rho > 0.0) || !(T > 0.0))
    throw DegenerateState("equilibrium_moments: rho and T must be positive");
  const double theta = gas.kB * T / gas.m;
  const double a = gas.phi_exponent.value_or(0.0);
  auto raw = [&](const MultiIndex& mi) {
    return maxwellian_raw_moment(rho, v, theta, mi);
  };
  // E[(2I/m)^k] under the equilibrium marginal I^a exp(-I/(kB T)).
  auto internal_power = [&](int k) {
    double val = 1.0;
    for (int c = 0; c < k; ++c) val *= (a + 1.0 + c) * (2.0 * gas.kB * T / gas.m);
    return val;
  };
  // Moment of xi^(2n) * xi^idx, n <= 2, summing the trace expansion.
  auto xi2_moment = [&](int n, const MultiIndex& idx) {
    if (n == 0) return raw(idx);
    double total = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      MultiIndex mi = idx;
      (ax == 0 ? mi.p : ax == 1 ? mi.q : mi.r) += 2;
      total += (n == 1) ? raw(mi) : xi2_moment(1, mi);
    }
    return total;
  };
  MomentVector out(basis);
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    double total = 0.0;
    for (const auto& t : basis.entry(idx)) {
      // (xi^2 + 2I/m)^e expanded binomially; xi and I are independent.
      for (int k = 0; k <= t.e; ++k) {
        double binom = 1.0;
        for (int c = 0; c < k; ++c) binom = binom * (t.e - c) / (c + 1.0);
        total += t.coef * binom * xi2_moment(t.e - k, t.idx) * internal_power(k);
      }
    }
    out[idx] = total;
  }
  return out;
}

}  // namespace maxent
