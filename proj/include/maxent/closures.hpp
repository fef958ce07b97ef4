#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "maxent/dual_solver.hpp"
#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"
#include "maxent/moments.hpp"
#include "maxent/quadrature.hpp"

namespace maxent {

/// Phase-space distribution value at (xi, I); classical evaluators ignore I.
using Distribution = std::function<double(const std::array<double, 3>&, double)>;

/// Equilibrium Maxwellian with moments (rho, rho v, rho v^2 + 3 rho theta).
inline Distribution maxwellian(double rho, const std::array<double, 3>& v, double T,
                               const GasModel& gas) {
  if (!(rho > 0.0) || !(T > 0.0))
    throw DegenerateState("maxwellian: rho and T must be positive");
  const double theta = gas.kB * T / gas.m;
  const double norm = rho / (gas.m * std::pow(2.0 * M_PI * theta, 1.5));
  return [norm, v, theta](const std::array<double, 3>& xi, double) {
    const double c0 = xi[0] - v[0], c1 = xi[1] - v[1], c2 = xi[2] - v[2];
    return norm * std::exp(-(c0 * c0 + c1 * c1 + c2 * c2) / (2.0 * theta));
  };
}

// ---------------------------------------------------------------------------
// Ten-moment Gaussian closure
// ---------------------------------------------------------------------------

struct GaussianParams {
  double rho = 1.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();  // pressure tensor

  void validate() const {
    if (!(rho > 0.0)) throw DegenerateState("GaussianParams: rho must be positive");
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * P.cwiseAbs().maxCoeff())
      throw NotPositiveDefinite("GaussianParams: P must be symmetric");
    Eigen::LLT<Eigen::Matrix3d> llt(P);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("GaussianParams: P must be positive-definite");
  }
};

/// Raw moment rho * E[xi^idx] of the Gaussian state (mean v,
/// covariance P/rho), by the mean/covariance recursion.
inline double gaussian_raw_moment(const GaussianParams& g, const MultiIndex& idx) {
  const Eigen::Matrix3d theta = g.P / g.rho;
  std::map<std::array<int, 3>, double> memo;
  std::function<double(std::array<int, 3>)> ex = [&](std::array<int, 3> a) -> double {
    if (a[0] < 0 || a[1] < 0 || a[2] < 0) return 0.0;
    if (a[0] + a[1] + a[2] == 0) return 1.0;
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    int i = a[0] > 0 ? 0 : (a[1] > 0 ? 1 : 2);
    std::array<int, 3> am = a;
    am[i] -= 1;
    double val = g.v[i] * ex(am);
    for (int j = 0; j < 3; ++j) {
      std::array<int, 3> amm = am;
      amm[j] -= 1;
      val += theta(i, j) * am[j] * ex(amm);
    }
    memo.emplace(a, val);
    return val;
  };
  return g.rho * ex({idx.p, idx.q, idx.r});
}

struct Gaussian10Closure {
  GaussianParams params;
  Distribution evaluator;

  /// Closing flux F_ijk = rho v_i v_j v_k + v_i P_jk + v_j P_ik + v_k P_ij
  /// (the central third moment of a Gaussian vanishes).
  double closing_flux(int i, int j, int k) const {
    const auto& v = params.v;
    const auto& P = params.P;
    return params.rho * v[i] * v[j] * v[k] + v[i] * P(j, k) + v[j] * P(i, k) +
           v[k] * P(i, j);
  }
};

inline Gaussian10Closure gaussian_closure_10(const GaussianParams& params,
                                             const GasModel& gas = {}) {
  params.validate();
  Gaussian10Closure out;
  out.params = params;
  const Eigen::Matrix3d theta = params.P / params.rho;
  const Eigen::Matrix3d prec = theta.inverse();
  const double det = theta.determinant();
  const double norm = params.rho / (gas.m * std::pow(2.0 * M_PI, 1.5) * std::sqrt(det));
  const auto v = params.v;
  out.evaluator = [norm, prec, v](const std::array<double, 3>& xi, double) {
    Eigen::Vector3d c(xi[0] - v[0], xi[1] - v[1], xi[2] - v[2]);
    return norm * std::exp(-0.5 * c.dot(prec * c));
  };
  return out;
}

// ---------------------------------------------------------------------------
// Near-equilibrium linearized closure
// ---------------------------------------------------------------------------

struct LinearizedClosure {
  Distribution evaluator;
  MultiplierVector tilde;        // nonequilibrium multiplier offsets
  MomentVector moments;          // moments of the returned f (basis order)
  std::array<std::vector<double>, 3> fluxes;  // F_{iA}
  bool negative_somewhere = false;  // evaluator dips below zero on the grid
  double min_factor = 1.0;          // min of (1 - (m/kB) chi~) over the grid
  bool large_deviation = false;     // inputs beyond 0.5 relative from equilibrium
};

/// f = f_E (1 - (m/kB) chi~) with chi~ chosen so the moments of f match
/// `target` on the basis. The Gram system is assembled by quadrature
/// (exact for polynomial integrands on a Hermite grid).
inline LinearizedClosure linearized_closure(const MomentVector& target,
                                            const GasModel& gas, const Quadrature& quad) {
  const MomentBasis& basis = *target.basis;
  gas.validate();
  const auto cp = conserved_projection(target, gas);
  const double T = cp.theta * gas.m / gas.kB;
  const double beta = gas.beta();

  const MomentVector eq = equilibrium_moments(basis, cp.rho, cp.v, T, gas);
  const std::size_t n = basis.size();
  Eigen::VectorXd delta(n);
  for (std::size_t a = 0; a < n; ++a) delta[a] = target[a] - eq[a];

  LinearizedClosure out;
  // Flag states far from equilibrium (the construction stays valid but
  // loses its maximization meaning there).
  for (std::size_t a = 0; a < n; ++a) {
    const double scale =
        cp.rho * std::pow(cp.theta, 0.5 * entry_velocity_degree(basis.entry(a)));
    if (std::abs(delta[a]) > 0.5 * scale) out.large_deviation = true;
  }

  // Maxwellian weight on the grid (extended space: times the equilibrium
  // internal marginal).
  const double a_exp = gas.phi_exponent.value_or(0.0);
  const double internal_norm = basis.has_internal_energy()
                                   ? std::tgamma(a_exp + 1.0) *
                                         std::pow(gas.kB * T, a_exp + 1.0)
                                   : 1.0;
  Distribution f_eq;
  {
    Distribution fm = maxwellian(cp.rho, cp.v, T, gas);
    const double kBT = gas.kB * T;
    const bool ext = basis.has_internal_energy();
    f_eq = [fm, ext, kBT, internal_norm](const std::array<double, 3>& xi, double I) {
      double val = fm(xi, 0.0);
      if (ext) val *= std::exp(-I / kBT) / internal_norm;
      return val;
    };
  }

  const std::vector<double> wfe = weighted_values(f_eq, quad);
  const int pmax = 2 * basis.max_velocity_degree() + 2;
  MomentTable table(wfe, quad, pmax);
  Eigen::MatrixXd gram(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const double gab =
          gas.m * table.entry_product_moment(basis.entry(a), basis.entry(b), gas.m);
      gram(a, b) = gab;
      gram(b, a) = gab;
    }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success)
    throw SingularLinearSystem("linearized closure: Gram matrix not factorizable");
  const Eigen::VectorXd tilde = ldlt.solve(-delta / beta);
  if (!tilde.allFinite())
    throw SingularLinearSystem("linearized closure: singular Gram system");

  out.tilde = MultiplierVector(basis);
  for (std::size_t a = 0; a < n; ++a) out.tilde.values[a] = tilde[a];

  const double mass = gas.m;
  std::vector<BasisEntry> entries = basis.entries();
  auto chi_tilde = [entries, tilde, mass](const std::array<double, 3>& xi, double I) {
    double chi = 0.0;
    for (std::size_t a = 0; a < entries.size(); ++a)
      chi += tilde[a] * evaluate_entry(entries[a], xi, I, mass);
    return chi;
  };
  out.evaluator = [f_eq, chi_tilde, beta](const std::array<double, 3>& xi, double I) {
    return f_eq(xi, I) * (1.0 - beta * chi_tilde(xi, I));
  };

  // Moments and fluxes of the factor-corrected distribution.
  const std::vector<double> wf = weighted_values(out.evaluator, quad);
  MomentTable tf(wf, quad, pmax);
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
  }

  // Negativity diagnostic: the polynomial factor can dip below zero far
  // from equilibrium; report it instead of erroring.
  double min_factor = std::numeric_limits<double>::infinity();
  const std::size_t nI = quad.has_internal() ? quad.internal.size() : 1;
  for (std::size_t i = 0; i < quad.axis[0].size(); ++i)
    for (std::size_t j = 0; j < quad.axis[1].size(); ++j)
      for (std::size_t k = 0; k < quad.axis[2].size(); ++k)
        for (std::size_t l = 0; l < nI; ++l) {
          const std::array<double, 3> xi{quad.axis[0].nodes[i], quad.axis[1].nodes[j],
                                         quad.axis[2].nodes[k]};
          const double I = quad.has_internal() ? quad.internal.nodes[l] : 0.0;
          min_factor = std::min(min_factor, 1.0 - beta * chi_tilde(xi, I));
        }
  out.min_factor = min_factor;
  out.negative_somewhere = min_factor < 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Polyatomic closures
// ---------------------------------------------------------------------------

/// Caloric description of the internal modes: eps_E^K(T) = (3/2)(kB/m) T
/// is implicit; eps_E^I is either polytropic or a user-supplied monotone
/// callable vanishing at T -> 0.
struct PolyatomicEos {
  std::function<double(double)> eps_internal;
  std::optional<double> D;  // set for the polytropic family
  double kB = 1.0;
  double m = 1.0;

  double eps_I(double T) const { return eps_internal(T); }
  double eps_K(double T) const { return 1.5 * (kB / m) * T; }

  static PolyatomicEos polytropic(double D, const GasModel& gas = {}) {
    if (!(D > 3.0)) throw DegenerateState("PolyatomicEos: D must exceed 3");
    PolyatomicEos eos;
    eos.D = D;
    eos.kB = gas.kB;
    eos.m = gas.m;
    const double c = 0.5 * (D - 3.0) * gas.kB / gas.m;
    eos.eps_internal = [c](double T) { return c * T; };
    return eos;
  }
  static PolyatomicEos from_callable(std::function<double(double)> eps,
                                     const GasModel& gas = {}) {
    PolyatomicEos eos;
    eos.kB = gas.kB;
    eos.m = gas.m;
    eos.eps_internal = std::move(eps);
    return eos;
  }
};

/// Nonequilibrium internal temperature from the dynamic-pressure ratio:
/// solves eps_E^I(T) - eps_E^I(T^I) = (Pi/p) eps_E^K(T) by safeguarded
/// bisection + Newton on the monotone residual. `pi_ratio` is Pi/p.
inline double solve_TI(double T, double pi_ratio, const PolyatomicEos& eos) {
  if (!(T > 0.0)) throw DegenerateState("solve_TI: T must be positive");
  const double upper = eos.eps_I(T) / eos.eps_K(T);
  if (!(pi_ratio > -1.0) || !(pi_ratio < upper))
    throw OutOfBounds("solve_TI: Pi/p must lie in (-1, eps_I/eps_K)");
  if (pi_ratio == 0.0) return T;

  const double rhs = eos.eps_I(T) - pi_ratio * eos.eps_K(T);
  auto residual = [&](double TI) { return rhs - eos.eps_I(TI); };

  // Bracket: residual is decreasing in TI.
  double lo = 1e-12 * T, hi = T;
  if (residual(hi) > 0.0) {
    while (residual(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12 * T) throw OutOfBounds("solve_TI: failed to bracket T^I");
    }
  }
  if (!(residual(lo) >= 0.0))
    throw OutOfBounds("solve_TI: eps_E^I must vanish as T -> 0");

  const double tol = 1e-13 * eos.eps_K(T);
  double TI = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = residual(TI);
    if (std::abs(r) <= tol) return TI;
    (r > 0.0 ? lo : hi) = TI;
    const double h = 1e-7 * TI;
    const double drdT = (residual(TI + h) - residual(TI - h)) / (2.0 * h);
    double next = (drdT < 0.0) ? TI - r / drdT : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    TI = next;
  }
  return TI;
}

/// Internal-mode normalization A(T^I) = A0 exp((m/kB) int_{T_ref}^{T^I}
/// eps_E^I(x)/x^2 dx), integral by adaptive Simpson to 1e-12 relative.
inline double normalization_A(double TI, const PolyatomicEos& eos, double T_ref = 1.0,
                              double A0 = 1.0) {
  if (!(TI > 0.0) || !(T_ref > 0.0))
    throw DegenerateState("normalization_A: temperatures must be positive");
  auto f = [&](double x) { return eos.eps_I(x) / (x * x); };
  std::function<double(double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fb, double whole, int depth) -> double {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    const double left = (mid - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + mid)) + fm);
    const double right = (b - mid) / 6.0 * (fm + 4.0 * f(0.5 * (mid + b)) + fb);
    if (depth > 40 || std::abs(left + right - whole) < 1e-13 * (std::abs(whole) + 1e-300))
      return left + right;
    return simpson(a, mid, fa, fm, left, depth + 1) +
           simpson(mid, b, fm, fb, right, depth + 1);
  };
  double integral = 0.0;
  if (TI != T_ref) {
    const double a = T_ref, b = TI;
    const double fa = f(a), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + b)) + fb);
    integral = simpson(a, b, fa, fb, whole, 0);
  }
  return A0 * std::exp((eos.m / eos.kB) * integral);
}

namespace detail {

/// Normalizer of the internal marginal exp(-I/(kB T)) against I^a dI at
/// the reference temperature; makes normalization_A return the absolute
/// measure normalization for the polytropic family.
inline double internal_measure_norm(double T, double a, const GasModel& gas) {
  return std::tgamma(a + 1.0) * std::pow(gas.kB * T, a + 1.0);
}

}  // namespace detail

struct F6Params {
  double rho = 1.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  double T = 1.0;
  double Pi = 0.0;
  double TI = 1.0;  // internal-mode nonequilibrium temperature
  double A = 1.0;   // normalization A(T^I)
  double p = 1.0;
};

struct F6Closure {
  F6Params params;
  Distribution evaluator;
};

/// Six-moment nonlinear closure: an isotropic Gaussian at kinetic
/// temperature T (p+Pi)/p times the internal-mode factor exp(-I/(kB T^I)).
inline F6Closure polyatomic_f6(double rho, const std::array<double, 3>& v, double T,
                               double Pi, const PolyatomicEos& eos, const GasModel& gas) {
  gas.validate();
  if (!(rho > 0.0) || !(T > 0.0))
    throw DegenerateState("polyatomic_f6: rho and T must be positive");
  if (!gas.phi_exponent)
    throw DomainError("polyatomic_f6: gas must carry an internal-energy exponent");
  const double p = rho * gas.kB * T / gas.m;
  const double ratio = Pi / p;
  const double TI = solve_TI(T, ratio, eos);
  const double a_exp = *gas.phi_exponent;
  const double A = normalization_A(TI, eos, T, detail::internal_measure_norm(T, a_exp, gas));

  F6Closure out;
  out.params = {rho, v, T, Pi, TI, A, p};
  const double sigma2 = (p + Pi) / rho;  // per-axis velocity variance
  const double norm = rho / (gas.m * std::pow(2.0 * M_PI * sigma2, 1.5) * A);
  const double kBTI = gas.kB * TI;
  out.evaluator = [norm, v, sigma2, kBTI](const std::array<double, 3>& xi, double I) {
    const double c0 = xi[0] - v[0], c1 = xi[1] - v[1], c2 = xi[2] - v[2];
    return norm *
           std::exp(-(c0 * c0 + c1 * c1 + c2 * c2) / (2.0 * sigma2) - I / kBTI);
  };
  return out;
}

struct F11Params {
  double rho = 1.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
  double TI = 1.0;
  double A = 1.0;

  /// p + Pi = tr(P) / 3 by definition of the dynamic pressure.
  double p_plus_Pi() const { return P.trace() / 3.0; }
};

struct F11Closure {
  F11Params params;
  Distribution evaluator;
};

/// Eleven-moment ellipsoidal Gaussian: anisotropic translational part
/// with pressure tensor P times the internal-mode factor of f6.
inline F11Closure ellipsoidal_gaussian_11(double rho, const std::array<double, 3>& v,
                                          const Eigen::Matrix3d& P, double TI,
                                          const PolyatomicEos& eos, const GasModel& gas) {
  gas.validate();
  GaussianParams gp{rho, v, P};
  gp.validate();
  if (!(TI > 0.0)) throw DegenerateState("ellipsoidal_gaussian_11: T^I must be positive");
  if (!gas.phi_exponent)
    throw DomainError("ellipsoidal_gaussian_11: gas must carry an internal-energy exponent");
  const double a_exp = *gas.phi_exponent;
  const double A = normalization_A(TI, eos, 1.0, detail::internal_measure_norm(1.0, a_exp, gas));

  F11Closure out;
  out.params = {rho, v, P, TI, A};
  const Eigen::Matrix3d theta = P / rho;
  const Eigen::Matrix3d prec = theta.inverse();
  const double det = theta.determinant();
  const double norm =
      rho / (gas.m * std::pow(2.0 * M_PI, 1.5) * std::sqrt(det) * A);
  const double kBTI = gas.kB * TI;
  out.evaluator = [norm, prec, v, kBTI](const std::array<double, 3>& xi, double I) {
    Eigen::Vector3d c(xi[0] - v[0], xi[1] - v[1], xi[2] - v[2]);
    return norm * std::exp(-0.5 * c.dot(prec * c) - I / kBTI);
  };
  return out;
}

/// Kinetic entropy -kB int f ln(f / y) (y = e Y) by quadrature; nodes
/// where f <= 0 are skipped and reported through `negative_fraction`.
struct EntropyValue {
  double h = 0.0;
  double negative_fraction = 0.0;
};

inline EntropyValue entropy_of(const Distribution& f, const GasModel& gas,
                               const Quadrature& quad) {
  const double y = std::exp(1.0) * gas.Y;
  const std::vector<double> W = detail::grid_weights(quad);
  std::vector<double> vals = weighted_values(f, quad);  // W * f
  double h = 0.0;
  std::size_t negatives = 0;
  for (std::size_t r = 0; r < vals.size(); ++r) {
    const double fv = vals[r] / W[r];
    if (fv > 0.0) {
      h -= gas.kB * vals[r] * std::log(fv / y);
    } else if (fv < 0.0) {
      ++negatives;
    }
  }
  return {h, static_cast<double>(negatives) / static_cast<double>(vals.size())};
}

}  // namespace maxent
